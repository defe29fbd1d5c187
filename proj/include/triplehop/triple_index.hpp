// Copyright 2026 The Triplehop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRIPLEHOP_TRIPLE_INDEX_HPP_
#define TRIPLEHOP_TRIPLE_INDEX_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "triplehop/embedder.hpp"
#include "triplehop/kg_store.hpp"
#include "triplehop/token_matrix.hpp"

namespace triplehop {

struct ScoredTriple {
  TripleId triple_id = 0;
  double score = 0.0;

  friend bool operator==(const ScoredTriple&, const ScoredTriple&) = default;
};

// Token embeddings of every verbalized triple, stored as one contiguous
// d x (total tokens) matrix. Immutable once built; top_k is safe to call
// from several threads.
class TripleIndex {
 public:
  static constexpr char kMagic[8] = {'T', 'H', 'O', 'P', 'I', 'D', 'X', '\0'};
  static constexpr std::uint32_t kVersion = 1;

  TripleIndex(std::string embedder_name, int dimension);

  void append(TripleId id, const MatrixX<float>& token_vectors);
  // Grows storage so `extra` more token columns fit without reallocating.
  void reserve_columns(Eigen::Index extra);

  const std::string& embedder_name() const { return embedder_name_; }
  int dimension() const { return dimension_; }
  std::size_t size() const { return ids_.size(); }
  std::size_t token_count() const { return static_cast<std::size_t>(used_); }

  TripleId triple_id(std::size_t entry) const { return ids_[entry]; }
  auto entry_vectors(std::size_t entry) const {
    return vectors_.middleCols(offsets_[entry],
                               offsets_[entry + 1] - offsets_[entry]);
  }
  // All token columns, entry after entry; entry e ends at column entry_end(e).
  auto token_columns() const { return vectors_.leftCols(used_); }
  Eigen::Index entry_end(std::size_t entry) const {
    return offsets_[entry + 1];
  }

  // Binary layout (little endian): magic[8], u32 version, u32 name length,
  // name bytes, u32 d, u64 entry count, then per entry u32 triple id,
  // u32 token count, token count * d float32 values column by column.
  void write(std::ostream& out) const;
  static TripleIndex read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static TripleIndex load(const std::filesystem::path& path);

 private:
  std::string embedder_name_;
  int dimension_;
  std::vector<TripleId> ids_;
  std::vector<Eigen::Index> offsets_{0};
  MatrixX<float> vectors_;
  Eigen::Index used_ = 0;
};

// One entry per triple in id order. `jobs` > 1 embeds in parallel.
TripleIndex build_index(const KnowledgeGraph& kg, const Embedder& emb,
                        int jobs = 1);

// Best min(k, |index|) triples by MaxSim, score descending then triple id
// ascending. Throws ConfigError if `emb` is not the index's embedder.
std::vector<ScoredTriple> top_k(const TripleIndex& index, const Embedder& emb,
                                std::string_view query, std::size_t k);

}  // namespace triplehop

#endif  // TRIPLEHOP_TRIPLE_INDEX_HPP_
