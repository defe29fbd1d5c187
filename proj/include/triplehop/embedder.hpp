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

#ifndef TRIPLEHOP_EMBEDDER_HPP_
#define TRIPLEHOP_EMBEDDER_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

#include "triplehop/entity_matcher.hpp"
#include "triplehop/token_matrix.hpp"

namespace triplehop {

// Maps text to per-token unit vectors. Implementations must be deterministic
// and safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::string name() const = 0;
  virtual int dimension() const = 0;
  virtual TokenMatrix embed(std::string_view text) const = 0;
};

// Built-in stand-in for a trained encoder. Each lowercased word becomes the
// L2-normalized mean of one-hot buckets of its '#'-padded character
// trigrams, hashed into `dimension` buckets.
class HashedTrigramEmbedder final : public Embedder {
 public:
  static constexpr int kDefaultDimension = 64;

  explicit HashedTrigramEmbedder(int dimension = kDefaultDimension);

  std::string name() const override;
  int dimension() const override { return dimension_; }
  TokenMatrix embed(std::string_view text) const override;

 private:
  int dimension_;
};

// Key used by precomputed embedding files: hex FNV-1a 64 of the raw text.
std::string text_hash(std::string_view text);

// Serves vectors produced offline by an external encoder. Input is
// JSON-lines of {"text_hash", "tokens", "vectors"}; every text the pipeline
// embeds must be present.
class PrecomputedEmbedder final : public Embedder {
 public:
  PrecomputedEmbedder(std::istream& jsonl, std::string name);
  static PrecomputedEmbedder from_file(const std::filesystem::path& path);

  std::string name() const override { return "precomputed:" + name_; }
  int dimension() const override { return dimension_; }
  TokenMatrix embed(std::string_view text) const override;
  std::size_t size() const { return table_.size(); }

 private:
  std::string name_;
  int dimension_ = 0;
  std::unordered_map<std::string, TokenMatrix> table_;
};

// Test oracle: every occurrence of a salient phrase (longest match, case
// insensitive) becomes one token with its own one-hot axis; every other
// word shares a single background axis. MaxSim then counts salient phrases
// shared between query and triple plus a constant per background word, so
// identical texts score identically and entity overlap decides the rank.
class OracleEmbedder final : public Embedder {
 public:
  explicit OracleEmbedder(const std::set<std::string>& salient);
  explicit OracleEmbedder(const KnowledgeGraph& kg)
      : OracleEmbedder(kg.entities()) {}

  std::string name() const override { return "oracle"; }
  int dimension() const override { return static_cast<int>(axes_.size()) + 1; }
  TokenMatrix embed(std::string_view text) const override;

 private:
  EntityLexicon lexicon_;
  std::map<std::string, int> axes_;  // canonical phrase -> axis (1-based)
};

// "builtin" (optionally "builtin:<d>"), "precomputed:<path>", or "oracle"
// (entity-phrase embedder over `kg`, for diagnostics on synthetic graphs).
std::unique_ptr<Embedder> make_embedder(std::string_view choice,
                                        const KnowledgeGraph* kg = nullptr);

}  // namespace triplehop

#endif  // TRIPLEHOP_EMBEDDER_HPP_
