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

#ifndef TRIPLEHOP_KG_STORE_HPP_
#define TRIPLEHOP_KG_STORE_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "triplehop/common.hpp"

namespace triplehop {

struct Triple {
  TripleId id = 0;
  std::string head;
  std::string relation;
  std::string tail;

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct VerbalizedTriple {
  TripleId triple_id = 0;
  std::string text;
};

enum class TripleFormat { kPipe, kTab };

// An immutable-after-build set of triples with its entity vocabulary and an
// adjacency index keyed by canonical (trimmed, lowercased) entity.
class KnowledgeGraph {
 public:
  // Trims every field; throws std::invalid_argument if any is empty.
  TripleId add(std::string_view head, std::string_view relation,
               std::string_view tail);

  const std::vector<Triple>& triples() const { return triples_; }
  const Triple& triple(TripleId id) const { return triples_.at(id); }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  // Trimmed, original-case entity strings.
  const std::set<std::string>& entities() const { return entities_; }
  std::size_t relation_count() const { return relations_.size(); }

  // Ascending ids of triples whose head or tail canonicalizes to `entity`.
  std::span<const TripleId> adjacency(std::string_view entity) const;

  // First-seen original-case spelling of a canonical entity, if known.
  std::optional<std::string> display_form(std::string_view entity) const;

  friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    return a.triples_ == b.triples_;
  }

 private:
  std::vector<Triple> triples_;
  std::set<std::string> entities_;
  std::set<std::string> relations_;
  std::unordered_map<std::string, std::vector<TripleId>> adjacency_;
  std::unordered_map<std::string, std::string> display_;
};

// Reads one triple per line. Blank lines and lines starting with '#' are
// skipped; fields are trimmed.
KnowledgeGraph parse_triples(std::istream& in, TripleFormat format);

// Relation surface form: '_' becomes a space, lower->upper camelCase
// boundaries are split, words are lowercased and single-spaced.
std::string humanize_relation(std::string_view relation);

// "<head> <humanized relation> <tail>".
VerbalizedTriple verbalize(const Triple& t);

inline std::pair<std::string, std::string> entities_of(const Triple& t) {
  return {t.head, t.tail};
}

std::vector<TripleId> adjacency_lookup(const KnowledgeGraph& kg,
                                       std::string_view entity);

struct KgMeta {
  std::size_t triples = 0;
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::string source_hash;
};

// Writes <dir>/triples.tsv and <dir>/meta.json. `source_hash` identifies the
// file the graph was ingested from; defaults to the hash of triples.tsv.
KgMeta save_kg(const KnowledgeGraph& kg, const std::filesystem::path& dir,
               std::optional<std::string> source_hash = std::nullopt);

// Loads a directory written by save_kg and checks it against meta.json.
KnowledgeGraph load_kg(const std::filesystem::path& dir);

// Loads either a serialized directory or a raw triple file (pipe format
// unless the extension is .tsv).
KnowledgeGraph load_kg_any(const std::filesystem::path& path);

// "fnv1a64:<hex>" of a file's bytes.
std::string file_hash(const std::filesystem::path& path);

}  // namespace triplehop

#endif  // TRIPLEHOP_KG_STORE_HPP_
