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

#ifndef TRIPLEHOP_ENTITY_MATCHER_HPP_
#define TRIPLEHOP_ENTITY_MATCHER_HPP_

#include <bitset>
#include <cstddef>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "triplehop/kg_store.hpp"

namespace triplehop {

// Unbalanced or nested '[' ... ']' in a question.
class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Canonical (trimmed, lowercase, non-empty) entity strings.
class EntitySet {
 public:
  EntitySet() = default;
  EntitySet(std::initializer_list<std::string_view> members) {
    for (auto m : members) insert(m);
  }

  // Canonicalizes; empty strings are ignored.
  void insert(std::string_view entity) {
    std::string key = canonical(entity);
    if (!key.empty()) members_.insert(std::move(key));
  }
  bool contains(std::string_view entity) const {
    return members_.count(canonical(entity)) > 0;
  }
  bool empty() const { return members_.empty(); }
  std::size_t size() const { return members_.size(); }
  const std::set<std::string>& members() const { return members_; }

  friend bool operator==(const EntitySet&, const EntitySet&) = default;

 private:
  std::set<std::string> members_;
};

struct EntityMatch {
  std::size_t begin = 0;  // byte offsets into the scanned text
  std::size_t end = 0;
  std::string entity;  // canonical form
};

// Case-insensitive dictionary of entity strings, scanned greedily
// left-to-right with longest match at word boundaries.
class EntityLexicon {
 public:
  static constexpr std::size_t kMaxEntityLength = 512;

  EntityLexicon() = default;
  explicit EntityLexicon(const std::set<std::string>& entities);
  explicit EntityLexicon(const KnowledgeGraph& kg)
      : EntityLexicon(kg.entities()) {}

  void add(std::string_view entity);
  bool contains(std::string_view entity) const {
    return entries_.count(canonical(entity)) > 0;
  }
  std::size_t size() const { return entries_.size(); }

  // Non-overlapping matches in text order.
  std::vector<EntityMatch> scan(std::string_view text) const;

 private:
  std::unordered_map<std::string, std::string> entries_;  // canonical -> display
  std::bitset<kMaxEntityLength + 1> lengths_;
  std::bitset<256> first_bytes_;
  std::size_t max_length_ = 0;
};

// Trimmed contents of every [...] span, in order. Empty spans are skipped.
std::vector<std::string> extract_bracketed(std::string_view question);

std::vector<std::string> fallback_entity_scan(std::string_view question,
                                              const EntityLexicon& lexicon);
std::vector<std::string> fallback_entity_scan(std::string_view question,
                                              const KnowledgeGraph& kg);

bool triple_matches(const Triple& t, const EntitySet& es);

}  // namespace triplehop

#endif  // TRIPLEHOP_ENTITY_MATCHER_HPP_
