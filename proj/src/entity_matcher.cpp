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

#include "triplehop/entity_matcher.hpp"

namespace triplehop {

EntityLexicon::EntityLexicon(const std::set<std::string>& entities) {
  for (const auto& e : entities) add(e);
}

void EntityLexicon::add(std::string_view entity) {
  std::string key = canonical(entity);
  if (key.empty() || key.size() > kMaxEntityLength) return;
  lengths_.set(key.size());
  first_bytes_.set(static_cast<unsigned char>(key.front()));
  max_length_ = std::max(max_length_, key.size());
  entries_.try_emplace(std::move(key), std::string(trim(entity)));
}

std::vector<EntityMatch> EntityLexicon::scan(std::string_view text) const {
  std::vector<EntityMatch> matches;
  if (entries_.empty()) return matches;
  const std::string lowered = to_lower(text);
  const std::size_t n = lowered.size();

  auto word_at = [&](std::size_t i) {
    return is_word_byte(static_cast<unsigned char>(lowered[i]));
  };
  auto start_ok = [&](std::size_t p) {
    return p == 0 || !word_at(p - 1) || !word_at(p);
  };
  auto end_ok = [&](std::size_t q) {
    return q == n || !word_at(q) || !word_at(q - 1);
  };

  std::string candidate;
  std::size_t p = 0;
  while (p < n) {
    if (!start_ok(p) ||
        !first_bytes_.test(static_cast<unsigned char>(lowered[p]))) {
      ++p;
      continue;
    }
    const std::size_t longest = std::min(max_length_, n - p);
    bool matched = false;
    for (std::size_t len = longest; len > 0; --len) {
      if (!lengths_.test(len) || !end_ok(p + len)) continue;
      candidate.assign(lowered, p, len);
      if (entries_.count(candidate) > 0) {
        matches.push_back({p, p + len, candidate});
        p += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++p;
  }
  return matches;
}

std::vector<std::string> extract_bracketed(std::string_view question) {
  std::vector<std::string> out;
  std::size_t open = std::string_view::npos;
  for (std::size_t i = 0; i < question.size(); ++i) {
    if (question[i] == '[') {
      if (open != std::string_view::npos) {
        throw BracketError("nested '['", i);
      }
      open = i;
    } else if (question[i] == ']') {
      if (open == std::string_view::npos) {
        throw BracketError("unmatched ']'", i);
      }
      auto content = trim(question.substr(open + 1, i - open - 1));
      if (!content.empty()) out.emplace_back(content);
      open = std::string_view::npos;
    }
  }
  if (open != std::string_view::npos) throw BracketError("unclosed '['", open);
  return out;
}

std::vector<std::string> fallback_entity_scan(std::string_view question,
                                              const EntityLexicon& lexicon) {
  std::vector<std::string> out;
  for (auto& m : lexicon.scan(question)) out.push_back(std::move(m.entity));
  return out;
}

std::vector<std::string> fallback_entity_scan(std::string_view question,
                                              const KnowledgeGraph& kg) {
  return fallback_entity_scan(question, EntityLexicon(kg));
}

bool triple_matches(const Triple& t, const EntitySet& es) {
  return es.contains(t.head) || es.contains(t.tail);
}

}  // namespace triplehop
