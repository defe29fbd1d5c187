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

#include "triplehop/multihop.hpp"

#include <stdexcept>

namespace triplehop {

std::string_view to_string(EntitySetMode mode) {
  return mode == EntitySetMode::kReplace ? "replace" : "accumulate";
}

EntitySetMode parse_entity_set_mode(std::string_view text) {
  if (text == "replace") return EntitySetMode::kReplace;
  if (text == "accumulate") return EntitySetMode::kAccumulate;
  throw ConfigError("entity_set_mode must be replace or accumulate, got '" +
                    std::string(text) + "'");
}

int KSchedule::k_for(int n_hops, int hop_index) const {
  if (n_hops < 1 || hop_index < 0 || hop_index >= n_hops) {
    throw std::invalid_argument("hop " + std::to_string(hop_index) +
                                " outside a " + std::to_string(n_hops) +
                                "-hop schedule");
  }
  if (!overrides.empty()) {
    const auto i = std::min<std::size_t>(hop_index, overrides.size() - 1);
    return overrides[i];
  }
  if (n_hops == 1) return single_hop_k;
  if (hop_index == 0) return base_k;
  if (hop_index == 1) return base_k * base_k;
  return n_hops * base_k;
}

int k_schedule(int n_hops, int hop_index) {
  return KSchedule{}.k_for(n_hops, hop_index);
}

std::vector<TripleId> distill(const std::vector<ScoredTriple>& retrieved,
                              const EntitySet& es,
                              const std::set<TripleId>& visited,
                              const KnowledgeGraph& kg) {
  std::vector<TripleId> kept;
  for (const ScoredTriple& s : retrieved) {
    if (visited.count(s.triple_id) > 0) continue;
    if (triple_matches(kg.triple(s.triple_id), es)) kept.push_back(s.triple_id);
  }
  return kept;
}

std::string boost(std::string_view question,
                  const std::vector<TripleId>& filtered,
                  const KnowledgeGraph& kg) {
  std::string out(question);
  if (filtered.empty()) return out;
  std::vector<std::string> texts;
  texts.reserve(filtered.size());
  for (TripleId id : filtered) texts.push_back(verbalize(kg.triple(id)).text);
  out.push_back(' ');
  out += join(texts, ". ");
  return out;
}

EntitySet update_entities(const std::vector<TripleId>& filtered,
                          const EntitySet& previous, const KnowledgeGraph& kg,
                          EntitySetMode mode) {
  EntitySet next;
  if (mode == EntitySetMode::kAccumulate) next = previous;
  for (TripleId id : filtered) {
    const auto [head, tail] = entities_of(kg.triple(id));
    if (!previous.contains(head)) next.insert(head);
    if (!previous.contains(tail)) next.insert(tail);
  }
  return next;
}

EntitySet question_entities(std::string_view question,
                            const EntityLexicon& lexicon) {
  std::vector<std::string> found;
  try {
    found = extract_bracketed(question);
  } catch (const BracketError&) {
    found.clear();
  }
  if (found.empty()) found = fallback_entity_scan(question, lexicon);
  EntitySet es;
  for (const auto& e : found) es.insert(e);
  return es;
}

MultiHopRetriever::MultiHopRetriever(const KnowledgeGraph& kg,
                                     const TripleIndex& index,
                                     const Embedder& emb,
                                     RetrieverConfig config)
    : kg_(kg),
      index_(index),
      emb_(emb),
      config_(std::move(config)),
      lexicon_(kg) {
  if (emb_.name() != index_.embedder_name()) {
    throw ConfigError("index was built with embedder '" +
                      index_.embedder_name() + "' but retrieval uses '" +
                      emb_.name() + "'");
  }
}

RetrievalTrace MultiHopRetriever::retrieve(std::string_view question,
                                           int n_hops) const {
  if (n_hops < 1) throw std::invalid_argument("n_hops must be >= 1");
  RetrievalTrace trace;
  trace.question = std::string(question);
  trace.initial_entities = question_entities(question, lexicon_);

  EntitySet live = trace.initial_entities;
  std::string current(question);
  for (int hop = 0; hop < n_hops; ++hop) {
    HopRecord rec;
    rec.hop_index = hop;
    rec.k_used = config_.schedule.k_for(n_hops, hop);
    rec.query = current;
    rec.retrieved = top_k(index_, emb_, current,
                          static_cast<std::size_t>(rec.k_used));
    rec.entity_set_before = live;
    rec.filtered = distill(rec.retrieved, live, trace.visited, kg_);
    trace.visited.insert(rec.filtered.begin(), rec.filtered.end());
    current = boost(current, rec.filtered, kg_);
    rec.boosted = current;
    live = update_entities(rec.filtered, live, kg_, config_.entity_set_mode);
    rec.entity_set_after = live;
    trace.hops.push_back(std::move(rec));
  }
  trace.augmented_question = std::move(current);
  return trace;
}

RetrievalTrace retrieve_context(std::string_view question, int n_hops,
                                const TripleIndex& index, const Embedder& emb,
                                const KnowledgeGraph& kg,
                                const RetrieverConfig& config) {
  return MultiHopRetriever(kg, index, emb, config).retrieve(question, n_hops);
}

std::string context_text(const RetrievalTrace& trace,
                         const KnowledgeGraph& kg) {
  std::vector<std::string> texts;
  for (const HopRecord& hop : trace.hops) {
    for (TripleId id : hop.filtered) {
      texts.push_back(verbalize(kg.triple(id)).text);
    }
  }
  return join(texts, ". ");
}

nlohmann::ordered_json trace_to_json(const RetrievalTrace& trace) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["question"] = trace.question;
  j["initial_entities"] = trace.initial_entities.members();
  ordered_json hops = ordered_json::array();
  for (const HopRecord& h : trace.hops) {
    ordered_json hj;
    hj["hop"] = h.hop_index;
    hj["k"] = h.k_used;
    hj["query"] = h.query;
    ordered_json retrieved = ordered_json::array();
    for (const ScoredTriple& s : h.retrieved) {
      retrieved.push_back({{"id", s.triple_id}, {"score", s.score}});
    }
    hj["retrieved"] = std::move(retrieved);
    hj["filtered"] = h.filtered;
    hj["entity_set_before"] = h.entity_set_before.members();
    hj["entity_set_after"] = h.entity_set_after.members();
    hops.push_back(std::move(hj));
  }
  j["hops"] = std::move(hops);
  j["visited"] = trace.visited;
  j["augmented_question"] = trace.augmented_question;
  return j;
}

}  // namespace triplehop
