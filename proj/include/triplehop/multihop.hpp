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

#ifndef TRIPLEHOP_MULTIHOP_HPP_
#define TRIPLEHOP_MULTIHOP_HPP_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "triplehop/embedder.hpp"
#include "triplehop/entity_matcher.hpp"
#include "triplehop/kg_store.hpp"
#include "triplehop/triple_index.hpp"

namespace triplehop {

// How the live entity set moves between hops. kReplace keeps only the
// entities newly reached by the hop's kept triples; kAccumulate keeps every
// entity seen so far.
enum class EntitySetMode { kReplace, kAccumulate };

std::string_view to_string(EntitySetMode mode);
EntitySetMode parse_entity_set_mode(std::string_view text);

// Retrieval depth per hop. Single-hop questions use `single_hop_k`; longer
// chains use k, k^2 and then n_hops * k for every later hop. Non-empty
// `overrides` pins hop i to overrides[i] (the last value repeats).
struct KSchedule {
  int single_hop_k = 5;
  int base_k = 3;
  std::vector<int> overrides;

  int k_for(int n_hops, int hop_index) const;
};

int k_schedule(int n_hops, int hop_index);

struct HopRecord {
  int hop_index = 0;
  int k_used = 0;
  std::string query;               // text sent to top_k
  std::vector<ScoredTriple> retrieved;
  std::vector<TripleId> filtered;  // rank order
  EntitySet entity_set_before;     // set the distiller used at this hop
  EntitySet entity_set_after;
  std::string boosted;             // query with this hop's triples appended
};

struct RetrievalTrace {
  std::string question;
  EntitySet initial_entities;
  std::vector<HopRecord> hops;
  std::set<TripleId> visited;
  std::string augmented_question;
};

// Keeps, in rank order, retrieved triples with a head or tail in `es` that
// were not kept by an earlier hop.
std::vector<TripleId> distill(const std::vector<ScoredTriple>& retrieved,
                              const EntitySet& es,
                              const std::set<TripleId>& visited,
                              const KnowledgeGraph& kg);

// Appends the verbalized triples to the question, ". "-joined.
std::string boost(std::string_view question,
                  const std::vector<TripleId>& filtered,
                  const KnowledgeGraph& kg);

EntitySet update_entities(const std::vector<TripleId>& filtered,
                          const EntitySet& previous, const KnowledgeGraph& kg,
                          EntitySetMode mode = EntitySetMode::kReplace);

// Question entities: bracketed spans, or a vocabulary scan when the question
// has none (or its brackets are malformed).
EntitySet question_entities(std::string_view question,
                            const EntityLexicon& lexicon);

struct RetrieverConfig {
  KSchedule schedule;
  EntitySetMode entity_set_mode = EntitySetMode::kReplace;
};

// Bundles the immutable inputs of the iterative retrieval loop. Holds
// references; the graph, index and embedder must outlive it. retrieve() is
// const and may run concurrently.
class MultiHopRetriever {
 public:
  MultiHopRetriever(const KnowledgeGraph& kg, const TripleIndex& index,
                    const Embedder& emb, RetrieverConfig config = {});

  RetrievalTrace retrieve(std::string_view question, int n_hops) const;

  const KnowledgeGraph& kg() const { return kg_; }
  const RetrieverConfig& config() const { return config_; }

 private:
  const KnowledgeGraph& kg_;
  const TripleIndex& index_;
  const Embedder& emb_;
  RetrieverConfig config_;
  EntityLexicon lexicon_;
};

RetrievalTrace retrieve_context(std::string_view question, int n_hops,
                                const TripleIndex& index, const Embedder& emb,
                                const KnowledgeGraph& kg,
                                const RetrieverConfig& config = {});

// All hops' kept triples, verbalized and ". "-joined in hop then rank order.
std::string context_text(const RetrievalTrace& trace, const KnowledgeGraph& kg);

nlohmann::ordered_json trace_to_json(const RetrievalTrace& trace);

}  // namespace triplehop

#endif  // TRIPLEHOP_MULTIHOP_HPP_
