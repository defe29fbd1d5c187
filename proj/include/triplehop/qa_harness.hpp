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

#ifndef TRIPLEHOP_QA_HARNESS_HPP_
#define TRIPLEHOP_QA_HARNESS_HPP_

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "triplehop/kg_store.hpp"
#include "triplehop/multihop.hpp"

namespace triplehop {

struct QAPair {
  std::string question;
  std::vector<std::string> gold_answers;
  int n_hops = 1;
  std::size_t source_line = 0;
};

// Reads "question<TAB>a1|a2|...". With `expand` every answer becomes its own
// pair carrying the full question; otherwise one pair per line keeps the
// whole answer list.
std::vector<QAPair> load_qa(std::istream& in, int n_hops, bool expand);
std::vector<QAPair> load_qa_file(const std::filesystem::path& path, int n_hops,
                                 bool expand);
void write_qa(std::ostream& out, const std::vector<QAPair>& pairs);

inline constexpr std::string_view kSeparatorToken = "</s>";

struct ReaderInput {
  std::string text;
};

// "question: <Q0></s>context: <kept triples>".
ReaderInput format_input(std::string_view question,
                         const RetrievalTrace& trace, const KnowledgeGraph& kg);

enum class MatchMode { kStrict, kContainment };

std::string_view to_string(MatchMode mode);
MatchMode parse_match_mode(std::string_view text);

// 1 if the lowercased, trimmed prediction equals (strict) or contains
// (containment) any lowercased, trimmed gold answer.
int exact_match(std::string_view prediction,
                const std::vector<std::string>& golds, MatchMode mode);

struct ReaderResult {
  std::optional<std::string> answer;  // empty on failure
  std::string error;
};

// Produces an answer from question + context. Implementations report
// per-item failure in ReaderResult rather than throwing.
class Reader {
 public:
  virtual ~Reader() = default;

  virtual std::string name() const = 0;
  // Whether answer() may be called from several threads at once.
  virtual bool concurrent() const { return true; }
  virtual ReaderResult answer(const ReaderInput& input,
                              const RetrievalTrace& trace) const = 0;
  virtual std::vector<ReaderResult> answer_batch(
      const std::vector<ReaderInput>& inputs,
      const std::vector<const RetrievalTrace*>& traces) const;
};

// Newly reached endpoints of the final hop's kept triples: entities not in
// that hop's entity set, first-seen order, "|"-joined. No kept triples
// gives "".
std::string graph_walk_answer(const ReaderInput& input,
                              const RetrievalTrace& trace,
                              const KnowledgeGraph& kg);

class GraphWalkReader final : public Reader {
 public:
  explicit GraphWalkReader(const KnowledgeGraph& kg) : kg_(kg) {}
  std::string name() const override { return "graph-walk"; }
  ReaderResult answer(const ReaderInput& input,
                      const RetrievalTrace& trace) const override {
    return {graph_walk_answer(input, trace, kg_), {}};
  }

 private:
  const KnowledgeGraph& kg_;
};

// Client for an HTTP reader service:
//   POST /answer   {"input": "..."}      -> {"answer": "..."}
//   POST /answers  {"inputs": ["..."]}   -> {"answers": [{"answer": "..."}
//                                                        | {"error": "..."}]}
// Any transport error or non-200 status fails the affected items.
class RemoteReader final : public Reader {
 public:
  struct Options {
    std::string base_url;       // e.g. http://127.0.0.1:8000
    std::string auth_token;     // sent as "Authorization: Bearer <token>"
    std::size_t batch_size = 1; // >1 uses the batch endpoint
    std::chrono::milliseconds timeout{30000};
  };

  explicit RemoteReader(Options options);

  std::string name() const override { return "remote:" + options_.base_url; }
  bool concurrent() const override { return false; }
  ReaderResult answer(const ReaderInput& input,
                      const RetrievalTrace& trace) const override;
  std::vector<ReaderResult> answer_batch(
      const std::vector<ReaderInput>& inputs,
      const std::vector<const RetrievalTrace*>& traces) const override;
  std::size_t batch_size() const { return options_.batch_size; }

 private:
  Options options_;
};

struct EvalItem {
  std::string question;
  std::string prediction;
  std::vector<std::string> golds;
  int score = 0;
  bool flagged = false;  // reader failed; scored 0
  std::string error;
};

struct EvalReport {
  std::size_t n_items = 0;
  std::size_t n_correct = 0;
  std::size_t n_flagged = 0;
  double em = 0.0;
  std::vector<EvalItem> per_item;
};

struct EvalOptions {
  MatchMode mode = MatchMode::kStrict;
  int jobs = 1;
  std::size_t batch_size = 1;
};

// Retrieval, input formatting, reading and scoring for every pair. Items are
// reported in input order. When `traces` is given it receives one trace per
// pair.
EvalReport evaluate(const std::vector<QAPair>& pairs,
                    const MultiHopRetriever& retriever, const Reader& reader,
                    const EvalOptions& options = {},
                    std::vector<RetrievalTrace>* traces = nullptr);

nlohmann::ordered_json report_to_json(const EvalReport& report,
                                      MatchMode mode);
// "EM: <value> (<correct>/<total>)"
std::string report_summary_line(const EvalReport& report);

// A question template over one relation (1-hop) or a relation pair (2-hop).
// `text` holds the [HEAD] placeholder.
struct QATemplate {
  std::vector<std::string> relations;
  std::string text;
};

inline constexpr std::string_view kHeadPlaceholder = "[HEAD]";

// Lines of "relation<TAB>template" or "relation1<TAB>relation2<TAB>template".
std::vector<QATemplate> load_templates(std::istream& in);

// One question per (template, head entity). 1-hop golds are every tail of
// (head, relation); 2-hop golds every z with (head, r1, y) and (y, r2, z).
std::vector<QAPair> generate_qa(const KnowledgeGraph& kg,
                                const std::vector<QATemplate>& templates,
                                int n_hops);

}  // namespace triplehop

#endif  // TRIPLEHOP_QA_HARNESS_HPP_
