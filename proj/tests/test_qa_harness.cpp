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

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "synthetic.hpp"
#include "triplehop/qa_harness.hpp"

using namespace triplehop;

namespace {

const char* const kCausedLine =
    "What caused [AccidentNumber_FTW93LA202]?\tPre-Flight Planning|Fluid "
    "Fuel|Terrain Condition\n";

std::vector<QAPair> load(const std::string& text, bool expand, int hops = 1) {
  std::istringstream in(text);
  return load_qa(in, hops, expand);
}

// Answers from a fixed table keyed by question; unknown questions fail.
class TableReader final : public Reader {
 public:
  explicit TableReader(std::map<std::string, std::string> table)
      : table_(std::move(table)) {}
  std::string name() const override { return "table"; }
  ReaderResult answer(const ReaderInput&,
                      const RetrievalTrace& trace) const override {
    auto it = table_.find(trace.question);
    if (it == table_.end()) return {std::nullopt, "no entry"};
    return {it->second, {}};
  }

 private:
  std::map<std::string, std::string> table_;
};

class ThrowingReader final : public Reader {
 public:
  std::string name() const override { return "throws"; }
  ReaderResult answer(const ReaderInput&,
                      const RetrievalTrace&) const override {
    throw std::runtime_error("reader crashed");
  }
};

struct SmallPipeline {
  KnowledgeGraph kg;
  std::unique_ptr<OracleEmbedder> emb;
  std::unique_ptr<TripleIndex> index;
  std::unique_ptr<MultiHopRetriever> retriever;

  SmallPipeline() {
    kg.add("X", "directed_by", "Y");
    kg.add("Y", "born_in", "Z");
    kg.add("P", "directed_by", "Q");
    emb = std::make_unique<OracleEmbedder>(kg);
    index = std::make_unique<TripleIndex>(build_index(kg, *emb));
    retriever = std::make_unique<MultiHopRetriever>(kg, *index, *emb);
  }
};

}  // namespace

TEST_CASE("load_qa expands multi-answer lines") {
  const auto expanded = load(kCausedLine, true);
  REQUIRE(expanded.size() == 3);
  for (const auto& p : expanded) {
    CHECK(p.question == "What caused [AccidentNumber_FTW93LA202]?");
    CHECK(p.gold_answers.size() == 1);
    CHECK(p.source_line == 1);
  }
  CHECK(expanded[0].gold_answers[0] == "Pre-Flight Planning");
  CHECK(expanded[1].gold_answers[0] == "Fluid Fuel");
  CHECK(expanded[2].gold_answers[0] == "Terrain Condition");

  const auto whole = load(kCausedLine, false);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].gold_answers ==
        std::vector<std::string>{"Pre-Flight Planning", "Fluid Fuel",
                                 "Terrain Condition"});
}

TEST_CASE("load_qa errors carry line numbers") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      load(text, false);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("q only, no tab\n") == 1);
  CHECK(line_of("a?\tb\n\nc?\t | \n") == 3);
  CHECK(line_of("\tanswer\n") == 1);
  CHECK(load("a?\tb\n", false, 2)[0].n_hops == 2);
}

TEST_CASE("load_qa pair counts") {
  std::mt19937_64 rng(3);
  std::string text;
  std::size_t total_golds = 0;
  std::size_t lines = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + static_cast<int>(rng() % 4);
    text += "q" + std::to_string(i) + "?\t";
    for (int a = 0; a < n; ++a) text += (a ? "|" : "") + std::string("a") + std::to_string(a);
    text += "\n";
    total_golds += n;
    ++lines;
  }
  CHECK(load(text, true).size() == total_golds);
  CHECK(load(text, false).size() == lines);
  for (const auto& p : load(text, true)) {
    for (const auto& g : p.gold_answers) CHECK(g.find('|') == std::string::npos);
  }
  std::ostringstream out;
  write_qa(out, load(text, false));
  CHECK(load(out.str(), false).size() == lines);
}

TEST_CASE("format_input") {
  KnowledgeGraph kg;
  kg.add("X", "directed_by", "Y");
  kg.add("Y", "born_in", "Z");
  RetrievalTrace trace;
  trace.question = "who directed [X]?";
  CHECK(format_input(trace.question, trace, kg).text ==
        "question: who directed [X]?</s>context: ");

  trace.hops.push_back(HopRecord{});
  trace.hops[0].filtered = {0};
  CHECK(format_input(trace.question, trace, kg).text ==
        "question: who directed [X]?</s>context: X directed by Y");

  trace.hops.push_back(HopRecord{});
  trace.hops[1].filtered = {1};
  CHECK(format_input(trace.question, trace, kg).text ==
        "question: who directed [X]?</s>context: X directed by Y. Y born in Z");
}

TEST_CASE("exact_match fixtures") {
  using enum MatchMode;
  CHECK(exact_match("tailwheel", {"Tailwheel"}, kStrict) == 1);
  CHECK(exact_match("N/A (The given Accident Number does not provide any "
                    "information related to an environmental issue)",
                    {"Tailwheel"}, kStrict) == 0);
  CHECK(exact_match("Employee of the Month| Blonde Ambition|Private Valentine: "
                    "Blonde & Dangerous|The Love Guru",
                    {"Employee of the Month", "Blonde Ambition"},
                    kContainment) == 1);
  CHECK(exact_match("german", {"Swedish", "German", "French", "English"},
                    kStrict) == 1);
  CHECK(exact_match("N/A", {"German"}, kStrict) == 0);
  CHECK(exact_match("N/A", {"German"}, kContainment) == 0);
  CHECK(exact_match("employee of the month", {"Employee of the Month"},
                    kStrict) == 1);
  CHECK(exact_match("", {"x"}, kContainment) == 0);
  CHECK(parse_match_mode("containment") == kContainment);
  CHECK_THROWS_AS(parse_match_mode("fuzzy"), ConfigError);
}

TEST_CASE("exact_match properties") {
  std::mt19937_64 rng(8);
  const std::vector<std::string> words = {"Tailwheel", "german", "Blonde",
                                          "AMBITION",  "the",    "Part 91"};
  auto random_phrase = [&] {
    std::string s;
    const int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) s += (i ? " " : "") + words[rng() % words.size()];
    return s;
  };
  auto flip_case = [&](std::string s) {
    for (char& c : s) {
      if (rng() % 2) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      else c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
  };
  for (int trial = 0; trial < 500; ++trial) {
    const std::string pred = random_phrase();
    const std::vector<std::string> golds = {random_phrase(), random_phrase()};
    for (auto mode : {MatchMode::kStrict, MatchMode::kContainment}) {
      const int base = exact_match(pred, golds, mode);
      CHECK(exact_match("  " + flip_case(pred) + "\t", golds, mode) == base);
      CHECK(exact_match(pred, {flip_case(golds[0]), " " + golds[1] + " "},
                        mode) == base);
    }
    if (exact_match(pred, golds, MatchMode::kStrict) == 1) {
      CHECK(exact_match(pred, golds, MatchMode::kContainment) == 1);
    }
  }
}

TEST_CASE("graph_walk_answer") {
  KnowledgeGraph kg;
  kg.add("E0", "r", "Ans");
  kg.add("E0", "r", "M");
  kg.add("M", "s", "Ans");
  RetrievalTrace trace;
  trace.hops.push_back(HopRecord{});
  trace.hops[0].filtered = {0};
  trace.hops[0].entity_set_before = EntitySet{"e0"};
  CHECK(graph_walk_answer({}, trace, kg) == "Ans");

  trace.hops[0].filtered = {0, 1};
  CHECK(graph_walk_answer({}, trace, kg) == "Ans|M");

  trace.hops[0].filtered = {};
  CHECK(graph_walk_answer({}, trace, kg).empty());
  CHECK(graph_walk_answer({}, RetrievalTrace{}, kg).empty());

  // 2-hop chain: the final hop started from {m}.
  trace.hops[0].filtered = {1};
  trace.hops.push_back(HopRecord{});
  trace.hops[1].filtered = {2};
  trace.hops[1].entity_set_before = EntitySet{"m"};
  CHECK(graph_walk_answer({}, trace, kg) == "Ans");
}

TEST_CASE("evaluate scores and aggregates") {
  SmallPipeline p;
  const std::vector<QAPair> pairs = {
      {"q1 [X]", {"Y"}, 1, 1},
      {"q2 [X]", {"y"}, 1, 2},
      {"q3 [P]", {"Q", "R"}, 1, 3},
      {"q4 [P]", {"nope"}, 1, 4}};
  const TableReader reader(
      {{"q1 [X]", "Y"}, {"q2 [X]", " Y "}, {"q3 [P]", "r"}, {"q4 [P]", "Q"}});
  const auto report = evaluate(pairs, *p.retriever, reader);
  CHECK(report.n_items == 4);
  CHECK(report.n_correct == 3);
  CHECK(report.em == doctest::Approx(0.75));
  CHECK(report.per_item[3].score == 0);
  CHECK(report.n_flagged == 0);
  CHECK(report_summary_line(report) == "EM: 0.7500 (3/4)");

  CHECK_THROWS_AS(evaluate({}, *p.retriever, reader), std::invalid_argument);
}

TEST_CASE("evaluate with graph walk") {
  SmallPipeline p;
  const GraphWalkReader reader(p.kg);
  std::vector<RetrievalTrace> traces;
  const auto report = evaluate({{"who directed [X]", {"Y"}, 1, 1},
                                {"born where, director of [X]", {"Z"}, 2, 2}},
                               *p.retriever, reader, {}, &traces);
  CHECK(report.em == 1.0);
  CHECK(traces.size() == 2);
  CHECK(traces[1].hops.size() == 2);

  // Empty context everywhere scores zero.
  const auto none = evaluate({{"who directed [Nobody]", {"Y"}, 1, 1},
                              {"about [Someone]", {"Q"}, 1, 2}},
                             *p.retriever, reader);
  CHECK(none.em == 0.0);
  CHECK(none.per_item[0].prediction.empty());
}

TEST_CASE("evaluate flags reader failures and continues") {
  SmallPipeline p;
  const std::vector<QAPair> pairs = {{"q1 [X]", {"Y"}, 1, 1},
                                     {"unknown [X]", {"Y"}, 1, 2},
                                     {"q3 [P]", {"Q"}, 1, 3}};
  const TableReader reader({{"q1 [X]", "Y"}, {"q3 [P]", "Q"}});
  const auto report = evaluate(pairs, *p.retriever, reader);
  CHECK(report.n_correct == 2);
  CHECK(report.n_flagged == 1);
  CHECK(report.per_item[1].flagged);
  CHECK(report.per_item[1].error == "no entry");
  CHECK(report.per_item[1].score == 0);

  const ThrowingReader thrower;
  for (std::size_t batch : {1u, 2u}) {
    EvalOptions opts;
    opts.batch_size = batch;
    const auto failed = evaluate(pairs, *p.retriever, thrower, opts);
    CHECK(failed.n_flagged == 3);
    CHECK(failed.em == 0.0);
  }
}

TEST_CASE("evaluate is order stable and job independent") {
  const auto fx = testing::make_chain_fixture(5);
  const OracleEmbedder emb(fx.kg);
  const auto index = build_index(fx.kg, emb);
  const MultiHopRetriever retriever(fx.kg, index, emb);
  const GraphWalkReader reader(fx.kg);
  std::vector<QAPair> pairs;
  for (const auto& q : fx.questions) pairs.push_back(q.pair);

  const auto base = evaluate(pairs, retriever, reader);
  std::vector<std::size_t> perm(pairs.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(6));
  std::vector<QAPair> shuffled;
  for (auto i : perm) shuffled.push_back(pairs[i]);

  EvalOptions opts;
  opts.jobs = 4;
  const auto permuted = evaluate(shuffled, retriever, reader, opts);
  CHECK(permuted.em == base.em);
  for (std::size_t j = 0; j < perm.size(); ++j) {
    CHECK(permuted.per_item[j].question == base.per_item[perm[j]].question);
    CHECK(permuted.per_item[j].prediction == base.per_item[perm[j]].prediction);
    CHECK(permuted.per_item[j].score == base.per_item[perm[j]].score);
  }
}

TEST_CASE("report_to_json") {
  SmallPipeline p;
  const TableReader reader(std::map<std::string, std::string>{{"q1 [X]", "Y"}});
  const auto report = evaluate({{"q1 [X]", {"Y"}, 1, 1}, {"q2 [X]", {"Y"}, 1, 2}},
                               *p.retriever, reader);
  const auto j = report_to_json(report, MatchMode::kContainment);
  CHECK(j["summary"]["n_items"] == 2);
  CHECK(j["summary"]["n_correct"] == 1);
  CHECK(j["summary"]["n_flagged"] == 1);
  CHECK(j["summary"]["em"] == 0.5);
  CHECK(j["summary"]["mode"] == "containment");
  REQUIRE(j["per_item"].size() == 2);
  for (const auto& item : j["per_item"]) {
    for (const char* key : {"question", "prediction", "golds", "score", "flagged"}) {
      CHECK(item.contains(key));
    }
  }
  CHECK(j["per_item"][1]["error"] == "no entry");
}

TEST_CASE("generate_qa: 1-hop") {
  KnowledgeGraph kg;
  kg.add("Acc_1", "OccurredAtCountry", "USA");
  kg.add("Acc_2", "OccurredAtCountry", "Canada");
  kg.add("Acc_2", "OccurredAtCountry", "USA");
  kg.add("Acc_1", "hasAircraftManufacturer", "Cessna");
  const std::vector<QATemplate> tpl = {
      {{"OccurredAtCountry"}, "In which country did [HEAD] occur"}};
  const auto qa = generate_qa(kg, tpl, 1);
  REQUIRE(qa.size() == 2);
  CHECK(qa[0].question == "In which country did [Acc_1] occur");
  CHECK(qa[0].gold_answers == std::vector<std::string>{"USA"});
  CHECK(qa[1].gold_answers == std::vector<std::string>{"Canada", "USA"});

  CHECK(generate_qa(kg, {{{"hasEngine"}, "Engine of [HEAD]?"}}, 1).empty());
  CHECK_THROWS_AS(generate_qa(kg, {{{"OccurredAtCountry"}, "no placeholder"}}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_qa(kg, tpl, 2), std::invalid_argument);
}

TEST_CASE("generate_qa: 2-hop") {
  KnowledgeGraph kg;
  kg.add("AccidentNumber_LAX04LA084", "hasRegistrationNumber", "Registration_N1");
  kg.add("Registration_N1", "hasAirworthinessCertificate", "Standard");
  kg.add("Registration_N9", "hasAirworthinessCertificate", "Experimental");
  const std::vector<QATemplate> tpl = {
      {{"hasRegistrationNumber", "hasAirworthinessCertificate"},
       "What is the airworthiness certificate of the registered aircraft "
       "involved in [HEAD]"}};
  const auto qa = generate_qa(kg, tpl, 2);
  REQUIRE(qa.size() == 1);
  CHECK(qa[0].question ==
        "What is the airworthiness certificate of the registered aircraft "
        "involved in [AccidentNumber_LAX04LA084]");
  CHECK(qa[0].gold_answers == std::vector<std::string>{"Standard"});
  CHECK(qa[0].n_hops == 2);
}

TEST_CASE("generate_qa 2-hop golds equal path enumeration") {
  const auto kg = testing::random_kg(600, 80, 4, 91);
  std::vector<QATemplate> tpl;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      tpl.push_back({{"rel_" + std::to_string(a), "rel_" + std::to_string(b)},
                     "what via [HEAD]"});
    }
  }
  const auto qa = generate_qa(kg, tpl, 2);
  CHECK_FALSE(qa.empty());
  std::size_t q = 0;
  for (const auto& t : tpl) {
    // Brute force: every head with at least one complete path, in order.
    std::vector<std::string> heads;
    std::set<std::string> seen;
    for (const Triple& tr : kg.triples()) {
      if (tr.relation == t.relations[0] && seen.insert(tr.head).second) {
        heads.push_back(tr.head);
      }
    }
    for (const auto& head : heads) {
      const auto paths = testing::enumerate_paths(kg, head, t.relations);
      std::set<std::string> expect;
      for (TripleId id : paths[1]) expect.insert(to_lower(kg.triple(id).tail));
      if (expect.empty()) continue;
      REQUIRE(q < qa.size());
      CHECK(qa[q].question == "what via [" + head + "]");
      std::set<std::string> got;
      for (const auto& g : qa[q].gold_answers) got.insert(to_lower(g));
      CHECK(got == expect);
      CHECK(got.size() == qa[q].gold_answers.size());
      ++q;
    }
  }
  CHECK(q == qa.size());
}

TEST_CASE("load_templates") {
  std::istringstream in(
      "# comment\n"
      "OccurredAtCountry\tIn which country did [HEAD] occur\n"
      "hasPilot\thasInstructorRating\tRating of the pilot of [HEAD]?\n");
  const auto t = load_templates(in);
  REQUIRE(t.size() == 2);
  CHECK(t[0].relations == std::vector<std::string>{"OccurredAtCountry"});
  CHECK(t[1].relations.size() == 2);
  CHECK(t[1].text == "Rating of the pilot of [HEAD]?");

  std::istringstream missing("rel\tno placeholder\n");
  CHECK_THROWS_AS(load_templates(missing), ParseError);
  std::istringstream one("just text [HEAD]\n");
  CHECK_THROWS_AS(load_templates(one), ParseError);
}

TEST_CASE("chain fixture questions") {
  const auto fx = testing::make_chain_fixture(1);
  CHECK(fx.entity_count == 50);
  std::size_t one = 0;
  std::size_t two = 0;
  for (const auto& q : fx.questions) {
    (q.pair.n_hops == 1 ? one : two)++;
    REQUIRE(q.gold_path.size() == static_cast<std::size_t>(q.pair.n_hops));
    for (const auto& hop : q.gold_path) CHECK(hop.size() == 1);
  }
  CHECK(one == 100);
  CHECK(two == 100);
}
