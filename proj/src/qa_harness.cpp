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

#include "triplehop/qa_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_set>

#include "httplib.h"

namespace triplehop {

std::vector<QAPair> load_qa(std::istream& in, int n_hops, bool expand) {
  if (n_hops < 1) throw std::invalid_argument("n_hops must be >= 1");
  std::vector<QAPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("missing tab", line_no, line);
    const std::string_view question = trim(std::string_view(line).substr(0, tab));
    if (question.empty()) throw ParseError("empty question", line_no, line);

    std::vector<std::string> golds;
    for (auto part : split(std::string_view(line).substr(tab + 1), '|')) {
      part = trim(part);
      if (!part.empty()) golds.emplace_back(part);
    }
    if (golds.empty()) throw ParseError("empty answer field", line_no, line);

    if (expand) {
      for (auto& g : golds) {
        pairs.push_back({std::string(question), {std::move(g)}, n_hops, line_no});
      }
    } else {
      pairs.push_back({std::string(question), std::move(golds), n_hops, line_no});
    }
  }
  return pairs;
}

std::vector<QAPair> load_qa_file(const std::filesystem::path& path, int n_hops,
                                 bool expand) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return load_qa(in, n_hops, expand);
}

void write_qa(std::ostream& out, const std::vector<QAPair>& pairs) {
  for (const QAPair& p : pairs) {
    out << p.question << '\t' << join(p.gold_answers, "|") << '\n';
  }
}

ReaderInput format_input(std::string_view question,
                         const RetrievalTrace& trace,
                         const KnowledgeGraph& kg) {
  std::string text = "question: ";
  text += question;
  text += kSeparatorToken;
  text += "context: ";
  text += context_text(trace, kg);
  return {std::move(text)};
}

std::string_view to_string(MatchMode mode) {
  return mode == MatchMode::kStrict ? "strict" : "containment";
}

MatchMode parse_match_mode(std::string_view text) {
  if (text == "strict") return MatchMode::kStrict;
  if (text == "containment") return MatchMode::kContainment;
  throw ConfigError("eval mode must be strict or containment, got '" +
                    std::string(text) + "'");
}

int exact_match(std::string_view prediction,
                const std::vector<std::string>& golds, MatchMode mode) {
  const std::string pred = canonical(prediction);
  for (const auto& g : golds) {
    const std::string gold = canonical(g);
    if (mode == MatchMode::kStrict) {
      if (pred == gold) return 1;
    } else if (!gold.empty() && pred.find(gold) != std::string::npos) {
      return 1;
    }
  }
  return 0;
}

std::vector<ReaderResult> Reader::answer_batch(
    const std::vector<ReaderInput>& inputs,
    const std::vector<const RetrievalTrace*>& traces) const {
  std::vector<ReaderResult> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out.push_back(answer(inputs[i], *traces[i]));
  }
  return out;
}

std::string graph_walk_answer(const ReaderInput& /*input*/,
                              const RetrievalTrace& trace,
                              const KnowledgeGraph& kg) {
  if (trace.hops.empty()) return "";
  const HopRecord& last = trace.hops.back();
  std::vector<std::string> reached;
  std::unordered_set<std::string> seen;
  for (TripleId id : last.filtered) {
    const auto [head, tail] = entities_of(kg.triple(id));
    for (const std::string& e : {head, tail}) {
      if (last.entity_set_before.contains(e)) continue;
      if (seen.insert(canonical(e)).second) reached.push_back(e);
    }
  }
  return join(reached, "|");
}

RemoteReader::RemoteReader(Options options) : options_(std::move(options)) {
  if (options_.base_url.empty()) {
    throw ConfigError("remote reader requires a URL");
  }
  if (options_.batch_size == 0) options_.batch_size = 1;
}

namespace {

httplib::Client make_client(const RemoteReader::Options& o) {
  httplib::Client cli(o.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(o.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(o.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());
  if (!o.auth_token.empty()) cli.set_bearer_token_auth(o.auth_token);
  return cli;
}

ReaderResult failure(std::string why) { return {std::nullopt, std::move(why)}; }

}  // namespace

ReaderResult RemoteReader::answer(const ReaderInput& input,
                                  const RetrievalTrace& /*trace*/) const {
  auto cli = make_client(options_);
  const nlohmann::json body = {{"input", input.text}};
  auto res = cli.Post("/answer", body.dump(), "application/json");
  if (!res) return failure("transport: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    return failure("HTTP " + std::to_string(res->status));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    return {j.at("answer").get<std::string>(), {}};
  } catch (const nlohmann::json::exception& e) {
    return failure(std::string("bad response: ") + e.what());
  }
}

std::vector<ReaderResult> RemoteReader::answer_batch(
    const std::vector<ReaderInput>& inputs,
    const std::vector<const RetrievalTrace*>& traces) const {
  if (options_.batch_size <= 1) return Reader::answer_batch(inputs, traces);

  std::vector<ReaderResult> out;
  out.reserve(inputs.size());
  for (std::size_t start = 0; start < inputs.size();
       start += options_.batch_size) {
    const std::size_t end =
        std::min(inputs.size(), start + options_.batch_size);
    nlohmann::json texts = nlohmann::json::array();
    for (std::size_t i = start; i < end; ++i) texts.push_back(inputs[i].text);

    auto fail_all = [&](const std::string& why) {
      for (std::size_t i = start; i < end; ++i) out.push_back(failure(why));
    };
    auto cli = make_client(options_);
    auto res = cli.Post("/answers", nlohmann::json{{"inputs", texts}}.dump(),
                        "application/json");
    if (!res) {
      fail_all("transport: " + httplib::to_string(res.error()));
      continue;
    }
    if (res->status != 200) {
      fail_all("HTTP " + std::to_string(res->status));
      continue;
    }
    try {
      const auto answers = nlohmann::json::parse(res->body).at("answers");
      if (answers.size() != end - start) {
        fail_all("batch response has " + std::to_string(answers.size()) +
                 " answers for " + std::to_string(end - start) + " inputs");
        continue;
      }
      for (const auto& a : answers) {
        if (a.is_string()) {
          out.push_back({a.get<std::string>(), {}});
        } else if (a.is_object() && a.contains("answer") &&
                   a["answer"].is_string()) {
          out.push_back({a["answer"].get<std::string>(), {}});
        } else if (a.is_object() && a.contains("error")) {
          out.push_back(failure(a["error"].dump()));
        } else {
          out.push_back(failure("missing answer"));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      fail_all(std::string("bad response: ") + e.what());
    }
  }
  return out;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace

EvalReport evaluate(const std::vector<QAPair>& pairs,
                    const MultiHopRetriever& retriever, const Reader& reader,
                    const EvalOptions& options,
                    std::vector<RetrievalTrace>* traces) {
  if (pairs.empty()) throw std::invalid_argument("no QA pairs to evaluate");
  const std::size_t n = pairs.size();

  std::vector<RetrievalTrace> local_traces(n);
  std::vector<ReaderInput> inputs(n);
  std::vector<std::string> retrieval_errors(n);
  parallel_for(n, options.jobs, [&](std::size_t i) {
    try {
      local_traces[i] = retriever.retrieve(pairs[i].question, pairs[i].n_hops);
    } catch (const std::exception& e) {
      local_traces[i] = RetrievalTrace{};
      local_traces[i].question = pairs[i].question;
      retrieval_errors[i] = std::string("retrieval: ") + e.what();
    }
    inputs[i] = format_input(pairs[i].question, local_traces[i], retriever.kg());
  });

  std::vector<ReaderResult> results(n);
  if (options.batch_size > 1) {
    for (std::size_t start = 0; start < n; start += options.batch_size) {
      const std::size_t end = std::min(n, start + options.batch_size);
      std::vector<ReaderInput> chunk(inputs.begin() + start,
                                     inputs.begin() + end);
      std::vector<const RetrievalTrace*> chunk_traces;
      for (std::size_t i = start; i < end; ++i) {
        chunk_traces.push_back(&local_traces[i]);
      }
      std::vector<ReaderResult> got;
      try {
        got = reader.answer_batch(chunk, chunk_traces);
      } catch (const std::exception& e) {
        got.assign(end - start, {std::nullopt, e.what()});
      }
      got.resize(end - start, {std::nullopt, "reader returned too few answers"});
      std::move(got.begin(), got.end(), results.begin() + start);
    }
  } else {
    const int jobs = reader.concurrent() ? options.jobs : 1;
    parallel_for(n, jobs, [&](std::size_t i) {
      try {
        results[i] = reader.answer(inputs[i], local_traces[i]);
      } catch (const std::exception& e) {
        results[i] = {std::nullopt, e.what()};
      }
    });
  }

  EvalReport report;
  report.n_items = n;
  report.per_item.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    EvalItem item;
    item.question = pairs[i].question;
    item.golds = pairs[i].gold_answers;
    if (!retrieval_errors[i].empty()) {
      item.flagged = true;
      item.error = retrieval_errors[i];
    } else if (!results[i].answer) {
      item.flagged = true;
      item.error = results[i].error.empty() ? "reader failed" : results[i].error;
    } else {
      item.prediction = *results[i].answer;
      item.score = exact_match(item.prediction, item.golds, options.mode);
    }
    report.n_correct += static_cast<std::size_t>(item.score);
    report.n_flagged += item.flagged ? 1 : 0;
    report.per_item.push_back(std::move(item));
  }
  report.em = static_cast<double>(report.n_correct) / static_cast<double>(n);
  if (traces != nullptr) *traces = std::move(local_traces);
  return report;
}

nlohmann::ordered_json report_to_json(const EvalReport& report,
                                      MatchMode mode) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["summary"] = {{"n_items", report.n_items},
                  {"n_correct", report.n_correct},
                  {"n_flagged", report.n_flagged},
                  {"em", report.em},
                  {"mode", std::string(to_string(mode))}};
  ordered_json items = ordered_json::array();
  for (const EvalItem& it : report.per_item) {
    ordered_json ij;
    ij["question"] = it.question;
    ij["prediction"] = it.prediction;
    ij["golds"] = it.golds;
    ij["score"] = it.score;
    ij["flagged"] = it.flagged;
    if (!it.error.empty()) ij["error"] = it.error;
    items.push_back(std::move(ij));
  }
  j["per_item"] = std::move(items);
  return j;
}

std::string report_summary_line(const EvalReport& report) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "EM: %.4f (%zu/%zu)", report.em,
                report.n_correct, report.n_items);
  return buf;
}

std::vector<QATemplate> load_templates(std::istream& in) {
  std::vector<QATemplate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError("expected relation(s) and template", line_no, line);
    }
    QATemplate t;
    for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
      t.relations.emplace_back(trim(fields[i]));
    }
    t.text = std::string(trim(fields.back()));
    if (t.text.find(kHeadPlaceholder) == std::string::npos) {
      throw ParseError("template lacks [HEAD]", line_no, line);
    }
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

std::string fill_template(std::string_view text, std::string_view head) {
  std::string out;
  const std::string bracketed = "[" + std::string(head) + "]";
  std::size_t pos = 0;
  while (true) {
    const auto hit = text.find(kHeadPlaceholder, pos);
    if (hit == std::string_view::npos) break;
    out.append(text.substr(pos, hit - pos));
    out += bracketed;
    pos = hit + kHeadPlaceholder.size();
  }
  out.append(text.substr(pos));
  return out;
}

// Tails of triples (entity, relation, *), first-seen order, canonical dedup.
std::vector<std::string> objects_of(const KnowledgeGraph& kg,
                                    std::string_view entity,
                                    std::string_view relation) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  const std::string key = canonical(entity);
  for (TripleId id : kg.adjacency(entity)) {
    const Triple& t = kg.triple(id);
    if (t.relation != relation || canonical(t.head) != key) continue;
    if (seen.insert(canonical(t.tail)).second) out.push_back(t.tail);
  }
  return out;
}

}  // namespace

std::vector<QAPair> generate_qa(const KnowledgeGraph& kg,
                                const std::vector<QATemplate>& templates,
                                int n_hops) {
  if (n_hops != 1 && n_hops != 2) {
    throw std::invalid_argument("generate_qa supports 1 or 2 hops");
  }
  std::vector<QAPair> out;
  for (const QATemplate& tpl : templates) {
    if (tpl.text.find(kHeadPlaceholder) == std::string::npos) {
      throw std::invalid_argument("template lacks [HEAD]: " + tpl.text);
    }
    if (static_cast<int>(tpl.relations.size()) != n_hops) {
      throw std::invalid_argument("template \"" + tpl.text + "\" has " +
                                  std::to_string(tpl.relations.size()) +
                                  " relation(s) for a " +
                                  std::to_string(n_hops) + "-hop set");
    }
    std::unordered_set<std::string> heads_done;
    for (const Triple& t : kg.triples()) {
      if (t.relation != tpl.relations[0]) continue;
      if (!heads_done.insert(canonical(t.head)).second) continue;

      std::vector<std::string> golds;
      if (n_hops == 1) {
        golds = objects_of(kg, t.head, tpl.relations[0]);
      } else {
        std::unordered_set<std::string> seen;
        for (const auto& mid : objects_of(kg, t.head, tpl.relations[0])) {
          for (auto& z : objects_of(kg, mid, tpl.relations[1])) {
            if (seen.insert(canonical(z)).second) golds.push_back(std::move(z));
          }
        }
      }
      if (golds.empty()) continue;
      out.push_back({fill_template(tpl.text, t.head), std::move(golds), n_hops,
                     out.size() + 1});
    }
  }
  return out;
}

}  // namespace triplehop
