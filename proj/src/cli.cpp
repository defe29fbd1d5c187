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

#include "triplehop/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "triplehop/embedder.hpp"
#include "triplehop/infusion_corpus.hpp"
#include "triplehop/kg_store.hpp"
#include "triplehop/multihop.hpp"
#include "triplehop/qa_harness.hpp"
#include "triplehop/triple_index.hpp"

namespace triplehop {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void require_file(const fs::path& p, const char* key) {
  if (p.empty()) throw ConfigError(std::string("missing required key '") + key + "'");
  if (!fs::exists(p)) {
    throw ConfigError(std::string(key) + " path does not exist: " + p.string());
  }
}

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["kg"] = c.kg.string();
  j["kg_format"] = c.kg_format;
  j["qa"] = c.qa.string();
  j["templates"] = c.templates.string();
  j["text"] = c.text.string();
  j["spans"] = c.spans.string();
  j["index"] = c.index.string();
  j["out"] = c.out.string();
  j["question"] = c.question;
  j["hops"] = c.hops;
  j["k"] = c.k;
  j["k_single"] = c.k_single;
  j["k_base"] = c.k_base;
  j["embedder"] = c.embedder;
  j["reader"] = c.reader;
  j["reader_url"] = c.reader_url;
  j["batch_size"] = c.batch_size;
  j["eval_mode"] = c.eval_mode;
  j["entity_set_mode"] = c.entity_set_mode;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  return j;
}

// Timestamps stay out of the artifacts and go to this sidecar log.
void log_run(const RunConfig& c, const std::string& command) {
  fs::create_directories(c.out);
  std::ofstream log(c.out / "run.log", std::ios::app);
  const auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  log << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << command << '\n';
}

void write_manifest(const RunConfig& c, const std::string& command,
                    const std::vector<std::string>& artifacts) {
  const fs::path path = c.out / "manifest.json";
  ordered_json manifest;
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      manifest = ordered_json::parse(in);
    } catch (const nlohmann::json::exception&) {
      manifest = ordered_json::object();
    }
  }
  ordered_json entry;
  entry["config"] = config_to_json(c);
  ordered_json files = ordered_json::array();
  for (const auto& name : artifacts) {
    files.push_back({{"path", name}, {"hash", file_hash(c.out / name)}});
  }
  entry["artifacts"] = std::move(files);
  manifest["commands"][command] = std::move(entry);
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
}

KnowledgeGraph load_graph(const RunConfig& c) {
  require_file(c.kg, "kg");
  if (c.kg_format == "auto") return load_kg_any(c.kg);
  std::ifstream in(c.kg, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + c.kg.string());
  if (c.kg_format == "pipe") return parse_triples(in, TripleFormat::kPipe);
  if (c.kg_format == "tab") return parse_triples(in, TripleFormat::kTab);
  throw ConfigError("kg_format must be auto, pipe or tab");
}

fs::path index_path(const RunConfig& c) {
  return c.index.empty() ? c.out / "index.bin" : c.index;
}

TripleIndex load_or_build_index(const RunConfig& c, const KnowledgeGraph& kg,
                                const Embedder& emb) {
  const fs::path p = index_path(c);
  if (fs::exists(p)) return TripleIndex::load(p);
  if (!c.index.empty()) throw ConfigError("index not found: " + p.string());
  return build_index(kg, emb, c.jobs);
}

RetrieverConfig retriever_config(const RunConfig& c) {
  RetrieverConfig rc;
  rc.schedule.single_hop_k = c.k_single;
  rc.schedule.base_k = c.k_base;
  rc.schedule.overrides = c.k;
  rc.entity_set_mode = parse_entity_set_mode(c.entity_set_mode);
  return rc;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

void validate(const RunConfig& c, const std::string& command) {
  if (c.hops < 1) throw ConfigError("hops must be >= 1");
  if (c.k_single < 1 || c.k_base < 1) throw ConfigError("k values must be >= 1");
  for (int k : c.k) {
    if (k < 1) throw ConfigError("k overrides must be >= 1");
  }
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (c.reader != "builtin" && c.reader != "remote") {
    throw ConfigError("reader must be builtin or remote");
  }
  if (c.reader == "remote" && c.reader_url.empty()) {
    throw ConfigError("remote reader requires reader_url");
  }
  parse_match_mode(c.eval_mode);
  parse_entity_set_mode(c.entity_set_mode);

  if (command != "generate-qa" || !c.kg.empty()) require_file(c.kg, "kg");
  if (command == "evaluate") require_file(c.qa, "qa");
  if (command == "generate-qa") {
    require_file(c.templates, "templates");
    if (c.hops > 2) throw ConfigError("generate-qa supports hops 1 or 2");
  }
  if (command == "build-corpus") require_file(c.text, "text");
  if (command == "retrieve" && c.question.empty()) {
    throw ConfigError("retrieve needs a question");
  }
  if (!c.spans.empty()) require_file(c.spans, "spans");
  if (!c.index.empty() && command != "index") require_file(c.index, "index");
}

int cmd_ingest(const RunConfig& c, std::ostream& out) {
  validate(c, "ingest");
  const KnowledgeGraph kg = load_graph(c);
  const std::string source =
      fs::is_directory(c.kg) ? file_hash(c.kg / "triples.tsv") : file_hash(c.kg);
  const KgMeta meta = save_kg(kg, c.out / "kg", source);
  out << "triples: " << meta.triples << '\n'
      << "entities: " << meta.entities << '\n'
      << "relations: " << meta.relations << '\n';
  write_manifest(c, "ingest", {"kg/triples.tsv", "kg/meta.json"});
  log_run(c, "ingest");
  return 0;
}

int cmd_index(const RunConfig& c, std::ostream& out) {
  validate(c, "index");
  const KnowledgeGraph kg = load_graph(c);
  const auto emb = make_embedder(c.embedder, &kg);
  const TripleIndex index = build_index(kg, *emb, c.jobs);
  const fs::path p = index_path(c);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::create_directories(c.out);
  index.save(p);
  out << "entries: " << index.size() << '\n'
      << "tokens: " << index.token_count() << '\n'
      << "embedder: " << index.embedder_name() << '\n'
      << "index: " << p.string() << '\n';
  if (c.index.empty()) write_manifest(c, "index", {"index.bin"});
  log_run(c, "index");
  return 0;
}

int cmd_retrieve(const RunConfig& c, std::ostream& out) {
  validate(c, "retrieve");
  const KnowledgeGraph kg = load_graph(c);
  const auto emb = make_embedder(c.embedder, &kg);
  const TripleIndex index = load_or_build_index(c, kg, *emb);
  const MultiHopRetriever retriever(kg, index, *emb, retriever_config(c));
  const RetrievalTrace trace = retriever.retrieve(c.question, c.hops);
  ordered_json j = trace_to_json(trace);
  j["reader_input"] = format_input(c.question, trace, kg).text;
  out << j.dump(2) << '\n';
  return 0;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  validate(c, "evaluate");
  const KnowledgeGraph kg = load_graph(c);
  const auto emb = make_embedder(c.embedder, &kg);
  const TripleIndex index = load_or_build_index(c, kg, *emb);
  const MultiHopRetriever retriever(kg, index, *emb, retriever_config(c));

  const auto pairs = load_qa_file(c.qa, c.hops, /*expand=*/false);
  if (pairs.empty()) throw ConfigError("empty QA dataset: " + c.qa.string());

  std::unique_ptr<Reader> reader;
  if (c.reader == "remote") {
    RemoteReader::Options opts;
    opts.base_url = c.reader_url;
    opts.batch_size = c.batch_size;
    if (const char* token = std::getenv(kReaderTokenEnv)) opts.auth_token = token;
    reader = std::make_unique<RemoteReader>(opts);
  } else {
    reader = std::make_unique<GraphWalkReader>(kg);
  }

  EvalOptions options;
  options.mode = parse_match_mode(c.eval_mode);
  options.jobs = c.jobs;
  options.batch_size = c.batch_size;
  std::vector<RetrievalTrace> traces;
  const EvalReport report = evaluate(pairs, retriever, *reader, options, &traces);

  fs::create_directories(c.out);
  {
    std::ofstream f(c.out / "report.json");
    f << report_to_json(report, options.mode).dump(2) << '\n';
  }
  {
    std::ofstream f(c.out / "report.txt");
    f << report_summary_line(report) << '\n';
  }
  {
    std::ofstream f(c.out / "traces.jsonl");
    for (const auto& t : traces) f << trace_to_json(t).dump() << '\n';
  }
  out << report_summary_line(report) << '\n';
  if (report.n_flagged > 0) {
    out << "flagged: " << report.n_flagged << " item(s) failed in the reader\n";
  }
  write_manifest(c, "evaluate", {"report.json", "report.txt", "traces.jsonl"});
  log_run(c, "evaluate");
  return 0;
}

int cmd_build_corpus(const RunConfig& c, std::ostream& out) {
  validate(c, "build-corpus");
  const KnowledgeGraph kg = load_graph(c);
  const auto lines = read_lines(c.text);
  std::map<std::size_t, std::vector<Span>> annotations;
  if (!c.spans.empty()) {
    std::ifstream in(c.spans);
    annotations = load_span_annotations(in);
  }
  const CorpusOutput corpus =
      mix_corpus(kg, lines, c.seed, c.spans.empty() ? nullptr : &annotations);

  fs::create_directories(c.out);
  {
    std::ofstream f(c.out / "corpus.jsonl", std::ios::binary);
    for (const auto& e : corpus.examples) f << example_to_json(e).dump() << '\n';
  }
  const auto stats = stats_to_json(corpus.stats);
  {
    std::ofstream f(c.out / "corpus_stats.json");
    f << stats.dump(2) << '\n';
  }
  out << stats.dump(2) << '\n';
  write_manifest(c, "build-corpus", {"corpus.jsonl", "corpus_stats.json"});
  log_run(c, "build-corpus");
  return 0;
}

int cmd_generate_qa(const RunConfig& c, std::ostream& out) {
  validate(c, "generate-qa");
  const KnowledgeGraph kg = load_graph(c);
  std::ifstream tin(c.templates);
  const auto all = load_templates(tin);
  std::vector<QATemplate> templates;
  for (const auto& t : all) {
    if (static_cast<int>(t.relations.size()) == c.hops) templates.push_back(t);
  }
  const auto pairs = generate_qa(kg, templates, c.hops);

  fs::create_directories(c.out);
  const std::string name = "qa_" + std::to_string(c.hops) + "hop.tsv";
  {
    std::ofstream f(c.out / name);
    write_qa(f, pairs);
  }
  out << "questions: " << pairs.size() << '\n' << "file: " << (c.out / name).string() << '\n';
  write_manifest(c, "generate-qa", {name});
  log_run(c, "generate-qa");
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  RunConfig c;
  CLI::App app{"Knowledge-graph triple retrieval and multi-hop QA pipeline",
               "triplehop"};
  app.fallthrough();
  app.set_config("--config", "", "Read key = value settings from this file");

  app.add_option("--kg", c.kg, "Triple file or serialized KG directory");
  app.add_option("--kg_format", c.kg_format, "auto | pipe | tab");
  app.add_option("--qa", c.qa, "QA file: question<TAB>a1|a2|...");
  app.add_option("--templates", c.templates, "Question templates");
  app.add_option("--text", c.text, "Corpus text, one line per example");
  app.add_option("--spans", c.spans, "Span annotations (JSON-lines)");
  app.add_option("--index", c.index, "Index file (default <out>/index.bin)");
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--question", c.question, "Question for retrieve");
  app.add_option("--hops", c.hops, "Number of hops");
  app.add_option("--k", c.k, "Per-hop k overrides");
  app.add_option("--k_single", c.k_single, "k for single-hop questions");
  app.add_option("--k_base", c.k_base, "Base k for multi-hop questions");
  app.add_option("--embedder", c.embedder,
                 "builtin | builtin:<d> | precomputed:<file> | oracle");
  app.add_option("--reader", c.reader, "builtin | remote");
  app.add_option("--reader_url", c.reader_url, "Remote reader base URL");
  app.add_option("--batch_size", c.batch_size, "Reader batch size");
  app.add_option("--eval_mode", c.eval_mode, "strict | containment");
  app.add_option("--entity_set_mode", c.entity_set_mode, "replace | accumulate");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--jobs", c.jobs, "Worker threads");

  std::string command;
  const std::pair<const char*, const char*> commands[] = {
      {"ingest", "Parse a triple file into <out>/kg"},
      {"index", "Embed every triple into <out>/index.bin"},
      {"retrieve", "Print the multi-hop retrieval trace for one question"},
      {"evaluate", "Answer a QA file and report exact match"},
      {"build-corpus", "Write the masked infusion corpus"},
      {"generate-qa", "Instantiate question templates over the graph"}};
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->callback(
        [&command, name = name] { command = name; });
  }
  app.get_subcommand("retrieve")->add_option("question", c.question,
                                             "Question text");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (command == "ingest") return cmd_ingest(c, out);
    if (command == "index") return cmd_index(c, out);
    if (command == "retrieve") return cmd_retrieve(c, out);
    if (command == "evaluate") return cmd_evaluate(c, out);
    if (command == "build-corpus") return cmd_build_corpus(c, out);
    if (command == "generate-qa") return cmd_generate_qa(c, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace triplehop
