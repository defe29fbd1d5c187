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

#include "triplehop/kg_store.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace triplehop {

TripleId KnowledgeGraph::add(std::string_view head, std::string_view relation,
                             std::string_view tail) {
  head = trim(head);
  relation = trim(relation);
  tail = trim(tail);
  if (head.empty() || relation.empty() || tail.empty()) {
    throw std::invalid_argument("triple has an empty field");
  }
  const auto id = static_cast<TripleId>(triples_.size());
  triples_.push_back(
      {id, std::string(head), std::string(relation), std::string(tail)});

  for (std::string_view entity : {head, tail}) {
    entities_.emplace(entity);
    std::string key = to_lower(entity);
    auto& ids = adjacency_[key];
    if (ids.empty() || ids.back() != id) ids.push_back(id);
    display_.try_emplace(std::move(key), entity);
  }
  relations_.emplace(relation);
  return id;
}

std::span<const TripleId> KnowledgeGraph::adjacency(
    std::string_view entity) const {
  auto it = adjacency_.find(canonical(entity));
  if (it == adjacency_.end()) return {};
  return it->second;
}

std::optional<std::string> KnowledgeGraph::display_form(
    std::string_view entity) const {
  auto it = display_.find(canonical(entity));
  if (it == display_.end()) return std::nullopt;
  return it->second;
}

KnowledgeGraph parse_triples(std::istream& in, TripleFormat format) {
  const char delim = format == TripleFormat::kPipe ? '|' : '\t';
  KnowledgeGraph kg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view content = trim(line);
    if (content.empty() || content.front() == '#') continue;

    auto fields = split(line, delim);
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields, found " +
                           std::to_string(fields.size()),
                       line_no, line);
    }
    try {
      kg.add(fields[0], fields[1], fields[2]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no, line);
    }
  }
  if (kg.empty()) throw ParseError("empty knowledge graph");
  return kg;
}

std::string humanize_relation(std::string_view relation) {
  std::string spaced;
  spaced.reserve(relation.size() + 8);
  for (std::size_t i = 0; i < relation.size(); ++i) {
    const unsigned char c = relation[i];
    if (c == '_') {
      spaced.push_back(' ');
      continue;
    }
    if (i > 0 && std::isupper(c) &&
        std::islower(static_cast<unsigned char>(relation[i - 1]))) {
      spaced.push_back(' ');
    }
    spaced.push_back(static_cast<char>(std::tolower(c)));
  }

  std::string out;
  std::istringstream words(spaced);
  std::string word;
  while (words >> word) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

VerbalizedTriple verbalize(const Triple& t) {
  std::string text = t.head;
  const std::string rel = humanize_relation(t.relation);
  if (!rel.empty()) {
    text.push_back(' ');
    text += rel;
  }
  text.push_back(' ');
  text += t.tail;
  return {t.id, std::move(text)};
}

std::vector<TripleId> adjacency_lookup(const KnowledgeGraph& kg,
                                       std::string_view entity) {
  auto ids = kg.adjacency(entity);
  return {ids.begin(), ids.end()};
}

namespace {

void check_serializable(std::string_view field) {
  if (field.find_first_of("\t\n\r") != std::string_view::npos) {
    throw std::invalid_argument("field contains a tab or newline: " +
                                std::string(field));
  }
}

}  // namespace

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return "fnv1a64:" + hex64(fnv1a64(buf.str()));
}

KgMeta save_kg(const KnowledgeGraph& kg, const std::filesystem::path& dir,
               std::optional<std::string> source_hash) {
  std::filesystem::create_directories(dir);
  std::string body;
  for (const Triple& t : kg.triples()) {
    check_serializable(t.head);
    check_serializable(t.relation);
    check_serializable(t.tail);
    body += t.head + '\t' + t.relation + '\t' + t.tail + '\n';
  }
  {
    std::ofstream out(dir / "triples.tsv", std::ios::binary);
    out << body;
    if (!out) throw std::runtime_error("cannot write " + dir.string());
  }

  KgMeta meta{kg.size(), kg.entities().size(), kg.relation_count(),
              source_hash.value_or("fnv1a64:" + hex64(fnv1a64(body)))};
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["triples"] = meta.triples;
  j["entities"] = meta.entities;
  j["relations"] = meta.relations;
  j["source_hash"] = meta.source_hash;
  j["triples_hash"] = "fnv1a64:" + hex64(fnv1a64(body));
  std::ofstream out(dir / "meta.json");
  out << j.dump(2) << '\n';
  return meta;
}

KnowledgeGraph load_kg(const std::filesystem::path& dir) {
  std::ifstream meta_in(dir / "meta.json");
  if (!meta_in) throw ParseError("missing meta.json in " + dir.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad meta.json: ") + e.what());
  }

  std::ifstream in(dir / "triples.tsv", std::ios::binary);
  if (!in) throw ParseError("missing triples.tsv in " + dir.string());
  KnowledgeGraph kg = parse_triples(in, TripleFormat::kTab);
  if (meta.value("triples", std::size_t{0}) != kg.size()) {
    throw ParseError("triples.tsv does not match meta.json triple count");
  }
  return kg;
}

KnowledgeGraph load_kg_any(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return load_kg(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  const auto format =
      path.extension() == ".tsv" ? TripleFormat::kTab : TripleFormat::kPipe;
  return parse_triples(in, format);
}

}  // namespace triplehop
