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
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "synthetic.hpp"
#include "triplehop/kg_store.hpp"

namespace fs = std::filesystem;
using namespace triplehop;

namespace {

KnowledgeGraph parse(const std::string& text,
                     TripleFormat format = TripleFormat::kPipe) {
  std::istringstream in(text);
  return parse_triples(in, format);
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("triplehop_kg_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("parse_triples reads pipe lines") {
  auto kg = parse("Ginger Rogers | starred_actors | Primrose Path\n");
  REQUIRE(kg.size() == 1);
  const Triple& t = kg.triple(0);
  CHECK(t.id == 0);
  CHECK(t.head == "Ginger Rogers");
  CHECK(t.relation == "starred_actors");
  CHECK(t.tail == "Primrose Path");

  kg = parse(
      "AccidentNumber_LAX05LA060 | hasConditionsAtAccidentSite | Visual "
      "Conditions\n");
  CHECK(kg.triple(0).tail == "Visual Conditions");
}

TEST_CASE("parse_triples reports the malformed line") {
  try {
    parse("X | r | Y\n\nA | B\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.raw() == "A | B");
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("A | r | B | C\n"), ParseError);
  CHECK_THROWS_AS(parse("A |  | B\n"), ParseError);
}

TEST_CASE("parse_triples rejects an empty graph") {
  CHECK_THROWS_WITH_AS(parse(""), "empty knowledge graph", ParseError);
  CHECK_THROWS_WITH_AS(parse("\n# only a comment\n   \n"),
                       "empty knowledge graph", ParseError);
}

TEST_CASE("parse_triples skips comments, keeps duplicates, reads tabs") {
  auto kg = parse("# header\nA | r | B\n\nA | r | B\n  C|s|D  \n");
  REQUIRE(kg.size() == 3);
  CHECK(kg.triple(0).head == kg.triple(1).head);
  CHECK(kg.triple(1).id == 1);
  CHECK(kg.triple(2) == Triple{2, "C", "s", "D"});
  CHECK(kg.adjacency("a").size() == 2);

  kg = parse("New York\tlocated_in\tUSA\n", TripleFormat::kTab);
  CHECK(kg.triple(0).head == "New York");
  CHECK_THROWS_AS(parse("A | r | B\n", TripleFormat::kTab), ParseError);
}

TEST_CASE("humanize_relation and verbalize") {
  CHECK(humanize_relation("starred_actors") == "starred actors");
  CHECK(humanize_relation("hasConditionsAtAccidentSite") ==
        "has conditions at accident site");
  CHECK(humanize_relation("r") == "r");
  CHECK(humanize_relation("__odd__Name_") == "odd name");

  CHECK(verbalize({0, "Ginger Rogers", "starred_actors", "Primrose Path"}).text ==
        "Ginger Rogers starred actors Primrose Path");
  CHECK(verbalize({4, "AccidentNumber_LAX05LA060", "hasConditionsAtAccidentSite",
                   "Visual Conditions"})
            .text ==
        "AccidentNumber_LAX05LA060 has conditions at accident site Visual "
        "Conditions");
  const auto v = verbalize({7, "A", "r", "B"});
  CHECK(v.text == "A r B");
  CHECK(v.triple_id == 7);
}

TEST_CASE("entities_of returns head and tail") {
  CHECK(entities_of({0, "Ginger Rogers", "starred_actors", "Primrose Path"}) ==
        std::pair<std::string, std::string>{"Ginger Rogers", "Primrose Path"});
  CHECK(entities_of({0, "A", "r", "A"}) ==
        std::pair<std::string, std::string>{"A", "A"});
  CHECK(entities_of({0, "X", "r", "Y"}).second == "Y");
}

TEST_CASE("adjacency_lookup") {
  auto kg = parse("Ginger Rogers | starred_actors | Primrose Path\n");
  CHECK(adjacency_lookup(kg, "ginger rogers") == std::vector<TripleId>{0});
  CHECK(adjacency_lookup(kg, "  GINGER ROGERS ") == std::vector<TripleId>{0});
  CHECK(adjacency_lookup(kg, "NoSuchEntity").empty());
  CHECK(adjacency_lookup(kg, "starred_actors").empty());

  kg = parse("A | r | B\nB | s | C\n");
  CHECK(adjacency_lookup(kg, "B") == std::vector<TripleId>{0, 1});

  kg = parse("A | r | A\n");
  CHECK(adjacency_lookup(kg, "a") == std::vector<TripleId>{0});
  CHECK(kg.display_form("a") == "A");
}

TEST_CASE("add validates fields") {
  KnowledgeGraph kg;
  CHECK_THROWS_AS(kg.add(" ", "r", "B"), std::invalid_argument);
  CHECK(kg.add(" A ", " r ", " B ") == 0);
  CHECK(kg.triple(0).head == "A");
  CHECK(kg.entities() == std::set<std::string>{"A", "B"});
  CHECK(kg.relation_count() == 1);
}

TEST_CASE("every triple is indexed under its head and tail") {
  const auto kg = testing::random_kg(800, 120, 7, 3);
  for (const Triple& t : kg.triples()) {
    for (const auto& e : {t.head, t.tail}) {
      const auto ids = adjacency_lookup(kg, e);
      CHECK(std::binary_search(ids.begin(), ids.end(), t.id));
      CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
      CHECK(kg.entities().count(e) == 1);
    }
  }
}

TEST_CASE("serialized graph round-trips") {
  auto kg = testing::random_kg(300, 60, 5, 11);
  kg.add("Visual Conditions", "hasConditionsAtAccidentSite", "Ginger Rogers");
  kg.add("Visual Conditions", "hasConditionsAtAccidentSite", "Ginger Rogers");
  const auto dir = scratch_dir("roundtrip");
  const KgMeta meta = save_kg(kg, dir, std::string("fnv1a64:abc"));
  CHECK(meta.triples == kg.size());
  CHECK(meta.entities == kg.entities().size());
  CHECK(meta.source_hash == "fnv1a64:abc");

  const auto back = load_kg(dir);
  CHECK(back == kg);
  CHECK(load_kg_any(dir) == kg);
  CHECK(load_kg_any(dir / "triples.tsv") == kg);

  // Same graph, same bytes.
  const auto dir2 = scratch_dir("roundtrip2");
  save_kg(back, dir2, std::string("fnv1a64:abc"));
  CHECK(file_hash(dir / "triples.tsv") == file_hash(dir2 / "triples.tsv"));
  CHECK(file_hash(dir / "meta.json") == file_hash(dir2 / "meta.json"));

  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("load_kg checks meta.json") {
  const auto dir = scratch_dir("meta");
  save_kg(parse("A | r | B\nB | s | C\n"), dir);
  {
    std::ofstream trunc(dir / "triples.tsv");
    trunc << "A\tr\tB\n";
  }
  CHECK_THROWS_AS(load_kg(dir), ParseError);
  fs::remove(dir / "meta.json");
  CHECK_THROWS_AS(load_kg(dir), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("verbalize is pure") {
  std::mt19937_64 rng(5);
  const auto kg = testing::random_kg(1000, 200, 13, 9);
  for (int i = 0; i < 1000; ++i) {
    const Triple& t = kg.triple(rng() % kg.size());
    const std::string first = verbalize(t).text;
    CHECK(verbalize(t).text == first);
    CHECK(first.find(t.head) == 0);
    CHECK(first.rfind(t.tail) == first.size() - t.tail.size());
  }
}
