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

#include "triplehop/infusion_corpus.hpp"

#include <algorithm>
#include <istream>
#include <random>
#include <stdexcept>

namespace triplehop {

std::string_view to_string(ExampleOrigin origin) {
  return origin == ExampleOrigin::kTriple ? "triple" : "text";
}

std::string sentinel(std::size_t index) {
  return "<extra_" + std::to_string(index) + ">";
}

std::string reconstruct(const MaskedExample& example) {
  std::string out = example.input;
  std::string_view target = example.target;
  for (std::size_t i = 0; !target.empty(); ++i) {
    const std::string mark = sentinel(i);
    if (target.rfind(mark + " ", 0) != 0) {
      throw std::invalid_argument("target does not start with " + mark);
    }
    target.remove_prefix(mark.size() + 1);
    const std::string next = " " + sentinel(i + 1) + " ";
    const auto stop = target.find(next);
    const std::string_view span = target.substr(0, stop);
    target = stop == std::string_view::npos ? std::string_view{}
                                            : target.substr(stop + 1);

    const auto at = out.find(mark);
    if (at == std::string::npos) {
      throw std::invalid_argument("input lacks " + mark);
    }
    out.replace(at, mark.size(), span);
  }
  return out;
}

namespace {

MaskedExample mask_span(std::string_view line, std::size_t begin,
                        std::size_t end, ExampleOrigin origin) {
  const std::string mark = sentinel(0);
  MaskedExample ex;
  ex.origin = origin;
  ex.input.reserve(line.size() + mark.size());
  ex.input.append(line.substr(0, begin));
  ex.input += mark;
  ex.input.append(line.substr(end));
  ex.target = mark + " ";
  ex.target.append(line.substr(begin, end - begin));
  return ex;
}

std::optional<MaskedExample> pick_span(std::string_view line,
                                       const std::vector<Span>& spans,
                                       std::uint64_t seed) {
  if (spans.empty()) return std::nullopt;
  std::mt19937_64 rng(seed);
  const Span& s = spans[rng() % spans.size()];
  return mask_span(line, s.first, s.second, ExampleOrigin::kText);
}

std::vector<Span> vocabulary_spans(std::string_view line,
                                   const EntityLexicon& vocab) {
  std::vector<Span> spans;
  for (const EntityMatch& m : vocab.scan(line)) spans.emplace_back(m.begin, m.end);
  return spans;
}

std::vector<Span> checked_spans(std::string_view line,
                                const std::vector<Span>& spans) {
  std::vector<Span> out;
  for (const Span& s : spans) {
    if (s.first < s.second && s.second <= line.size()) out.push_back(s);
  }
  return out;
}

}  // namespace

MaskedExample mask_triple(const VerbalizedTriple& v, const Triple& t,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const bool mask_head = (rng() >> 63) == 0;
  const std::string& span = mask_head ? t.head : t.tail;
  const std::size_t at = mask_head ? v.text.find(span) : v.text.rfind(span);
  if (at == std::string::npos) {
    throw std::logic_error("verbalization \"" + v.text + "\" lacks \"" + span +
                           "\"");
  }
  return mask_span(v.text, at, at + span.size(), ExampleOrigin::kTriple);
}

std::optional<MaskedExample> mask_text(std::string_view line,
                                       const EntityLexicon& vocab,
                                       std::uint64_t seed) {
  return pick_span(line, vocabulary_spans(line, vocab), seed);
}

std::optional<MaskedExample> mask_text_spans(std::string_view line,
                                             const std::vector<Span>& spans,
                                             std::uint64_t seed) {
  return pick_span(line, checked_spans(line, spans), seed);
}

std::map<std::size_t, std::vector<Span>> load_span_annotations(
    std::istream& in) {
  std::map<std::size_t, std::vector<Span>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      auto& spans = out[j.at("line_number").get<std::size_t>()];
      for (const auto& s : j.at("spans")) {
        spans.emplace_back(s.at(0).get<std::size_t>(),
                           s.at(1).get<std::size_t>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), line_no, line);
    }
  }
  return out;
}

nlohmann::ordered_json stats_to_json(const CorpusStats& s) {
  return {{"triple_examples", s.triple_examples},
          {"text_examples", s.text_examples},
          {"text_lines", s.text_lines},
          {"text_lines_skipped", s.text_lines_skipped},
          {"text_resampled", s.text_resampled},
          {"head_masked", s.head_masked}};
}

nlohmann::ordered_json example_to_json(const MaskedExample& e) {
  return {{"input", e.input},
          {"target", e.target},
          {"origin", std::string(to_string(e.origin))}};
}

CorpusOutput mix_corpus(
    const KnowledgeGraph& kg, const std::vector<std::string>& text_lines,
    std::uint64_t seed,
    const std::map<std::size_t, std::vector<Span>>* annotations) {
  const std::uint64_t triple_stream = mix_seed(seed, 1);
  const std::uint64_t text_stream = mix_seed(seed, 2);
  std::mt19937_64 order_rng(mix_seed(seed, 3));
  std::mt19937_64 draw_rng(mix_seed(seed, 4));

  CorpusOutput out;
  CorpusStats& stats = out.stats;
  stats.text_lines = text_lines.size();

  const EntityLexicon vocab(kg);
  std::vector<std::vector<Span>> line_spans(text_lines.size());
  std::vector<std::size_t> maskable;
  for (std::size_t i = 0; i < text_lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (annotations != nullptr && annotations->count(line_no) > 0) {
      line_spans[i] = checked_spans(text_lines[i], annotations->at(line_no));
    } else {
      line_spans[i] = vocabulary_spans(text_lines[i], vocab);
    }
    if (line_spans[i].empty()) {
      ++stats.text_lines_skipped;
    } else {
      maskable.push_back(i);
    }
  }
  if (maskable.empty()) {
    throw std::runtime_error("no maskable text lines for the corpus mix");
  }

  const std::size_t n = kg.size();
  std::vector<MaskedExample> triple_examples;
  triple_examples.reserve(n);
  for (const Triple& t : kg.triples()) {
    auto ex = mask_triple(verbalize(t), t, mix_seed(triple_stream, t.id));
    if (ex.input.rfind(sentinel(0), 0) == 0) ++stats.head_masked;
    triple_examples.push_back(std::move(ex));
  }

  std::vector<std::size_t> draws = maskable;
  std::shuffle(draws.begin(), draws.end(), draw_rng);
  if (draws.size() > n) draws.resize(n);
  while (draws.size() < n) {
    draws.push_back(maskable[draw_rng() % maskable.size()]);
    ++stats.text_resampled;
  }
  std::vector<MaskedExample> text_examples;
  text_examples.reserve(n);
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t line = draws[d];
    text_examples.push_back(*pick_span(text_lines[line], line_spans[line],
                                       mix_seed(text_stream, d)));
  }

  std::vector<ExampleOrigin> order(n, ExampleOrigin::kTriple);
  order.resize(2 * n, ExampleOrigin::kText);
  std::shuffle(order.begin(), order.end(), order_rng);

  out.examples.reserve(2 * n);
  std::size_t ti = 0;
  std::size_t xi = 0;
  for (ExampleOrigin o : order) {
    if (o == ExampleOrigin::kTriple) {
      out.examples.push_back(std::move(triple_examples[ti++]));
    } else {
      out.examples.push_back(std::move(text_examples[xi++]));
    }
  }
  stats.triple_examples = ti;
  stats.text_examples = xi;
  return out;
}

}  // namespace triplehop
