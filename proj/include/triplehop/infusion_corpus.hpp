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

#ifndef TRIPLEHOP_INFUSION_CORPUS_HPP_
#define TRIPLEHOP_INFUSION_CORPUS_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "triplehop/entity_matcher.hpp"
#include "triplehop/kg_store.hpp"

namespace triplehop {

enum class ExampleOrigin { kTriple, kText };

std::string_view to_string(ExampleOrigin origin);

// One salient-span-masked pretraining line. `input` holds sentinels
// <extra_0>, <extra_1>, ...; `target` lists "<extra_i> span" pairs in the
// same order.
struct MaskedExample {
  std::string input;
  std::string target;
  ExampleOrigin origin = ExampleOrigin::kText;

  friend bool operator==(const MaskedExample&, const MaskedExample&) = default;
};

std::string sentinel(std::size_t index);

// Puts every masked span back into `input`. Throws std::invalid_argument if
// the target does not name the input's sentinels in order.
std::string reconstruct(const MaskedExample& example);

// Masks the head or the tail (seeded fair coin) of a verbalized triple.
MaskedExample mask_triple(const VerbalizedTriple& v, const Triple& t,
                          std::uint64_t seed);

using Span = std::pair<std::size_t, std::size_t>;  // [begin, end) bytes

// Masks one seeded-random vocabulary occurrence (longest match,
// non-overlapping, word boundaries). nullopt when the line has none.
std::optional<MaskedExample> mask_text(std::string_view line,
                                       const EntityLexicon& vocab,
                                       std::uint64_t seed);

// Same, choosing among caller-supplied spans instead of vocabulary hits.
std::optional<MaskedExample> mask_text_spans(std::string_view line,
                                             const std::vector<Span>& spans,
                                             std::uint64_t seed);

// Reads JSON-lines {"line_number": n, "spans": [[b, e], ...]}; line numbers
// are 1-based positions in the text stream.
std::map<std::size_t, std::vector<Span>> load_span_annotations(std::istream& in);

struct CorpusStats {
  std::size_t triple_examples = 0;
  std::size_t text_examples = 0;
  std::size_t text_lines = 0;
  std::size_t text_lines_skipped = 0;  // no maskable span
  std::size_t text_resampled = 0;      // drawn with replacement
  std::size_t head_masked = 0;
};

nlohmann::ordered_json stats_to_json(const CorpusStats& stats);

struct CorpusOutput {
  std::vector<MaskedExample> examples;
  CorpusStats stats;
};

// One triple example per triple plus as many text examples, drawn from the
// maskable lines without replacement until they run out and with
// replacement after that, interleaved by a seeded shuffle.
CorpusOutput mix_corpus(const KnowledgeGraph& kg,
                        const std::vector<std::string>& text_lines,
                        std::uint64_t seed,
                        const std::map<std::size_t, std::vector<Span>>*
                            annotations = nullptr);

nlohmann::ordered_json example_to_json(const MaskedExample& example);

}  // namespace triplehop

#endif  // TRIPLEHOP_INFUSION_CORPUS_HPP_
