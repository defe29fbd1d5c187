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

#ifndef TRIPLEHOP_COMMON_HPP_
#define TRIPLEHOP_COMMON_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace triplehop {

using TripleId = std::uint32_t;

// Input that does not follow a documented file format. Carries the 1-based
// line number and the offending raw line when one exists.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0,
             std::string raw = {})
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " +
                                           what + " [" + raw + "]"),
        line_(line),
        raw_(std::move(raw)) {}

  std::size_t line() const { return line_; }
  const std::string& raw() const { return raw_; }

 private:
  std::size_t line_;
  std::string raw_;
};

// Inconsistent configuration: wrong embedder for an index, zero dimension,
// missing reader URL and so on.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 64-bit FNV-1a. Used wherever a hash has to be stable across runs and
// platforms (file checksums, embedding buckets, text keys).
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value);

// splitmix64 finalizer; derives independent per-item seeds from a run seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Lowercased, trimmed form used for every entity comparison.
inline std::string canonical(std::string_view s) { return to_lower(trim(s)); }

std::vector<std::string_view> split(std::string_view s, char delim);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Word characters are ASCII alphanumerics and every byte of a multi-byte
// UTF-8 sequence; everything else (ASCII whitespace and punctuation)
// separates words.
constexpr bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

struct WordSpan {
  std::size_t begin;
  std::size_t end;
};

std::vector<WordSpan> word_spans(std::string_view text);

// Lowercased words of `text`, in order.
std::vector<std::string> tokenize_words(std::string_view text);

}  // namespace triplehop

#endif  // TRIPLEHOP_COMMON_HPP_
