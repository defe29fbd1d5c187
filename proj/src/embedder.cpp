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

#include "triplehop/embedder.hpp"

#include <fstream>
#include <istream>

#include "json.hpp"

namespace triplehop {

HashedTrigramEmbedder::HashedTrigramEmbedder(int dimension)
    : dimension_(dimension) {
  if (dimension_ <= 0) {
    throw ConfigError("embedder dimension must be positive, got " +
                      std::to_string(dimension_));
  }
}

std::string HashedTrigramEmbedder::name() const {
  return "hashed-trigram-d" + std::to_string(dimension_);
}

TokenMatrix HashedTrigramEmbedder::embed(std::string_view text) const {
  std::vector<std::string> tokens = tokenize_words(text);
  if (tokens.empty()) tokens.emplace_back("<empty>");

  MatrixX<float> vectors = MatrixX<float>::Zero(dimension_, tokens.size());
  std::string padded;
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    padded = "#" + tokens[j] + "#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      const auto bucket = fnv1a64(std::string_view(padded).substr(i, 3)) %
                          static_cast<std::uint64_t>(dimension_);
      vectors(static_cast<Eigen::Index>(bucket), j) += 1.0f;
    }
    // Mean then normalize; the mean's scale cancels.
    vectors.col(j).normalize();
  }
  return TokenMatrix(std::move(tokens), std::move(vectors));
}

std::string text_hash(std::string_view text) { return hex64(fnv1a64(text)); }

PrecomputedEmbedder::PrecomputedEmbedder(std::istream& jsonl, std::string name)
    : name_(std::move(name)) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(jsonl, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      auto tokens = j.at("tokens").get<std::vector<std::string>>();
      const auto& rows = j.at("vectors");
      if (rows.size() != tokens.size() || rows.empty()) {
        throw ParseError("tokens and vectors differ in length", line_no, line);
      }
      const auto d = static_cast<int>(rows.at(0).size());
      if (dimension_ == 0) dimension_ = d;
      MatrixX<float> vectors(dimension_, static_cast<Eigen::Index>(rows.size()));
      for (std::size_t c = 0; c < rows.size(); ++c) {
        if (static_cast<int>(rows[c].size()) != dimension_) {
          throw ParseError("vector dimension " +
                               std::to_string(rows[c].size()) +
                               " differs from " + std::to_string(dimension_),
                           line_no, line);
        }
        for (int r = 0; r < dimension_; ++r) {
          vectors(r, static_cast<Eigen::Index>(c)) = rows[c][r].get<float>();
        }
      }
      table_.insert_or_assign(
          j.at("text_hash").get<std::string>(),
          TokenMatrix(std::move(tokens), std::move(vectors)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), line_no, line);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no, line);
    }
  }
  if (dimension_ <= 0) throw ConfigError("precomputed embeddings are empty");
}

PrecomputedEmbedder PrecomputedEmbedder::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embeddings " + path.string());
  return PrecomputedEmbedder(in, path.stem().string());
}

TokenMatrix PrecomputedEmbedder::embed(std::string_view text) const {
  auto it = table_.find(text_hash(text));
  if (it == table_.end()) {
    throw ConfigError("no precomputed embedding for text \"" +
                      std::string(text) + "\"");
  }
  return it->second;
}

OracleEmbedder::OracleEmbedder(const std::set<std::string>& salient)
    : lexicon_(salient) {
  for (const auto& s : salient) {
    const std::string key = canonical(s);
    if (!key.empty()) axes_.emplace(key, 0);
  }
  int next = 1;
  for (auto& [key, axis] : axes_) axis = next++;
}

TokenMatrix OracleEmbedder::embed(std::string_view text) const {
  const auto matches = lexicon_.scan(text);
  std::vector<std::string> tokens;
  std::vector<int> axis_of;
  std::size_t m = 0;
  std::size_t emitted = matches.size();
  for (const WordSpan& w : word_spans(text)) {
    while (m < matches.size() && matches[m].end <= w.begin) ++m;
    if (m < matches.size() && matches[m].begin <= w.begin &&
        w.end <= matches[m].end) {
      // First word of a phrase emits the phrase; the rest are absorbed.
      if (emitted != m) {
        tokens.push_back(matches[m].entity);
        axis_of.push_back(axes_.at(matches[m].entity));
        emitted = m;
      }
      continue;
    }
    tokens.push_back(to_lower(text.substr(w.begin, w.end - w.begin)));
    axis_of.push_back(0);
  }
  if (tokens.empty()) {
    tokens.emplace_back("<empty>");
    axis_of.push_back(0);
  }

  MatrixX<float> vectors = MatrixX<float>::Zero(dimension(), tokens.size());
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    vectors(axis_of[j], static_cast<Eigen::Index>(j)) = 1.0f;
  }
  return TokenMatrix(std::move(tokens), std::move(vectors));
}

std::unique_ptr<Embedder> make_embedder(std::string_view choice,
                                        const KnowledgeGraph* kg) {
  if (choice == "oracle") {
    if (kg == nullptr) throw ConfigError("the oracle embedder needs a graph");
    return std::make_unique<OracleEmbedder>(*kg);
  }
  if (choice == "builtin") return std::make_unique<HashedTrigramEmbedder>();
  if (choice.rfind("builtin:", 0) == 0) {
    return std::make_unique<HashedTrigramEmbedder>(
        std::stoi(std::string(choice.substr(8))));
  }
  if (choice.rfind("precomputed:", 0) == 0) {
    return std::make_unique<PrecomputedEmbedder>(
        PrecomputedEmbedder::from_file(std::string(choice.substr(12))));
  }
  throw ConfigError("unknown embedder '" + std::string(choice) + "'");
}

}  // namespace triplehop
