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

#include "triplehop/triple_index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

namespace triplehop {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                         static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(bytes, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw ParseError("truncated index file");
  }
  return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 |
         std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24;
}

std::uint64_t get_u64(std::istream& in) {
  const std::uint64_t lo = get_u32(in);
  return lo | std::uint64_t{get_u32(in)} << 32;
}

bool ranks_before(const ScoredTriple& a, const ScoredTriple& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.triple_id < b.triple_id;
}

}  // namespace

TripleIndex::TripleIndex(std::string embedder_name, int dimension)
    : embedder_name_(std::move(embedder_name)), dimension_(dimension) {
  if (dimension_ <= 0) {
    throw ConfigError("index dimension must be positive, got " +
                      std::to_string(dimension_));
  }
  vectors_.resize(dimension_, 0);
}

void TripleIndex::reserve_columns(Eigen::Index extra) {
  if (used_ + extra <= vectors_.cols()) return;
  const Eigen::Index grown =
      std::max<Eigen::Index>(used_ + extra, vectors_.cols() * 2);
  vectors_.conservativeResize(Eigen::NoChange, grown);
}

void TripleIndex::append(TripleId id, const MatrixX<float>& token_vectors) {
  if (token_vectors.rows() != dimension_) {
    check_same_dimension(dimension_, token_vectors.rows());
  }
  if (token_vectors.cols() == 0) {
    throw std::invalid_argument("index entry needs at least one token");
  }
  reserve_columns(token_vectors.cols());
  vectors_.middleCols(used_, token_vectors.cols()) = token_vectors;
  used_ += token_vectors.cols();
  ids_.push_back(id);
  offsets_.push_back(used_);
}

void TripleIndex::write(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(embedder_name_.size()));
  out.write(embedder_name_.data(),
            static_cast<std::streamsize>(embedder_name_.size()));
  put_u32(out, static_cast<std::uint32_t>(dimension_));
  put_u64(out, ids_.size());
  for (std::size_t e = 0; e < ids_.size(); ++e) {
    const auto block = entry_vectors(e);
    put_u32(out, ids_[e]);
    put_u32(out, static_cast<std::uint32_t>(block.cols()));
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      for (Eigen::Index r = 0; r < block.rows(); ++r) {
        put_u32(out, std::bit_cast<std::uint32_t>(block(r, c)));
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing index");
}

TripleIndex TripleIndex::read(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not an index file (bad magic)");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    throw ParseError("unsupported index version " + std::to_string(version));
  }
  std::string name(get_u32(in), '\0');
  if (!in.read(name.data(), static_cast<std::streamsize>(name.size()))) {
    throw ParseError("truncated index file");
  }
  const auto d = static_cast<int>(get_u32(in));
  const std::uint64_t count = get_u64(in);

  TripleIndex index(std::move(name), d);
  index.ids_.reserve(count);
  index.offsets_.reserve(count + 1);
  MatrixX<float> block;
  for (std::uint64_t e = 0; e < count; ++e) {
    const TripleId id = get_u32(in);
    const std::uint32_t tokens = get_u32(in);
    block.resize(d, tokens);
    for (std::uint32_t c = 0; c < tokens; ++c) {
      for (int r = 0; r < d; ++r) {
        block(r, c) = std::bit_cast<float>(get_u32(in));
      }
    }
    index.append(id, block);
  }
  index.vectors_.conservativeResize(Eigen::NoChange, index.used_);
  return index;
}

void TripleIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write(out);
}

TripleIndex TripleIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open index " + path.string());
  return read(in);
}

TripleIndex build_index(const KnowledgeGraph& kg, const Embedder& emb,
                        int jobs) {
  if (emb.dimension() <= 0) {
    throw ConfigError("embedder '" + emb.name() + "' has dimension 0");
  }
  const auto& triples = kg.triples();
  std::vector<MatrixX<float>> embedded(triples.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      embedded[i] = emb.embed(verbalize(triples[i]).text).vectors();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(jobs, 1)), 1,
      std::max<std::size_t>(triples.size(), 1));
  if (workers == 1) {
    work(0, triples.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (triples.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(triples.size(), begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }

  Eigen::Index total = 0;
  for (const auto& m : embedded) total += m.cols();
  TripleIndex index(emb.name(), emb.dimension());
  index.reserve_columns(total);
  for (std::size_t i = 0; i < triples.size(); ++i) {
    index.append(triples[i].id, embedded[i]);
    embedded[i] = MatrixX<float>();
  }
  return index;
}

namespace {

// Token columns per similarity product in top_k.
constexpr Eigen::Index kBlockColumns = 2048;

}  // namespace

std::vector<ScoredTriple> top_k(const TripleIndex& index, const Embedder& emb,
                                std::string_view query, std::size_t k) {
  if (emb.name() != index.embedder_name()) {
    throw ConfigError("index was built with embedder '" +
                      index.embedder_name() + "' but query uses '" +
                      emb.name() + "'");
  }
  if (k == 0) throw std::invalid_argument("top_k needs k >= 1");

  const TokenMatrix q = emb.embed(query);
  const MatrixX<float> qt = q.vectors().transpose();
  const auto tokens = index.token_columns();
  const Eigen::Index total = tokens.cols();

  std::vector<ScoredTriple> scored;
  scored.reserve(index.size());
  VectorX<float> best(qt.rows());
  best.setConstant(-std::numeric_limits<float>::infinity());
  auto close_entries = [&](Eigen::Index upto) {
    while (scored.size() < index.size() &&
           index.entry_end(scored.size()) <= upto) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < best.size(); ++i) sum += best[i];
      scored.push_back({index.triple_id(scored.size()), sum});
      best.setConstant(-std::numeric_limits<float>::infinity());
    }
  };

  // Every product has the same shape (the tail block is zero padded), so a
  // column's similarities do not depend on where it sits in the index.
  MatrixX<float> sims(qt.rows(), kBlockColumns);
  MatrixX<float> tail;
  for (Eigen::Index start = 0; start < total; start += kBlockColumns) {
    const Eigen::Index width = std::min(kBlockColumns, total - start);
    if (width == kBlockColumns) {
      sims.noalias() = qt * tokens.middleCols(start, kBlockColumns);
    } else {
      tail.setZero(tokens.rows(), kBlockColumns);
      tail.leftCols(width) = tokens.middleCols(start, width);
      sims.noalias() = qt * tail;
    }
    for (Eigen::Index c = 0; c < width; ++c) {
      close_entries(start + c);
      best = best.cwiseMax(sims.col(c));
    }
  }
  close_entries(total);

  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                    ranks_before);
  scored.resize(keep);
  return scored;
}

}  // namespace triplehop
