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

#ifndef TRIPLEHOP_TOKEN_MATRIX_HPP_
#define TRIPLEHOP_TOKEN_MATRIX_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace triplehop {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Per-token embeddings of one text: a d x n matrix whose column j is the
/// unit-norm vector of token j.
template <typename Scalar>
class BasicTokenMatrix {
 public:
  static constexpr double kNormTolerance = 1e-6;

  BasicTokenMatrix() = default;

  // Throws std::invalid_argument unless there is at least one token, one
  // column per token and every column has unit L2 norm.
  BasicTokenMatrix(std::vector<std::string> tokens, MatrixX<Scalar> vectors)
      : tokens_(std::move(tokens)), vectors_(std::move(vectors)) {
    if (tokens_.empty()) {
      throw std::invalid_argument("token matrix needs at least one token");
    }
    if (static_cast<Eigen::Index>(tokens_.size()) != vectors_.cols()) {
      throw std::invalid_argument("token/vector count mismatch");
    }
    if (vectors_.rows() == 0) {
      throw std::invalid_argument("token matrix has dimension 0");
    }
    for (Eigen::Index j = 0; j < vectors_.cols(); ++j) {
      const double norm = static_cast<double>(vectors_.col(j).norm());
      if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
        throw std::invalid_argument("token vector " + std::to_string(j) +
                                    " is not unit norm");
      }
    }
  }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const MatrixX<Scalar>& vectors() const { return vectors_; }
  Eigen::Index dimension() const { return vectors_.rows(); }
  Eigen::Index size() const { return vectors_.cols(); }

  template <typename Other>
  BasicTokenMatrix<Other> cast() const {
    BasicTokenMatrix<Other> out;
    out.tokens_ = tokens_;
    out.vectors_ = vectors_.template cast<Other>();
    return out;
  }

  friend bool operator==(const BasicTokenMatrix& a, const BasicTokenMatrix& b) {
    return a.tokens_ == b.tokens_ && a.vectors_.rows() == b.vectors_.rows() &&
           a.vectors_.cols() == b.vectors_.cols() && a.vectors_ == b.vectors_;
  }

 private:
  template <typename>
  friend class BasicTokenMatrix;

  std::vector<std::string> tokens_;
  MatrixX<Scalar> vectors_;
};

using TokenMatrix = BasicTokenMatrix<float>;

inline void check_same_dimension(Eigen::Index query_dim,
                                 Eigen::Index triple_dim) {
  if (query_dim != triple_dim) {
    throw std::invalid_argument(
        "dimension mismatch: query has d=" + std::to_string(query_dim) +
        ", triple has d=" + std::to_string(triple_dim));
  }
}

/// Late-interaction score between column-per-token matrices: for every query
/// token, the best dot product against any triple token, summed over query
/// tokens.
template <typename DerivedQ, typename DerivedT>
double maxsim_score(const Eigen::MatrixBase<DerivedQ>& query,
                    const Eigen::MatrixBase<DerivedT>& triple) {
  check_same_dimension(query.rows(), triple.rows());
  return static_cast<double>(
      (query.transpose() * triple).rowwise().maxCoeff().sum());
}

template <typename Scalar>
double maxsim_score(const BasicTokenMatrix<Scalar>& query,
                    const BasicTokenMatrix<Scalar>& triple) {
  return maxsim_score(query.vectors(), triple.vectors());
}

/// Scores many triples against one query. The query is transposed once and
/// every (query token, triple token) similarity is produced by the same
/// matrix-vector kernel, so identical triples always receive bit-identical
/// scores wherever they sit in the index.
template <typename Scalar>
class MaxSimScorer {
 public:
  explicit MaxSimScorer(const MatrixX<Scalar>& query)
      : query_t_(query.transpose()),
        sims_(query.cols()),
        best_(query.cols()) {}

  Eigen::Index dimension() const { return query_t_.cols(); }

  // `triple` is any d x n block with one column per token.
  template <typename Derived>
  double operator()(const Eigen::MatrixBase<Derived>& triple) {
    check_same_dimension(query_t_.cols(), triple.rows());
    best_.setConstant(-std::numeric_limits<Scalar>::infinity());
    for (Eigen::Index j = 0; j < triple.cols(); ++j) {
      sims_.noalias() = query_t_ * triple.col(j);
      best_ = best_.cwiseMax(sims_);
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < best_.size(); ++i) {
      total += static_cast<double>(best_[i]);
    }
    return total;
  }

 private:
  MatrixX<Scalar> query_t_;
  VectorX<Scalar> sims_;
  VectorX<Scalar> best_;
};

}  // namespace triplehop

#endif  // TRIPLEHOP_TOKEN_MATRIX_HPP_
