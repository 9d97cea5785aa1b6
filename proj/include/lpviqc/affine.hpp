// Copyright 2026 The lpviqc Authors
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

#pragma once

#include "lpviqc/types.hpp"

#include <map>
#include <vector>

namespace lpviqc::sdp {

/// Matrix expression F0 + sum_i x_i F_i in the scalar decision variables x.
///
/// Terms are kept sorted by variable index with at most one term per variable.
class AffineMatrix {
 public:
  struct Term {
    int var;
    Matrix coeff;
  };

  AffineMatrix() = default;
  AffineMatrix(Eigen::Index rows, Eigen::Index cols);
  explicit AffineMatrix(const Matrix& constant);

  static AffineMatrix term(int var, const Matrix& coeff);

  Eigen::Index rows() const { return constant_.rows(); }
  Eigen::Index cols() const { return constant_.cols(); }
  const Matrix& constant() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }

  Matrix eval(const Vector& x) const;
  AffineMatrix transpose() const;

  /// Sub-block copy, like Eigen's block().
  AffineMatrix block(Eigen::Index r, Eigen::Index c, Eigen::Index rows, Eigen::Index cols) const;

  AffineMatrix& operator+=(const AffineMatrix& other);
  AffineMatrix& operator-=(const AffineMatrix& other);
  AffineMatrix& operator*=(double s);

  friend AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b) { return a += b; }
  friend AffineMatrix operator-(AffineMatrix a, const AffineMatrix& b) { return a -= b; }
  friend AffineMatrix operator-(AffineMatrix a) { return a *= -1.0; }
  friend AffineMatrix operator*(double s, AffineMatrix a) { return a *= s; }
  friend AffineMatrix operator*(const Matrix& lhs, const AffineMatrix& rhs);
  friend AffineMatrix operator*(const AffineMatrix& lhs, const Matrix& rhs);

  /// Full block matrix from a grid of expressions; rows of the grid must agree in height,
  /// columns in width.
  static AffineMatrix blocks(const std::vector<std::vector<AffineMatrix>>& grid);

 private:
  void drop_zero_terms();

  Matrix constant_;
  std::vector<Term> terms_;
};

/// a + a^T
AffineMatrix he(const AffineMatrix& a);

/// Symmetric block matrix assembled from its lower triangle. Unset blocks are zero.
class SymmetricBlocks {
 public:
  explicit SymmetricBlocks(std::vector<Eigen::Index> sizes);

  /// Sets block (i, j); for i < j the transpose is stored at (j, i).
  void set(std::size_t i, std::size_t j, const AffineMatrix& block);
  void set(std::size_t i, std::size_t j, const Matrix& block) { set(i, j, AffineMatrix(block)); }

  AffineMatrix build() const;

 private:
  std::vector<Eigen::Index> sizes_;
  std::map<std::pair<std::size_t, std::size_t>, AffineMatrix> lower_;
};

}  // namespace lpviqc::sdp
