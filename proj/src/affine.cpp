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

#include "lpviqc/affine.hpp"

#include <algorithm>

namespace lpviqc::sdp {

AffineMatrix::AffineMatrix(Eigen::Index rows, Eigen::Index cols) : constant_(Matrix::Zero(rows, cols)) {}

AffineMatrix::AffineMatrix(const Matrix& constant) : constant_(constant) {}

AffineMatrix AffineMatrix::term(int var, const Matrix& coeff) {
  require(var >= 0, "affine: negative variable index");
  AffineMatrix a(coeff.rows(), coeff.cols());
  a.terms_.push_back({var, coeff});
  a.drop_zero_terms();
  return a;
}

Matrix AffineMatrix::eval(const Vector& x) const {
  Matrix out = constant_;
  for (const auto& t : terms_) {
    require(t.var < x.size(), "affine: decision vector too short");
    out += x[t.var] * t.coeff;
  }
  return out;
}

AffineMatrix AffineMatrix::transpose() const {
  AffineMatrix out(Matrix(constant_.transpose()));
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) out.terms_.push_back({t.var, t.coeff.transpose()});
  return out;
}

AffineMatrix AffineMatrix::block(Eigen::Index r, Eigen::Index c, Eigen::Index rows, Eigen::Index cols) const {
  AffineMatrix out(Matrix(constant_.block(r, c, rows, cols)));
  for (const auto& t : terms_) out.terms_.push_back({t.var, t.coeff.block(r, c, rows, cols)});
  out.drop_zero_terms();
  return out;
}

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& other) {
  if (constant_.size() == 0 && terms_.empty()) return *this = other;
  require(rows() == other.rows() && cols() == other.cols(), "affine: sum of incompatible shapes");
  constant_ += other.constant_;
  std::vector<Term> merged;
  merged.reserve(terms_.size() + other.terms_.size());
  auto a = terms_.begin();
  auto b = other.terms_.begin();
  while (a != terms_.end() || b != other.terms_.end()) {
    if (b == other.terms_.end() || (a != terms_.end() && a->var < b->var)) {
      merged.push_back(std::move(*a++));
    } else if (a == terms_.end() || b->var < a->var) {
      merged.push_back(*b++);
    } else {
      merged.push_back({a->var, a->coeff + b->coeff});
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  drop_zero_terms();
  return *this;
}

AffineMatrix& AffineMatrix::operator-=(const AffineMatrix& other) { return *this += -other; }

AffineMatrix& AffineMatrix::operator*=(double s) {
  constant_ *= s;
  for (auto& t : terms_) t.coeff *= s;
  if (s == 0.0) terms_.clear();
  return *this;
}

AffineMatrix operator*(const Matrix& lhs, const AffineMatrix& rhs) {
  require(lhs.cols() == rhs.rows(), "affine: product of incompatible shapes");
  AffineMatrix out(Matrix(lhs * rhs.constant_));
  out.terms_.reserve(rhs.terms_.size());
  for (const auto& t : rhs.terms_) out.terms_.push_back({t.var, lhs * t.coeff});
  out.drop_zero_terms();
  return out;
}

AffineMatrix operator*(const AffineMatrix& lhs, const Matrix& rhs) {
  require(lhs.cols() == rhs.rows(), "affine: product of incompatible shapes");
  AffineMatrix out(Matrix(lhs.constant_ * rhs));
  out.terms_.reserve(lhs.terms_.size());
  for (const auto& t : lhs.terms_) out.terms_.push_back({t.var, t.coeff * rhs});
  out.drop_zero_terms();
  return out;
}

AffineMatrix AffineMatrix::blocks(const std::vector<std::vector<AffineMatrix>>& grid) {
  require(!grid.empty() && !grid.front().empty(), "affine: empty block grid");
  const std::size_t nr = grid.size();
  const std::size_t nc = grid.front().size();
  std::vector<Eigen::Index> heights(nr), widths(nc);
  for (std::size_t i = 0; i < nr; ++i) {
    require(grid[i].size() == nc, "affine: ragged block grid");
    heights[i] = grid[i][0].rows();
  }
  for (std::size_t j = 0; j < nc; ++j) widths[j] = grid[0][j].cols();
  Eigen::Index R = 0, C = 0;
  for (auto h : heights) R += h;
  for (auto w : widths) C += w;

  // collect per-variable coefficients directly into full-size matrices
  Matrix constant = Matrix::Zero(R, C);
  std::map<int, Matrix> coeffs;
  Eigen::Index r0 = 0;
  for (std::size_t i = 0; i < nr; ++i) {
    Eigen::Index c0 = 0;
    for (std::size_t j = 0; j < nc; ++j) {
      const AffineMatrix& b = grid[i][j];
      require(b.rows() == heights[i] && b.cols() == widths[j], "affine: block size mismatch");
      constant.block(r0, c0, heights[i], widths[j]) = b.constant_;
      for (const auto& t : b.terms_) {
        auto [it, inserted] = coeffs.try_emplace(t.var);
        if (inserted) it->second = Matrix::Zero(R, C);
        it->second.block(r0, c0, heights[i], widths[j]) += t.coeff;
      }
      c0 += widths[j];
    }
    r0 += heights[i];
  }
  AffineMatrix out(constant);
  for (auto& [var, m] : coeffs) out.terms_.push_back({var, std::move(m)});
  out.drop_zero_terms();
  return out;
}

void AffineMatrix::drop_zero_terms() {
  std::erase_if(terms_, [](const Term& t) { return t.coeff.isZero(0.0); });
}

AffineMatrix he(const AffineMatrix& a) { return a + a.transpose(); }

SymmetricBlocks::SymmetricBlocks(std::vector<Eigen::Index> sizes) : sizes_(std::move(sizes)) {}

void SymmetricBlocks::set(std::size_t i, std::size_t j, const AffineMatrix& block) {
  require(i < sizes_.size() && j < sizes_.size(), "symmetric blocks: index out of range");
  if (i < j) {
    set(j, i, block.transpose());
    return;
  }
  require(block.rows() == sizes_[i] && block.cols() == sizes_[j], "symmetric blocks: block size mismatch");
  lower_[{i, j}] = block;
}

AffineMatrix SymmetricBlocks::build() const {
  const std::size_t n = sizes_.size();
  std::vector<std::vector<AffineMatrix>> grid(n, std::vector<AffineMatrix>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool lower = j <= i;
      auto it = lower_.find(lower ? std::pair{i, j} : std::pair{j, i});
      if (it == lower_.end()) {
        grid[i][j] = AffineMatrix(sizes_[i], sizes_[j]);
      } else if (lower) {
        grid[i][j] = it->second;
      } else {
        grid[i][j] = it->second.transpose();
      }
    }
  }
  return AffineMatrix::blocks(grid);
}

}  // namespace lpviqc::sdp
