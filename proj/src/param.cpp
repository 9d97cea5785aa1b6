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

#include "lpviqc/param.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lpviqc {

ParameterDomain::ParameterDomain(std::vector<Interval> box, std::vector<Interval> rate_box)
    : box_(std::move(box)), rate_box_(std::move(rate_box)) {
  require(box_.size() == rate_box_.size(), "domain: box and rate box dimensions differ");
  for (std::size_t k = 0; k < box_.size(); ++k) {
    require(box_[k].lo <= box_[k].hi, "domain: empty parameter interval " + std::to_string(k));
    require(rate_box_[k].lo <= 0.0 && rate_box_[k].hi >= 0.0,
            "domain: rate box must contain the origin (component " + std::to_string(k) + ")");
  }
}

bool ParameterDomain::contains(const Vector& rho, double tol) const {
  if (static_cast<std::size_t>(rho.size()) != box_.size()) return false;
  for (std::size_t k = 0; k < box_.size(); ++k) {
    if (!box_[k].contains(rho[k], tol)) return false;
  }
  return true;
}

bool ParameterDomain::rate_admissible(const Vector& rate, double tol) const {
  if (static_cast<std::size_t>(rate.size()) != rate_box_.size()) return false;
  for (std::size_t k = 0; k < rate_box_.size(); ++k) {
    if (!rate_box_[k].contains(rate[k], tol)) return false;
  }
  return true;
}

Monomial::Monomial(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) require(e >= 0, "monomial: negative exponent");
}

bool Monomial::is_constant() const {
  return std::all_of(exponents_.begin(), exponents_.end(), [](int e) { return e == 0; });
}

int Monomial::degree() const { return std::accumulate(exponents_.begin(), exponents_.end(), 0); }

double Monomial::eval(const Vector& rho) const {
  require(static_cast<std::size_t>(rho.size()) == exponents_.size(),
          "monomial: parameter dimension mismatch");
  double v = 1.0;
  for (std::size_t k = 0; k < exponents_.size(); ++k) v *= std::pow(rho[k], exponents_[k]);
  return v;
}

double Monomial::derivative(const Vector& rho, std::size_t k) const {
  require(static_cast<std::size_t>(rho.size()) == exponents_.size(),
          "monomial: parameter dimension mismatch");
  require(k < exponents_.size(), "monomial: derivative index out of range");
  if (exponents_[k] == 0) return 0.0;
  double v = exponents_[k] * std::pow(rho[k], exponents_[k] - 1);
  for (std::size_t j = 0; j < exponents_.size(); ++j) {
    if (j != k) v *= std::pow(rho[j], exponents_[j]);
  }
  return v;
}

std::vector<Monomial> monomial_basis(std::size_t dimension, int max_degree) {
  require(max_degree >= 0, "basis: negative degree");
  std::vector<Monomial> out;
  std::vector<int> e(dimension, 0);
  // odometer over {0..max_degree}^dimension, then sort by total degree
  while (true) {
    out.emplace_back(e);
    std::size_t k = 0;
    while (k < dimension && e[k] == max_degree) e[k++] = 0;
    if (k == dimension) break;
    ++e[k];
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Monomial& a, const Monomial& b) { return a.degree() < b.degree(); });
  return out;
}

ParamMatrix::ParamMatrix(Eigen::Index rows, Eigen::Index cols, std::size_t dimension)
    : rows_(rows), cols_(cols), dimension_(dimension) {}

ParamMatrix ParamMatrix::constant(const Matrix& value, std::size_t dimension) {
  ParamMatrix p(value.rows(), value.cols(), dimension);
  p.add_term(Monomial::constant(dimension), value);
  return p;
}

ParamMatrix ParamMatrix::zero(Eigen::Index rows, Eigen::Index cols, std::size_t dimension) {
  return ParamMatrix(rows, cols, dimension);
}

ParamMatrix& ParamMatrix::add_term(const Monomial& basis, const Matrix& coeff) {
  require(basis.dimension() == dimension_, "param matrix: basis dimension mismatch");
  require(coeff.rows() == rows_ && coeff.cols() == cols_, "param matrix: coefficient shape mismatch");
  for (auto& t : terms_) {
    if (t.basis == basis) {
      t.coeff += coeff;
      return *this;
    }
  }
  terms_.push_back({basis, coeff});
  return *this;
}

bool ParamMatrix::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return t.basis.is_constant() || t.coeff.isZero(0.0); });
}

void ParamMatrix::check_point(const Vector& rho) const {
  if (static_cast<std::size_t>(rho.size()) != dimension_) {
    throw InvalidArgument("param matrix: expected parameter of dimension " + std::to_string(dimension_) +
                          ", got " + std::to_string(rho.size()));
  }
}

Matrix ParamMatrix::eval(const Vector& rho) const {
  check_point(rho);
  Matrix out = Matrix::Zero(rows_, cols_);
  for (const auto& t : terms_) out += t.basis.eval(rho) * t.coeff;
  return out;
}

Matrix ParamMatrix::derivative(const Vector& rho, std::size_t k) const {
  check_point(rho);
  require(k < dimension_, "param matrix: derivative index out of range");
  Matrix out = Matrix::Zero(rows_, cols_);
  for (const auto& t : terms_) out += t.basis.derivative(rho, k) * t.coeff;
  return out;
}

ParamMatrix ParamMatrix::transpose() const {
  ParamMatrix out(cols_, rows_, dimension_);
  for (const auto& t : terms_) out.terms_.push_back({t.basis, t.coeff.transpose()});
  return out;
}

ParamMatrix operator+(const ParamMatrix& a, const ParamMatrix& b) {
  require(a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.dimension_ == b.dimension_,
          "param matrix: sum of incompatible shapes");
  ParamMatrix out = a;
  for (const auto& t : b.terms_) out.add_term(t.basis, t.coeff);
  return out;
}

ParamMatrix operator-(const ParamMatrix& a) {
  ParamMatrix out = a;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

ParamMatrix operator-(const ParamMatrix& a, const ParamMatrix& b) { return a + (-b); }

ParamMatrix operator*(const Matrix& lhs, const ParamMatrix& rhs) {
  require(lhs.cols() == rhs.rows_, "param matrix: product of incompatible shapes");
  ParamMatrix out(lhs.rows(), rhs.cols_, rhs.dimension_);
  for (const auto& t : rhs.terms_) out.terms_.push_back({t.basis, lhs * t.coeff});
  return out;
}

ParamMatrix operator*(const ParamMatrix& lhs, const Matrix& rhs) {
  require(lhs.cols_ == rhs.rows(), "param matrix: product of incompatible shapes");
  ParamMatrix out(lhs.rows_, rhs.cols(), lhs.dimension_);
  for (const auto& t : lhs.terms_) out.terms_.push_back({t.basis, t.coeff * rhs});
  return out;
}

std::vector<Vector> make_grid(const ParameterDomain& domain, std::span<const int> counts) {
  const std::size_t s = domain.dimension();
  require(counts.size() == s, "grid: one count per parameter component is required");
  std::vector<std::vector<double>> axes(s);
  for (std::size_t k = 0; k < s; ++k) {
    const Interval& iv = domain.box()[k];
    require(counts[k] >= 1, "grid: count must be at least 1");
    require(counts[k] >= 2 || iv.lo == iv.hi, "grid: a non-degenerate interval needs at least 2 points");
    if (counts[k] == 1) {
      axes[k] = {iv.lo};
      continue;
    }
    for (int i = 0; i < counts[k]; ++i) {
      // endpoints are hit exactly
      axes[k].push_back(i == counts[k] - 1 ? iv.hi : iv.lo + iv.width() * i / (counts[k] - 1));
    }
  }
  std::vector<Vector> grid;
  std::vector<std::size_t> idx(s, 0);
  while (true) {
    Vector p(static_cast<Eigen::Index>(s));
    for (std::size_t k = 0; k < s; ++k) p[static_cast<Eigen::Index>(k)] = axes[k][idx[k]];
    grid.push_back(p);
    // first component varies fastest
    std::size_t k = 0;
    while (k < s && ++idx[k] == axes[k].size()) idx[k++] = 0;
    if (k == s) break;
  }
  return grid;
}

std::vector<Vector> rate_vertices(const ParameterDomain& domain) {
  const std::size_t s = domain.dimension();
  std::vector<Vector> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << s); ++mask) {
    Vector v(static_cast<Eigen::Index>(s));
    for (std::size_t k = 0; k < s; ++k) {
      const Interval& iv = domain.rate_box()[k];
      v[static_cast<Eigen::Index>(k)] = (mask >> k & 1U) ? iv.hi : iv.lo;
    }
    bool dup = std::any_of(out.begin(), out.end(), [&](const Vector& w) { return w == v; });
    if (!dup) out.push_back(v);
  }
  return out;
}

}  // namespace lpviqc
