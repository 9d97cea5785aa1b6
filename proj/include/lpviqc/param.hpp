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

#include <span>
#include <vector>

namespace lpviqc {

/// Scheduling-parameter set: a box for rho and a box for its rate.
///
/// The rate box must contain the origin (a frozen parameter is admissible).
class ParameterDomain {
 public:
  ParameterDomain() = default;
  ParameterDomain(std::vector<Interval> box, std::vector<Interval> rate_box);

  std::size_t dimension() const { return box_.size(); }
  const std::vector<Interval>& box() const { return box_; }
  const std::vector<Interval>& rate_box() const { return rate_box_; }

  bool contains(const Vector& rho, double tol = 1e-12) const;
  bool rate_admissible(const Vector& rate, double tol = 1e-12) const;

 private:
  std::vector<Interval> box_;
  std::vector<Interval> rate_box_;
};

/// Monomial basis function rho_1^e_1 * ... * rho_s^e_s.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  static Monomial constant(std::size_t dimension) { return Monomial(std::vector<int>(dimension, 0)); }

  std::size_t dimension() const { return exponents_.size(); }
  const std::vector<int>& exponents() const { return exponents_; }
  bool is_constant() const;
  int degree() const;

  double eval(const Vector& rho) const;
  /// Exact partial derivative with respect to rho_k.
  double derivative(const Vector& rho, std::size_t k) const;

  bool operator==(const Monomial&) const = default;
  auto operator<=>(const Monomial&) const = default;

 private:
  std::vector<int> exponents_;
};

/// All monomials with exponent <= max_degree in every component, constant first.
std::vector<Monomial> monomial_basis(std::size_t dimension, int max_degree);

/// Matrix-valued function of rho stored as sum_i basis_i(rho) * coeff_i.
class ParamMatrix {
 public:
  struct Term {
    Monomial basis;
    Matrix coeff;
  };

  ParamMatrix() = default;
  ParamMatrix(Eigen::Index rows, Eigen::Index cols, std::size_t dimension);

  static ParamMatrix constant(const Matrix& value, std::size_t dimension);
  static ParamMatrix zero(Eigen::Index rows, Eigen::Index cols, std::size_t dimension);

  /// Adds coeff to the coefficient of `basis`, merging repeated monomials.
  ParamMatrix& add_term(const Monomial& basis, const Matrix& coeff);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  std::size_t dimension() const { return dimension_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_constant() const;

  Matrix eval(const Vector& rho) const;
  Matrix derivative(const Vector& rho, std::size_t k) const;

  ParamMatrix transpose() const;

  friend ParamMatrix operator+(const ParamMatrix& a, const ParamMatrix& b);
  friend ParamMatrix operator-(const ParamMatrix& a, const ParamMatrix& b);
  friend ParamMatrix operator-(const ParamMatrix& a);
  friend ParamMatrix operator*(const Matrix& lhs, const ParamMatrix& rhs);
  friend ParamMatrix operator*(const ParamMatrix& lhs, const Matrix& rhs);

 private:
  void check_point(const Vector& rho) const;

  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::size_t dimension_ = 0;
  std::vector<Term> terms_;
};

/// Uniform tensor grid including both endpoints of every interval.
std::vector<Vector> make_grid(const ParameterDomain& domain, std::span<const int> counts);

/// All 2^s corners of the rate box (duplicates removed for degenerate intervals).
std::vector<Vector> rate_vertices(const ParameterDomain& domain);

}  // namespace lpviqc
