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


#include "doctest.h"

#include "lpviqc/param.hpp"

#include <algorithm>
#include <random>

using namespace lpviqc;

TEST_SUITE("param") {

TEST_CASE("grid on [-1,1] with 11 points has 0.2 spacing and both endpoints") {
  ParameterDomain d({{-1.0, 1.0}}, {{0.0, 0.0}});
  const std::vector<int> counts{11};
  auto g = make_grid(d, counts);
  REQUIRE(g.size() == 11);
  for (int i = 0; i < 11; ++i) CHECK(g[static_cast<std::size_t>(i)][0] == doctest::Approx(-1.0 + 0.2 * i).epsilon(1e-14));
  CHECK(g.front()[0] == -1.0);
  CHECK(g.back()[0] == 1.0);
}

TEST_CASE("degenerate interval with one point") {
  ParameterDomain d({{0.0, 0.0}}, {{0.0, 0.0}});
  const std::vector<int> counts{1};
  auto g = make_grid(d, counts);
  REQUIRE(g.size() == 1);
  CHECK(g[0][0] == 0.0);
}

TEST_CASE("tensor grid cardinality and per-component order") {
  ParameterDomain d({{-1.0, 1.0}, {0.0, 2.0}}, {{0.0, 0.0}, {0.0, 0.0}});
  const std::vector<int> counts{3, 2};
  auto g = make_grid(d, counts);
  CHECK(g.size() == 6);
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<double> vals;
    for (const auto& p : g) vals.push_back(p[static_cast<Eigen::Index>(k)]);
    CHECK(*std::min_element(vals.begin(), vals.end()) == d.box()[k].lo);
    CHECK(*std::max_element(vals.begin(), vals.end()) == d.box()[k].hi);
  }
}

TEST_CASE("grid rejects bad counts") {
  ParameterDomain d({{-1.0, 1.0}}, {{0.0, 0.0}});
  CHECK_THROWS_AS(make_grid(d, std::vector<int>{0}), InvalidArgument);
  CHECK_THROWS_AS(make_grid(d, std::vector<int>{1}), InvalidArgument);
  CHECK_THROWS_AS(make_grid(d, std::vector<int>{3, 3}), InvalidArgument);
}

TEST_CASE("rate vertices") {
  auto v1 = rate_vertices(ParameterDomain({{-1.0, 1.0}}, {{-0.1, 0.1}}));
  REQUIRE(v1.size() == 2);
  CHECK(std::min(v1[0][0], v1[1][0]) == -0.1);
  CHECK(std::max(v1[0][0], v1[1][0]) == 0.1);

  auto v2 = rate_vertices(ParameterDomain({{-1.0, 1.0}, {-1.0, 1.0}}, {{-1.0, 1.0}, {-2.0, 2.0}}));
  REQUIRE(v2.size() == 4);
  for (std::size_t i = 0; i < v2.size(); ++i) {
    CHECK(std::abs(v2[i][0]) == 1.0);
    CHECK(std::abs(v2[i][1]) == 2.0);
    for (std::size_t j = i + 1; j < v2.size(); ++j) CHECK(v2[i] != v2[j]);
  }

  auto v0 = rate_vertices(ParameterDomain({{-1.0, 1.0}}, {{0.0, 0.0}}));
  REQUIRE(v0.size() == 1);
  CHECK(v0[0][0] == 0.0);
}

TEST_CASE("rate box must contain the origin") {
  CHECK_THROWS_AS(ParameterDomain({{-1.0, 1.0}}, {{0.1, 0.2}}), InvalidArgument);
  CHECK_THROWS_AS(ParameterDomain({{1.0, -1.0}}, {{0.0, 0.0}}), InvalidArgument);
}

TEST_CASE("monomial basis ordering and degree") {
  auto b = monomial_basis(1, 2);
  REQUIRE(b.size() == 3);
  CHECK(b[0].is_constant());
  CHECK(b[2].degree() == 2);
  CHECK(monomial_basis(2, 1).size() == 4);
}

TEST_CASE("analytic derivative matches central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t s = 2;
  ParamMatrix pm(3, 2, s);
  for (const Monomial& m : monomial_basis(s, 3)) {
    Matrix c(3, 2);
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
    pm.add_term(m, c);
  }
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    Vector rho(2);
    rho << u(rng), u(rng);
    for (std::size_t k = 0; k < s; ++k) {
      Vector e = Vector::Zero(2);
      e[static_cast<Eigen::Index>(k)] = h;
      const Matrix fd = (pm.eval(rho + e) - pm.eval(rho - e)) / (2.0 * h);
      const Matrix an = pm.derivative(rho, k);
      CHECK((fd - an).norm() <= 1e-6 * std::max(1.0, an.norm()));
    }
  }
}

TEST_CASE("param matrix algebra evaluates pointwise") {
  const std::size_t s = 1;
  ParamMatrix a(2, 2, s);
  a.add_term(Monomial({0}), Matrix::Identity(2, 2));
  a.add_term(Monomial({1}), Matrix::Ones(2, 2));
  a.add_term(Monomial({1}), Matrix::Ones(2, 2));  // merged
  CHECK(a.terms().size() == 2);
  Matrix L(1, 2);
  L << 1.0, -2.0;
  Vector rho(1);
  rho << 0.7;
  CHECK(((L * a).eval(rho) - L * a.eval(rho)).norm() < 1e-14);
  CHECK(((a - a).eval(rho)).norm() == 0.0);
  CHECK((a.transpose().eval(rho) - a.eval(rho).transpose()).norm() == 0.0);
  CHECK_THROWS_AS(a.eval(Vector::Zero(2)), InvalidArgument);
}

}  // TEST_SUITE
