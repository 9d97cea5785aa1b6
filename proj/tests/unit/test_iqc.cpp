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

#include "lpviqc/iqc.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace lpviqc;
using cd = std::complex<double>;

namespace {

// closed forms written out from the multiplier formulas
cd phi1(double w, double tb, double r, double c1, double eps) {
  const double k1 = 1.0 + 1.0 / std::sqrt(1.0 - r);
  const double a1 = std::sqrt(2.0 * k1 * c1);
  const cd s(0.0, w);
  return k1 * (tb * tb * s * s + c1 * tb * s) / (tb * tb * s * s + a1 * tb * s + k1 * c1) + eps;
}

cd phi2(double w, double tb, double r, double delta) {
  const double k2 = std::sqrt(8.0 / (2.0 - r));
  const double b2 = std::sqrt(50.0);
  const double c2 = std::sqrt(12.5);
  const double a2 = std::sqrt(6.5 + 2.0 * b2);
  const cd s(0.0, w);
  return k2 * (tb * tb * s * s + c2 * tb * s) / (tb * tb * s * s + a2 * tb * s + b2) + delta;
}

MultiplierRealization single(const MultiplierSpec& m, std::size_t nx = 1) {
  const std::vector<MultiplierSpec> v{m};
  return realize_filter(v, nx);
}

}  // namespace

TEST_SUITE("iqc") {

TEST_CASE("multiplier constants") {
  const auto p1 = make_multiplier(MultiplierKind::pi1, {1.0, 0.0});
  CHECK(p1.gain == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(p1.damping == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(make_multiplier(MultiplierKind::pi1, {1.0, 0.75}).gain == doctest::Approx(3.0).epsilon(1e-14));
  for (double r : {0.0, 0.7, 1.9}) {
    const auto p2 = make_multiplier(MultiplierKind::pi2, {2.0, r});
    CHECK(p2.stiffness == doctest::Approx(7.0711).epsilon(1e-5));
    CHECK(p2.zero == doctest::Approx(3.5355).epsilon(1e-5));
  }
  CHECK(make_multiplier(MultiplierKind::pi2, {2.0, 0.0}).gain == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("admissibility of the delay-rate bound") {
  CHECK_THROWS_WITH_AS(make_multiplier(MultiplierKind::pi1, {1.0, 1.5}), "pi1 requires r<1", InvalidArgument);
  CHECK_THROWS_AS(make_multiplier(MultiplierKind::pi1, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(make_multiplier(MultiplierKind::pi2, {1.0, 2.0}), InvalidArgument);
  ShapingConstants big;
  big.c1 = 4.0;  // k1 = 2 at r = 0
  CHECK_THROWS_AS(make_multiplier(MultiplierKind::pi1, {1.0, 0.0}, big), InvalidArgument);
}

TEST_CASE("selection rule") {
  CHECK(select_multipliers({1.0, 0.5}).size() == 2);
  const auto only = select_multipliers({1.0, 0.51});
  REQUIRE(only.size() == 1);
  CHECK(only[0].kind == MultiplierKind::pi2);
}

TEST_CASE("realization structure") {
  const auto both = select_multipliers({1.0, 0.0});
  const auto real = realize_filter(both, 2);
  CHECK(real.n_psi() == 8);
  CHECK(realize_filter(std::vector<MultiplierSpec>{make_multiplier(MultiplierKind::pi2, {2.0, 1.2})}, 2).n_psi() == 4);
  CHECK(real.B2.cwiseAbs().maxCoeff() == 0.0);
  Eigen::EigenSolver<Matrix> es(real.A);
  CHECK(es.eigenvalues().real().maxCoeff() <= -1e-9);
  for (std::size_t k = 0; k < real.count(); ++k) {
    CHECK((real.D2[k].bottomRows(2) - Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK(real.C[k].bottomRows(2).norm() == 0.0);
    CHECK(real.D1[k].bottomRows(2).norm() == 0.0);
  }
  // pi1 row at tau_bar=1, c1=1, r=0: [-k1^2 c1, k1 (c1 - a1)] = [-4, -2]
  const Matrix c = real.Cbar(0);
  CHECK(c(0, 0) == doctest::Approx(-4.0));
  CHECK(c(0, 1) == doctest::Approx(-2.0));
  CHECK(c(0, 2) == 0.0);
  CHECK(c(0, 3) == 0.0);
  CHECK(real.D1bar(0)(0, 0) == doctest::Approx(2.0 + 1e-7));
}

TEST_CASE("realized response matches the closed forms") {
  for (double tb : {1.0, 2.0, 10.0}) {
    for (double r : {0.0, 0.4}) {
      const auto specs = select_multipliers({tb, r});
      const auto real = realize_filter(specs, 1);
      for (double w : log_frequency_grid(tb)) {
        const cd a = channel_response(real, 0, w);
        const cd b = phi1(w, tb, r, 1.0, 1e-7);
        CHECK(std::abs(a - b) <= 1e-8 * std::abs(b));
        const cd c = channel_response(real, 1, w);
        const cd d = phi2(w, tb, r, 1e-4);
        CHECK(std::abs(c - d) <= 1e-8 * std::abs(d));
        CHECK(std::abs(specs[0].phi(w) - b) <= 1e-12 * std::abs(b));
      }
    }
  }
}

TEST_CASE("limits of the pi1 channel") {
  const auto real = realize_filter(std::vector<MultiplierSpec>{make_multiplier(MultiplierKind::pi1, {1.0, 0.0})}, 1);
  CHECK(std::abs(channel_response(real, 0, 0.0) - 1e-7) < 1e-12);
  CHECK(std::abs(channel_response(real, 0, 1e9) - (2.0 + 1e-7)) < 1e-6);
  const ComplexMatrix psi = freq_response(real, 0, 3.7);
  CHECK(std::abs(psi(1, 1) - 1.0) == 0.0);
  CHECK(std::abs(psi(1, 0)) == 0.0);
}

TEST_CASE("spectral factorization identity and corrupted realization") {
  const auto grid = log_frequency_grid(1.0);
  for (auto kind : {MultiplierKind::pi1, MultiplierKind::pi2}) {
    const auto m = make_multiplier(kind, {1.0, 0.0});
    const auto real = single(m, 2);
    const auto rep = verify_spectral_factorization(m, real, 0, grid);
    CHECK(rep.max_error < 1e-6);
    CHECK(rep.pass);

    auto bad = m;
    bad.damping += 1.0;
    const auto rep_bad = verify_spectral_factorization(m, single(bad, 2), 0, grid);
    CHECK_FALSE(rep_bad.pass);
  }
}

TEST_CASE("pi1 block signs on the frequency grid") {
  const auto m = make_multiplier(MultiplierKind::pi1, {1.0, 0.3});
  for (double w : log_frequency_grid(1.0)) CHECK(std::norm(m.phi(w)) > 0.0);
}

TEST_CASE("hard IQC: elementary signals") {
  const DelaySpec cls{2.0, 1.2};
  const auto real = single(make_multiplier(MultiplierKind::pi2, cls));
  auto zero = [](double) { return Vector::Zero(1); };
  auto tau = [](double t) { return 0.2 * std::sin(6.0 * t) + 1.8; };
  const auto z = check_hard_iqc_empirical(real, zero, tau, cls, 10.0, 1e-2);
  CHECK(z.worst() == 0.0);
  CHECK(z.input_energy == 0.0);

  // no delay: w = 0, only the positive channel is excited
  auto v = [](double t) { return Vector::Constant(1, std::sin(t) + 0.3 * std::cos(3.1 * t)); };
  auto none = [](double) { return 0.0; };
  const auto p = check_hard_iqc_empirical(real, v, none, cls, 20.0, 1e-2);
  CHECK(p.worst() >= 0.0);
}

TEST_CASE("hard IQC on the varying-delay trajectory, two step sizes") {
  const DelaySpec cls{2.0, 1.2};
  const auto real = single(make_multiplier(MultiplierKind::pi2, cls));
  auto v = [](double t) {
    const double env = std::exp(-t / 15.0);
    return Vector::Constant(1, env * (std::sin(0.7 * t) + 0.5 * std::sin(2.3 * t + 1.0) + 0.25 * std::sin(5.9 * t)));
  };
  auto tau = [](double t) { return 0.2 * std::sin(6.0 * t) + 1.8; };
  const auto a = check_hard_iqc_empirical(real, v, tau, cls, 40.0, 4e-3);
  const auto b = check_hard_iqc_empirical(real, v, tau, cls, 40.0, 2e-3);
  CHECK(a.worst() >= -1e-6 * a.input_energy);
  CHECK(b.worst() >= -1e-6 * b.input_energy);
  CHECK(std::abs(a.input_energy - b.input_energy) <= 1e-6 * b.input_energy);
}

TEST_CASE("hard IQC rejects trajectories outside the class") {
  const DelaySpec cls{2.0, 0.5};
  const auto real = single(make_multiplier(MultiplierKind::pi2, cls));
  auto v = [](double t) { return Vector::Constant(1, std::sin(t)); };
  CHECK_THROWS_AS(check_hard_iqc_empirical(real, v, [](double) { return 2.5; }, cls, 5.0, 1e-2), ClassViolation);
  CHECK_THROWS_AS(check_hard_iqc_empirical(real, v, [](double t) { return 1.0 + 0.9 * std::sin(t); }, cls, 5.0, 1e-2),
                  ClassViolation);
}

TEST_CASE("random admissible pairs stay in the class") {
  for (const DelaySpec cls : {DelaySpec{1.0, 0.0}, DelaySpec{2.0, 1.2}, DelaySpec{10.0, 0.3}}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto pr = random_admissible_pair(cls, 2, seed);
      const double h = pr.step;
      for (double t = 0.0; t <= pr.horizon; t += pr.horizon / 500.0) {
        const double tau = pr.tau(t);
        CHECK(tau >= 0.0);
        CHECK(tau <= cls.tau_bar);
        CHECK(std::abs(pr.tau(t + h) - tau) <= cls.r * h + 1e-12);
      }
    }
  }
}

TEST_CASE("randomized hard IQC: sound multipliers pass, undersized ones fail") {
  const DelaySpec cls{2.0, 0.5};
  const std::vector<MultiplierKind> kinds{MultiplierKind::pi1, MultiplierKind::pi2};
  const auto rep = validate_iqc(cls, kinds, {}, 10, 3);
  REQUIRE(rep.multipliers.size() == 2);
  for (const auto& m : rep.multipliers) {
    CHECK(m.pass);
    CHECK(m.worst_normalized_integral >= -1e-6);
  }

  auto small = make_multiplier(MultiplierKind::pi2, cls);
  small.gain *= 0.5;
  small.offset *= 0.5;
  const auto real = single(small);
  double worst = 0.0;
  for (std::uint64_t p = 0; p < 10; ++p) {
    const auto pr = random_admissible_pair(cls, 1, 100 + p);
    const auto h = check_hard_iqc_empirical(real, pr.v, pr.tau, cls, pr.horizon, pr.step);
    worst = std::min(worst, h.worst() / h.input_energy);
  }
  CHECK(worst < -1e-2);
}

}  // TEST_SUITE
