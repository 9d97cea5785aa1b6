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

#include "lpviqc/synthesis.hpp"

#include <cmath>
#include <complex>

using namespace lpviqc;

namespace {

Vector point(double v) { return Vector::Constant(1, v); }

// x' = a x + d, e = x, no delay term and no actuation
DelayedLpvPlant scalar_plant(double a) {
  DelayedLpvPlant p;
  const std::size_t s = 1;
  p.dims = {1, 1, 1, 1};
  p.delay = {1.0, 0.0};
  p.domain = ParameterDomain({{0.0, 0.0}}, {{0.0, 0.0}});
  p.Ap = ParamMatrix::constant(Matrix::Constant(1, 1, a), s);
  p.Ad = ParamMatrix::zero(1, 1, s);
  p.Bp1 = ParamMatrix::constant(Matrix::Constant(1, 1, 1.0), s);
  p.Bp2 = ParamMatrix::zero(1, 1, s);
  p.Cp1 = ParamMatrix::constant(Matrix::Constant(1, 1, 1.0), s);
  p.Cd1 = ParamMatrix::zero(1, 1, s);
  p.Dp11 = ParamMatrix::zero(1, 1, s);
  p.Dp12 = ParamMatrix::zero(1, 1, s);
  p.validate();
  return p;
}

AnalysisInput open_loop_input(const DelayedLpvPlant& p) {
  const auto real = realize_filter(select_multipliers(p.delay), 1);
  const auto aug = augment_with_filter(nominal_interconnection(p), real);
  AnalysisInput in;
  in.grid = {point(0.0)};
  in.closed_loop = {close_loop(aug, Matrix::Zero(1, aug.n_cl()), Matrix::Zero(1, 1), point(0.0))};
  in.rates = {point(0.0)};
  in.p_basis = {Monomial::constant(1)};
  in.x_basis = {Monomial::constant(1)};
  return in;
}

double sweep_hinf(double a) {
  double best = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double w = std::pow(10.0, -4.0 + 8.0 * i / 4000.0);
    best = std::max(best, std::abs(1.0 / std::complex<double>(-a, w)));
  }
  return best;
}

double gamma_for(const DelayedLpvPlant& plant, const SynthesisConfig& cfg) {
  const auto real = build_realization(plant, cfg);
  const auto res = minimize_gamma(plant, real, cfg);
  REQUIRE(res.ok());
  return res.gamma;
}

}  // namespace

TEST_SUITE("synthesis") {

TEST_CASE("nullspace basis") {
  Matrix m(1, 2);
  m << 1, 0;
  const Matrix n = nullspace_basis(m);
  REQUIRE(n.cols() == 1);
  CHECK(std::abs(std::abs(n(1, 0)) - 1.0) < 1e-15);
  CHECK(std::abs(n(0, 0)) < 1e-15);

  const Matrix z = nullspace_basis(Matrix::Zero(1, 3));
  CHECK(z.cols() == 3);
  CHECK((z.transpose() * z - Matrix::Identity(3, 3)).norm() < 1e-14);

  const auto plant = example_plant({1.0, 0.0});
  const Vector rho = point(0.3);
  Matrix M(1, 4);  // [B_p2^T 0 D_p12^T] pattern on the example
  M << plant.Bp2.eval(rho).transpose(), plant.Dp12.eval(rho).transpose();
  const Matrix N = nullspace_basis(M);
  CHECK(N.cols() == 3);
  CHECK((M * N).norm() <= 1e-12);
  CHECK((N.transpose() * N - Matrix::Identity(3, 3)).norm() <= 1e-12);
}

TEST_CASE("config validation") {
  auto cfg = SynthesisConfig::parameter_dependent(1);
  cfg.r_basis = {Monomial({1})};
  CHECK_THROWS_AS(cfg.validate(1), InvalidArgument);
  auto q = SynthesisConfig::quadratic(1);
  q.grid_counts = {11, 11};
  CHECK_THROWS_AS(q.validate(1), InvalidArgument);
}

TEST_CASE("block count with a rate-dependent basis") {
  const auto plant = example_plant({2.0, 1.2}, 0.5);
  auto cfg = SynthesisConfig::parameter_dependent(1);
  cfg.multipliers = {MultiplierKind::pi2};
  const auto sdp = assemble_synthesis_sdp(plant, build_realization(plant, cfg), cfg);
  CHECK(sdp.grid.size() == 11);
  CHECK(sdp.rates.size() == 2);
  CHECK(sdp.lmi1_blocks == 22);
  CHECK(sdp.lmi2_blocks == 11);
  CHECK(sdp.positivity_blocks > 0);
  CHECK(sdp.problem.blocks().size() == sdp.lmi1_blocks + sdp.lmi2_blocks + sdp.positivity_blocks);
}

TEST_CASE("constant R basis needs only the zero rate") {
  const auto plant = example_plant({1.0, 0.0}, 5.0);
  CHECK(synthesis_rates(plant, {Monomial::constant(1)}).size() == 1);
  CHECK(synthesis_rates(plant, monomial_basis(1, 2)).size() == 2);
}

TEST_CASE("quadratic certificate on the benchmark") {
  const auto plant = example_plant({10.0, 0.0});
  const double g = gamma_for(plant, SynthesisConfig::quadratic(1));
  CHECK(std::abs(g - 3.6859) <= 0.01 * 3.6859);
}

TEST_CASE("enriching the R basis never increases gamma") {
  const auto plant = example_plant({1.0, 0.9}, 0.5);
  auto small = SynthesisConfig::parameter_dependent(1, 0, 0);
  auto big = SynthesisConfig::parameter_dependent(1, 2, 0);
  CHECK(gamma_for(plant, big) <= gamma_for(plant, small) + 1e-6);
}

TEST_CASE("grid doubling moves gamma by at most two percent") {
  const auto plant = example_plant({1.0, 0.9});
  const double g11 = gamma_for(plant, SynthesisConfig::quadratic(1, 11));
  const double g21 = gamma_for(plant, SynthesisConfig::quadratic(1, 21));
  CHECK(std::abs(g21 - g11) <= 0.02 * g11);
  CHECK(g21 >= g11 - 1e-6);  // more constraints
}

TEST_CASE("gain recovery post-conditions and single-multiplier analysis") {
  const auto plant = example_plant({2.0, 1.2}, 0.5);
  auto cfg = SynthesisConfig::parameter_dependent(1);
  cfg.multipliers = {MultiplierKind::pi2};
  const auto real = build_realization(plant, cfg);
  auto res = minimize_gamma(plant, real, cfg);
  REQUIRE(res.ok());
  REQUIRE(recover_gains(plant, real, res, cfg.recovery_margin));
  REQUIRE(res.gains.points.size() == 11);
  for (std::size_t j = 0; j < res.gains.points.size(); ++j) {
    CHECK(res.gains.F[j].rows() == 1);
    CHECK(res.gains.F[j].cols() == 2 + real.n_psi());
    CHECK(res.gains.H[j].rows() == 1);
    CHECK(res.gains.H[j].cols() == 2);
    CHECK(res.diagnostics[j].recovery_margin <= -1e-8);
    Eigen::SelfAdjointEigenSolver<Matrix> es(res.R_at(res.gains.points[j]));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  const auto in = analysis_input(plant, real, res);
  const auto cert = verify_analysis(in, res.gamma * (1.0 + 2.0 * cfg.recovery_margin));
  CHECK(cert.feasible());
  const auto tight = verify_analysis(in, 0.1 * res.gamma);
  CHECK_FALSE(tight.feasible());
}

TEST_CASE("gain schedule interpolation") {
  GainSchedule g;
  g.domain = ParameterDomain({{-1.0, 1.0}}, {{0.0, 0.0}});
  g.counts = {3};
  g.points = {point(-1.0), point(0.0), point(1.0)};
  g.F = {Matrix::Constant(1, 1, 0.0), Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 6.0)};
  g.H = g.F;
  CHECK(g.at(point(0.5)).first(0, 0) == doctest::Approx(4.0));
  CHECK(g.at(point(-0.25)).second(0, 0) == doctest::Approx(1.5));
  CHECK(g.at(point(7.0)).first(0, 0) == doctest::Approx(6.0));  // clamped
}

TEST_CASE("analysis agrees with the frequency sweep on a scalar lag") {
  const auto p = scalar_plant(-1.0);
  const auto in = open_loop_input(p);
  CHECK(verify_analysis(in, 1.01).feasible());
  CHECK_FALSE(verify_analysis(in, 0.5).feasible());
  const auto best = verify_analysis(in, std::nullopt);
  REQUIRE(best.feasible());
  const double oracle = sweep_hinf(-1.0);
  CHECK(std::abs(best.gamma - oracle) <= 0.02 * oracle);
}

TEST_CASE("unstable open loop has no certificate") {
  const auto in = open_loop_input(scalar_plant(1.0));
  for (double g : {1.0, 10.0, 100.0}) CHECK_FALSE(verify_analysis(in, g).feasible());
}

TEST_CASE("unstabilizable plant is reported infeasible by synthesis") {
  const auto p = scalar_plant(1.0);
  auto cfg = SynthesisConfig::quadratic(1, 1);
  const auto res = minimize_gamma(p, build_realization(p, cfg), cfg);
  CHECK(res.status == sdp::SdpStatus::infeasible);
  CHECK(res.message.find("tau_bar=1") != std::string::npos);
}

}  // TEST_SUITE
