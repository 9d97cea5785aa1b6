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

#include "lpviqc/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lpviqc {

using sdp::AffineMatrix;
using sdp::SymmetricBlocks;

std::string to_string(WBlockCoupling c) { return c == WBlockCoupling::pooled ? "pooled" : "per_multiplier"; }

WBlockCoupling coupling_from_string(const std::string& name) {
  if (name == "pooled") return WBlockCoupling::pooled;
  if (name == "per_multiplier") return WBlockCoupling::per_multiplier;
  throw InvalidArgument("unknown w-block coupling '" + name + "'");
}

SynthesisConfig SynthesisConfig::quadratic(std::size_t dimension, int grid_points) {
  SynthesisConfig c;
  c.r_basis = {Monomial::constant(dimension)};
  c.x_basis = {Monomial::constant(dimension)};
  c.grid_counts.assign(dimension, grid_points);
  return c;
}

SynthesisConfig SynthesisConfig::parameter_dependent(std::size_t dimension, int r_degree, int x_degree,
                                                     int grid_points) {
  SynthesisConfig c;
  c.r_basis = monomial_basis(dimension, r_degree);
  c.x_basis = monomial_basis(dimension, x_degree);
  c.grid_counts.assign(dimension, grid_points);
  return c;
}

void SynthesisConfig::validate(std::size_t dimension) const {
  require(!r_basis.empty() && !x_basis.empty(), "synthesis: bases must be non-empty");
  auto check = [&](const std::vector<Monomial>& basis, const char* name) {
    bool has_constant = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      require(basis[i].dimension() == dimension, std::string("synthesis: ") + name + " basis has wrong dimension");
      has_constant = has_constant || basis[i].is_constant();
      for (std::size_t j = 0; j < i; ++j) {
        require(!(basis[i] == basis[j]), std::string("synthesis: repeated function in ") + name + " basis");
      }
    }
    require(has_constant, std::string("synthesis: ") + name + " basis must contain the constant function");
  };
  check(r_basis, "R");
  check(x_basis, "X");
  require(grid_counts.size() == dimension, "synthesis: one grid count per parameter component is required");
  if (gamma_mode == GammaMode::fixed) require(fixed_gamma > 0.0, "synthesis: fixed gamma must be positive");
  require(recovery_margin >= 0.0, "synthesis: recovery margin must be non-negative");
  require(nullspace_tol > 0.0, "synthesis: nullspace tolerance must be positive");
}

Matrix nullspace_basis(const Matrix& M, double tol) {
  require(M.size() > 0, "nullspace_basis: empty matrix");
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * smax) ++rank;
  }
  return svd.matrixV().rightCols(M.cols() - rank);
}

MultiplierRealization build_realization(const DelayedLpvPlant& plant, const SynthesisConfig& config) {
  std::vector<MultiplierSpec> specs;
  if (config.multipliers.empty()) {
    specs = select_multipliers(plant.delay, config.shaping);
  } else {
    for (auto kind : config.multipliers) specs.push_back(make_multiplier(kind, plant.delay, config.shaping));
  }
  return realize_filter(specs, static_cast<std::size_t>(plant.dims.nx));
}

std::pair<Matrix, Matrix> GainSchedule::at(const Vector& rho) const {
  require(!F.empty(), "gain schedule is empty");
  const std::size_t s = counts.size();
  require(static_cast<std::size_t>(rho.size()) == s, "gain schedule: parameter dimension mismatch");

  std::vector<std::size_t> base(s);
  std::vector<double> weight(s);
  std::vector<std::size_t> stride(s);
  std::size_t st = 1;
  for (std::size_t k = 0; k < s; ++k) {
    stride[k] = st;
    st *= static_cast<std::size_t>(counts[k]);
    const Interval& iv = domain.box()[k];
    if (counts[k] == 1 || iv.width() == 0.0) {
      base[k] = 0;
      weight[k] = 0.0;
      continue;
    }
    const double v = std::clamp(rho[static_cast<Eigen::Index>(k)], iv.lo, iv.hi);
    const double pos = (v - iv.lo) / iv.width() * (counts[k] - 1);
    const auto cell = std::min(static_cast<std::size_t>(pos), static_cast<std::size_t>(counts[k] - 2));
    base[k] = cell;
    weight[k] = pos - static_cast<double>(cell);
  }
  Matrix Fi = Matrix::Zero(F.front().rows(), F.front().cols());
  Matrix Hi = Matrix::Zero(H.front().rows(), H.front().cols());
  for (std::size_t mask = 0; mask < (std::size_t{1} << s); ++mask) {
    double w = 1.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < s; ++k) {
      const bool up = (mask >> k & 1U) != 0;
      if (up && weight[k] == 0.0) {
        w = 0.0;
        break;
      }
      w *= up ? weight[k] : 1.0 - weight[k];
      idx += (base[k] + (up ? 1 : 0)) * stride[k];
    }
    if (w == 0.0) continue;
    Fi += w * F[idx];
    Hi += w * H[idx];
  }
  return {Fi, Hi};
}

namespace {

template <typename T>
T expand(const std::vector<Monomial>& basis, const std::vector<T>& coeffs, const Vector& rho) {
  T out = basis.front().eval(rho) * coeffs.front();
  for (std::size_t i = 1; i < basis.size(); ++i) out = out + basis[i].eval(rho) * coeffs[i];
  return out;
}

// sum_j rate_j d/drho_j of the expansion
template <typename T>
T expand_rate(const std::vector<Monomial>& basis, const std::vector<T>& coeffs, const Vector& rho,
              const Vector& rate) {
  T out = 0.0 * coeffs.front();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double c = 0.0;
    for (Eigen::Index j = 0; j < rate.size(); ++j) {
      if (rate[j] != 0.0) c += rate[j] * basis[i].derivative(rho, static_cast<std::size_t>(j));
    }
    if (c != 0.0) out = out + c * coeffs[i];
  }
  return out;
}

AffineMatrix scaled_identity(const AffineMatrix& g, Eigen::Index n) {
  const Matrix I = Matrix::Identity(n, n);
  AffineMatrix out(Matrix(g.constant()(0, 0) * I));
  for (const auto& t : g.terms()) out += AffineMatrix::term(t.var, t.coeff(0, 0) * I);
  return out;
}

bool all_constant(const std::vector<Monomial>& basis) {
  return std::all_of(basis.begin(), basis.end(), [](const Monomial& m) { return m.is_constant(); });
}

// Synthesis matrix over the block rows (x_cl, w, d, z, e) in the certificate variables.
AffineMatrix synthesis_matrix(const AugmentedSystem& aug, const Vector& rho, const AffineMatrix& R,
                              const AffineMatrix& Rdot, const AffineMatrix& X, const std::vector<AffineMatrix>& Xk,
                              const AffineMatrix& gamma, WBlockCoupling coupling) {
  const auto [nx, nd, nu, ne] = aug.dims;
  const Eigen::Index ncl = aug.n_cl();
  const auto N = static_cast<Eigen::Index>(Xk.size());

  AffineMatrix S(nx, nx);
  if (coupling == WBlockCoupling::pooled) {
    S = he(X);
    for (const auto& x : Xk) S -= x;
  } else {
    for (const auto& x : Xk) S += he(X) - x;
  }
  AffineMatrix Lam(N * nx, N * nx);
  for (Eigen::Index k = 0; k < N; ++k) {
    Matrix E = Matrix::Zero(N * nx, nx);
    E.middleRows(k * nx, nx).setIdentity();
    Lam += E * Xk[static_cast<std::size_t>(k)] * Matrix(E.transpose());
  }

  const Matrix A = aug.A.eval(rho);
  SymmetricBlocks M({ncl, nx, nd, N * nx, ne});
  M.set(0, 0, he(A * R) - Rdot);
  M.set(1, 0, X.transpose() * Matrix(aug.B0.eval(rho).transpose()));
  M.set(1, 1, -S);
  M.set(2, 0, Matrix(aug.B1.eval(rho).transpose()));
  M.set(2, 2, -scaled_identity(gamma, nd));
  M.set(3, 0, aug.C0 * R);
  M.set(3, 1, aug.D00 * X);
  M.set(3, 3, -Lam);
  M.set(4, 0, aug.C1.eval(rho) * R);
  M.set(4, 1, aug.D10.eval(rho) * X);
  M.set(4, 2, aug.D11.eval(rho));
  M.set(4, 4, -scaled_identity(gamma, ne));
  return M.build();
}

// Controller input direction U of the synthesis matrix.
Matrix input_direction(const AugmentedSystem& aug, const Vector& rho) {
  const auto [nx, nd, nu, ne] = aug.dims;
  const Eigen::Index ncl = aug.n_cl();
  const Eigen::Index nz = static_cast<Eigen::Index>(aug.n_multipliers) * nx;
  Matrix U = Matrix::Zero(ncl + nx + nd + nz + ne, nu);
  U.topRows(ncl) = aug.B2.eval(rho);
  U.bottomRows(ne) = aug.D12.eval(rho);
  return U;
}

double max_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<Matrix> eval_all(const std::vector<AffineMatrix>& exprs, const Vector& x) {
  std::vector<Matrix> out;
  for (const auto& e : exprs) out.push_back(e.eval(x));
  return out;
}

}  // namespace

Matrix SynthesisResult::R_at(const Vector& rho) const { return expand(r_basis, R, rho); }

Matrix SynthesisResult::R_derivative(const Vector& rho, std::size_t j) const {
  Vector rate = Vector::Zero(rho.size());
  rate[static_cast<Eigen::Index>(j)] = 1.0;
  return expand_rate(r_basis, R, rho, rate);
}

Matrix SynthesisResult::Xhat_at(const Vector& rho) const { return expand(x_basis, Xhat, rho); }

Matrix SynthesisResult::Xhat_k_at(std::size_t k, const Vector& rho) const {
  return expand(x_basis, Xhat_k.at(k), rho);
}

std::vector<Vector> synthesis_rates(const DelayedLpvPlant& plant, const std::vector<Monomial>& r_basis) {
  if (all_constant(r_basis)) return {Vector::Zero(static_cast<Eigen::Index>(plant.domain.dimension()))};
  return rate_vertices(plant.domain);
}

SynthesisSdp assemble_synthesis_sdp(const DelayedLpvPlant& plant, const MultiplierRealization& realization,
                                    const SynthesisConfig& config) {
  plant.validate();
  const std::size_t s = plant.domain.dimension();
  config.validate(s);
  const AugmentedSystem aug = augment_with_filter(nominal_interconnection(plant), realization);
  const auto [nx, nd, nu, ne] = aug.dims;
  const Eigen::Index ncl = aug.n_cl();
  const std::size_t N = aug.n_multipliers;

  SynthesisSdp out;
  auto& prob = out.problem;
  AffineMatrix gamma;
  if (config.gamma_mode == GammaMode::minimize) {
    out.gamma_var = prob.add_scalar("gamma");
    prob.set_objective(out.gamma_var, 1.0);
    gamma = AffineMatrix::term(out.gamma_var, Matrix::Ones(1, 1));
  } else {
    gamma = AffineMatrix(Matrix::Constant(1, 1, config.fixed_gamma));
  }
  for (std::size_t i = 0; i < config.r_basis.size(); ++i) {
    out.R.push_back(prob.add_symmetric(ncl, "R" + std::to_string(i)));
  }
  for (std::size_t i = 0; i < config.x_basis.size(); ++i) {
    out.Xhat.push_back(prob.add_full(nx, nx, "Xhat" + std::to_string(i)));
  }
  out.Xhat_k.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t i = 0; i < config.x_basis.size(); ++i) {
      out.Xhat_k[k].push_back(prob.add_symmetric(nx, "Xhat_" + std::to_string(k) + "_" + std::to_string(i)));
    }
  }

  out.grid = make_grid(plant.domain, config.grid_counts);
  out.rates = synthesis_rates(plant, config.r_basis);
  auto add = [&](const AffineMatrix& m, const std::string& label, std::size_t j, int kind, bool negative) {
    if (negative) {
      prob.add_negative_definite(m, label);
    } else {
      prob.add_positive_definite(m, label);
    }
    out.block_point.push_back(j);
    out.block_kind.push_back(kind);
  };

  for (std::size_t j = 0; j < out.grid.size(); ++j) {
    const Vector& rho = out.grid[j];
    const AffineMatrix R = expand(config.r_basis, out.R, rho);
    const AffineMatrix X = expand(config.x_basis, out.Xhat, rho);
    std::vector<AffineMatrix> Xk;
    for (std::size_t k = 0; k < N; ++k) Xk.push_back(expand(config.x_basis, out.Xhat_k[k], rho));

    const Matrix NR = nullspace_basis(input_direction(aug, rho).transpose(), config.nullspace_tol);
    if (NR.cols() == 0) {
      ++out.vacuous_points;
    } else {
      for (std::size_t v = 0; v < out.rates.size(); ++v) {
        const AffineMatrix Rdot = expand_rate(config.r_basis, out.R, rho, out.rates[v]);
        const AffineMatrix M = synthesis_matrix(aug, rho, R, Rdot, X, Xk, gamma, config.coupling);
        add(Matrix(NR.transpose()) * M * NR, "lmi1 point " + std::to_string(j) + " rate " + std::to_string(v), j,
            0, true);
        ++out.lmi1_blocks;
      }
    }

    // LMI2 over (d, z, e)
    const auto nz = static_cast<Eigen::Index>(N) * nx;
    SymmetricBlocks L2({nd, nz, ne});
    L2.set(0, 0, -scaled_identity(gamma, nd));
    AffineMatrix Lam(nz, nz);
    for (std::size_t k = 0; k < N; ++k) {
      Matrix E = Matrix::Zero(nz, nx);
      E.middleRows(static_cast<Eigen::Index>(k) * nx, nx).setIdentity();
      Lam += E * Xk[k] * Matrix(E.transpose());
    }
    L2.set(1, 1, -Lam);
    L2.set(2, 0, plant.Dp11.eval(rho));
    L2.set(2, 2, -scaled_identity(gamma, ne));
    add(L2.build(), "lmi2 point " + std::to_string(j), j, 1, true);
    ++out.lmi2_blocks;

    add(R, "R point " + std::to_string(j), j, 2, false);
    ++out.positivity_blocks;
    for (std::size_t k = 0; k < N; ++k) {
      add(Xk[k], "Xhat_" + std::to_string(k) + " point " + std::to_string(j), j, 2, false);
      ++out.positivity_blocks;
    }
  }
  return out;
}

SynthesisResult minimize_gamma(const DelayedLpvPlant& plant, const MultiplierRealization& realization,
                               const SynthesisConfig& config) {
  SynthesisSdp sdp = assemble_synthesis_sdp(plant, realization, config);
  SynthesisResult res;
  res.delay = plant.delay;
  for (const auto& spec : realization.specs) res.multipliers.push_back(spec.kind);
  res.shaping = config.shaping;
  res.coupling = config.coupling;
  res.r_basis = config.r_basis;
  res.x_basis = config.x_basis;
  res.grid_counts = config.grid_counts;

  const sdp::SdpSolution sol = sdp::solve_sdp(sdp.problem, config.solver);
  res.status = sol.status;
  res.iterations = sol.iterations;
  std::ostringstream msg;
  msg << sol.message << " (tau_bar=" << plant.delay.tau_bar << ", r=" << plant.delay.r << ")";
  res.message = msg.str();
  if (sol.status != sdp::SdpStatus::optimal) return res;

  res.gamma = sdp.gamma_var >= 0 ? sol.x[sdp.gamma_var] : config.fixed_gamma;
  res.R = eval_all(sdp.R, sol.x);
  res.Xhat = eval_all(sdp.Xhat, sol.x);
  for (const auto& xs : sdp.Xhat_k) res.Xhat_k.push_back(eval_all(xs, sol.x));

  res.diagnostics.resize(sdp.grid.size());
  for (std::size_t j = 0; j < sdp.grid.size(); ++j) {
    auto& d = res.diagnostics[j];
    d.rho = sdp.grid[j];
    d.lmi1_margin = -std::numeric_limits<double>::infinity();
    d.lmi1_vacuous = true;
    d.r_min_eig = min_eig(res.R_at(d.rho));
  }
  const auto& blocks = sdp.problem.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const double m = max_eig(blocks[b].eval(sol.x)) / blocks[b].scale;
    auto& d = res.diagnostics[sdp.block_point[b]];
    if (sdp.block_kind[b] == 0) {
      d.lmi1_margin = std::max(d.lmi1_margin, m);
      d.lmi1_vacuous = false;
    } else if (sdp.block_kind[b] == 1) {
      d.lmi2_margin = m;
    }
  }
  return res;
}

AffineMatrix recovery_lmi(const AugmentedSystem& aug, const SynthesisResult& result, const Vector& rho,
                          const Vector& rate, double gamma, const AffineMatrix& K) {
  const auto [nx, nd, nu, ne] = aug.dims;
  const Eigen::Index ncl = aug.n_cl();
  require(K.rows() == nu && K.cols() == ncl + nx, "recovery_lmi: K must be n_u x (n_cl + n_x)");
  const AffineMatrix R(result.R_at(rho));
  const AffineMatrix Rdot(expand_rate(result.r_basis, result.R, rho, rate));
  const AffineMatrix X(result.Xhat_at(rho));
  std::vector<AffineMatrix> Xk;
  for (std::size_t k = 0; k < result.Xhat_k.size(); ++k) Xk.emplace_back(result.Xhat_k_at(k, rho));
  const AffineMatrix M = synthesis_matrix(aug, rho, R, Rdot, X, Xk, AffineMatrix(Matrix::Constant(1, 1, gamma)),
                                          result.coupling);
  const Matrix U = input_direction(aug, rho);
  Matrix V = Matrix::Zero(ncl + nx, U.rows());
  V.leftCols(ncl + nx).setIdentity();
  return M + he(U * K * V);
}

bool recover_gains(const DelayedLpvPlant& plant, const MultiplierRealization& realization, SynthesisResult& result,
                   double margin, const sdp::SolverOptions& options) {
  require(result.ok(), "recover_gains: synthesis result has no certificate");
  require(margin >= 0.0, "recover_gains: margin must be non-negative");
  const AugmentedSystem aug = augment_with_filter(nominal_interconnection(plant), realization);
  const auto [nx, nd, nu, ne] = aug.dims;
  const Eigen::Index ncl = aug.n_cl();
  const double gamma = result.gamma * (1.0 + margin);

  // the gamma-optimal certificate sits on the boundary; take an interior one at the inflated gamma
  {
    SynthesisConfig cfg;
    cfg.r_basis = result.r_basis;
    cfg.x_basis = result.x_basis;
    cfg.grid_counts = result.grid_counts;
    cfg.multipliers = result.multipliers;
    cfg.shaping = result.shaping;
    cfg.coupling = result.coupling;
    cfg.gamma_mode = GammaMode::fixed;
    cfg.fixed_gamma = gamma;
    cfg.solver = options;
    SynthesisSdp sdp = assemble_synthesis_sdp(plant, realization, cfg);
    const sdp::SdpSolution sol = sdp::solve_sdp(sdp.problem, options);
    if (sol.status != sdp::SdpStatus::optimal) {
      result.message = "gain recovery: no certificate at inflated gamma: " + sol.message;
      return false;
    }
    result.R = eval_all(sdp.R, sol.x);
    result.Xhat = eval_all(sdp.Xhat, sol.x);
    result.Xhat_k.clear();
    for (const auto& xs : sdp.Xhat_k) result.Xhat_k.push_back(eval_all(xs, sol.x));
  }

  GainSchedule sched;
  sched.domain = plant.domain;
  sched.counts = result.grid_counts;
  sched.points = make_grid(plant.domain, result.grid_counts);
  const std::vector<Vector> rates = synthesis_rates(plant, result.r_basis);
  if (result.diagnostics.size() != sched.points.size()) {
    result.diagnostics.assign(sched.points.size(), GridDiagnostic{});
    for (std::size_t j = 0; j < sched.points.size(); ++j) result.diagnostics[j].rho = sched.points[j];
  }

  for (std::size_t j = 0; j < sched.points.size(); ++j) {
    const Vector& rho = sched.points[j];
    sdp::SdpProblem prob;
    const AffineMatrix K = prob.add_full(nu, ncl + nx, "K");
    const AffineMatrix t = prob.scalar_variable("t");
    prob.set_objective(prob.num_vars() - 1, 1.0);
    for (const auto& rate : rates) prob.add_negative_definite(recovery_lmi(aug, result, rho, rate, gamma, K), "temp");
    SymmetricBlocks nb({nu, ncl + nx});
    nb.set(0, 0, scaled_identity(t, nu));
    nb.set(1, 0, K.transpose());
    nb.set(1, 1, scaled_identity(t, ncl + nx));
    prob.add_positive_definite(nb.build(), "norm bound");

    // the frozen certificate's own slack bounds what (temp) can achieve
    const AffineMatrix K0(nu, ncl + nx);
    const Matrix NR = nullspace_basis(input_direction(aug, rho).transpose());
    double slack = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (std::size_t v = 0; v < rates.size(); ++v) {
      const Matrix M0 = recovery_lmi(aug, result, rho, rates[v], gamma, K0).constant();
      if (NR.cols() > 0) slack = std::min(slack, -max_eig(NR.transpose() * M0 * NR));
      scale = std::max(scale, prob.blocks()[v].scale);
    }
    sdp::SolverOptions local = options;
    if (std::isfinite(slack) && slack > 0.0) local.strictness = std::min(options.strictness, 0.25 * slack / scale);

    const sdp::SdpSolution sol = sdp::solve_sdp(prob, local);
    if (sol.status != sdp::SdpStatus::optimal) {
      std::ostringstream msg;
      msg << "gain recovery failed at rho=" << rho.transpose() << ": " << sol.message
          << " (certificate inconsistency)";
      result.message = msg.str();
      return false;
    }
    const Matrix Kv = K.eval(sol.x);
    const Matrix Fhat = Kv.leftCols(ncl);
    const Matrix Hhat = Kv.rightCols(nx);
    sched.F.push_back(result.R_at(rho).llt().solve(Fhat.transpose()).transpose());
    sched.H.push_back(Hhat * result.Xhat_at(rho).inverse());

    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < rates.size(); ++b) {
      const auto& blk = prob.blocks()[b];
      worst = std::max(worst, max_eig(blk.eval(sol.x)) / blk.scale);
    }
    result.diagnostics[j].recovery_margin = worst;
    result.diagnostics[j].gain_norm = Kv.norm();
  }
  result.gains = std::move(sched);
  return true;
}

std::vector<ClosedLoopRealization> closed_loop_on_grid(const DelayedLpvPlant& plant,
                                                       const MultiplierRealization& realization,
                                                       const GainSchedule& gains) {
  require(!gains.empty(), "closed_loop_on_grid: no gains");
  const AugmentedSystem aug = augment_with_filter(nominal_interconnection(plant), realization);
  std::vector<ClosedLoopRealization> out;
  for (std::size_t j = 0; j < gains.points.size(); ++j) {
    out.push_back(close_loop(aug, gains.F[j], gains.H[j], gains.points[j]));
  }
  return out;
}

AnalysisInput analysis_input(const DelayedLpvPlant& plant, const MultiplierRealization& realization,
                             const SynthesisResult& result, int p_degree) {
  const std::size_t s = plant.domain.dimension();
  const bool constant_r = all_constant(result.r_basis);
  if (p_degree < 0) p_degree = constant_r ? 0 : 4;
  AnalysisInput in;
  in.grid = result.gains.points;
  in.closed_loop = closed_loop_on_grid(plant, realization, result.gains);
  in.p_basis = monomial_basis(s, p_degree);
  in.x_basis = all_constant(result.x_basis) ? std::vector<Monomial>{Monomial::constant(s)}
                                             : monomial_basis(s, std::min(p_degree, 2));
  in.rates = p_degree == 0 ? std::vector<Vector>{Vector::Zero(static_cast<Eigen::Index>(s))}
                           : rate_vertices(plant.domain);
  return in;
}

AnalysisCertificate verify_analysis(const AnalysisInput& in, std::optional<double> gamma_value,
                                    const sdp::SolverOptions& options) {
  require(!in.grid.empty() && in.grid.size() == in.closed_loop.size(),
          "verify_analysis: one closed loop per grid point is required");
  require(!in.p_basis.empty() && !in.x_basis.empty() && !in.rates.empty(), "verify_analysis: empty basis or rates");
  if (gamma_value) require(*gamma_value > 0.0, "verify_analysis: gamma must be positive");

  const ClosedLoopRealization& c0 = in.closed_loop.front();
  const Eigen::Index n = c0.A.rows();
  const Eigen::Index nw = c0.B1.cols();
  const Eigen::Index nd = c0.B2.cols();
  const Eigen::Index ne = c0.C2.rows();
  const std::size_t N = c0.C1.size();
  const bool has_w = N > 0 && nw > 0;

  sdp::SdpProblem prob;
  AffineMatrix gamma;
  int gvar = -1;
  if (gamma_value) {
    gamma = AffineMatrix(Matrix::Constant(1, 1, *gamma_value));
  } else {
    gvar = prob.add_scalar("gamma");
    prob.set_objective(gvar, 1.0);
    gamma = AffineMatrix::term(gvar, Matrix::Ones(1, 1));
  }
  std::vector<AffineMatrix> Pc;
  for (std::size_t i = 0; i < in.p_basis.size(); ++i) Pc.push_back(prob.add_symmetric(n, "P" + std::to_string(i)));
  std::vector<std::vector<AffineMatrix>> Xc(N);
  const Eigen::Index nxk = N > 0 ? c0.C1bar(0).rows() : 0;
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t i = 0; i < in.x_basis.size(); ++i) {
      Xc[k].push_back(prob.add_symmetric(nxk, "X_" + std::to_string(k) + "_" + std::to_string(i)));
    }
  }

  std::vector<std::size_t> block_point;
  for (std::size_t j = 0; j < in.grid.size(); ++j) {
    const Vector& rho = in.grid[j];
    const ClosedLoopRealization& cl = in.closed_loop[j];
    const AffineMatrix P = expand(in.p_basis, Pc, rho);
    std::vector<AffineMatrix> X;
    for (std::size_t k = 0; k < N; ++k) X.push_back(expand(in.x_basis, Xc[k], rho));

    AffineMatrix xx(n, n), xw(n, nw), ww(nw, nw), xd(n, nd), wd(nw, nd), dd(nd, nd);
    for (std::size_t k = 0; k < N; ++k) {
      const Matrix C = cl.C1bar(k);
      const Matrix D1 = cl.D11bar(k);
      const Matrix D2 = cl.D12bar(k);
      const Matrix Ct = C.transpose();
      const Matrix D1t = D1.transpose();
      const Matrix D2t = D2.transpose();
      xx += Ct * X[k] * C;
      xw += Ct * X[k] * D1;
      ww += D1t * X[k] * D1 - X[k];
      xd += Ct * X[k] * D2;
      wd += D1t * X[k] * D2;
      dd += D2t * X[k] * D2;
    }
    for (const auto& rate : in.rates) {
      const AffineMatrix Pdot = expand_rate(in.p_basis, Pc, rho, rate);
      if (has_w) {
        SymmetricBlocks M({n, nw, nd, ne});
        M.set(0, 0, he(P * cl.A) + Pdot + xx);
        M.set(1, 0, (P * cl.B1 + xw).transpose());
        M.set(1, 1, ww);
        M.set(2, 0, (P * cl.B2 + xd).transpose());
        M.set(2, 1, wd.transpose());
        M.set(2, 2, dd - scaled_identity(gamma, nd));
        M.set(3, 0, cl.C2);
        M.set(3, 1, cl.D21);
        M.set(3, 2, cl.D22);
        M.set(3, 3, -scaled_identity(gamma, ne));
        prob.add_negative_definite(M.build(), "analysis point " + std::to_string(j));
      } else {
        SymmetricBlocks M({n, nd, ne});
        M.set(0, 0, he(P * cl.A) + Pdot);
        M.set(1, 0, (P * cl.B2).transpose());
        M.set(1, 1, -scaled_identity(gamma, nd));
        M.set(2, 0, cl.C2);
        M.set(2, 1, cl.D22);
        M.set(2, 2, -scaled_identity(gamma, ne));
        prob.add_negative_definite(M.build(), "analysis point " + std::to_string(j));
      }
      block_point.push_back(j);
    }
    prob.add_positive_definite(P, "P point " + std::to_string(j));
    block_point.push_back(j);
    for (std::size_t k = 0; k < N; ++k) {
      prob.add_positive_definite(X[k], "X_" + std::to_string(k) + " point " + std::to_string(j));
      block_point.push_back(j);
    }
  }

  const sdp::SdpSolution sol = sdp::solve_sdp(prob, options);
  AnalysisCertificate cert;
  cert.status = sol.status;
  cert.message = sol.message;
  if (sol.status != sdp::SdpStatus::optimal) return cert;
  cert.gamma = gamma_value ? *gamma_value : sol.x[gvar];
  cert.P = eval_all(Pc, sol.x);
  for (const auto& xs : Xc) cert.X_k.push_back(eval_all(xs, sol.x));
  cert.margins.assign(in.grid.size(), -std::numeric_limits<double>::infinity());
  const auto& blocks = prob.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const double m = max_eig(blocks[b].eval(sol.x)) / blocks[b].scale;
    cert.margins[block_point[b]] = std::max(cert.margins[block_point[b]], m);
  }
  return cert;
}

}  // namespace lpviqc
