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

// Primal-dual interior-point method for the block-diagonal LMI problem.
//
// The user problem  min c^T x  s.t.  F_j(x) <= -eps I  is solved as the dual of
// the standard-form pair
//
//   (P)  min <C, X>   s.t.  <A_i, X> = b_i,  X >= 0
//   (D)  max b^T y    s.t.  sum_i y_i A_i + Z = C,  Z >= 0
//
// with y = x (after variable scaling), A_i = F_i, C = -F_0 - eps I, b = -c.
// Search directions are HKM with a Mehrotra predictor-corrector; the start is
// infeasible and infeasibility is read off the diverging iterates.

#include "lpviqc/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace lpviqc::sdp {

Matrix LmiBlock::eval(const Vector& x) const {
  Matrix out = f0;
  for (const auto& t : terms) out += x[t.var] * t.coeff;
  return out;
}

int SdpProblem::add_scalar(const std::string& name) {
  names_.push_back(name);
  objective_.conservativeResize(static_cast<Eigen::Index>(names_.size()));
  objective_(objective_.size() - 1) = 0.0;
  return static_cast<int>(names_.size()) - 1;
}

AffineMatrix SdpProblem::scalar_variable(const std::string& name) {
  return AffineMatrix::term(add_scalar(name), Matrix::Ones(1, 1));
}

AffineMatrix SdpProblem::add_symmetric(Eigen::Index n, const std::string& name) {
  require(n > 0, "sdp: symmetric variable must be non-empty");
  AffineMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      out += AffineMatrix::term(
          add_scalar(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]"), e);
    }
  }
  return out;
}

AffineMatrix SdpProblem::add_full(Eigen::Index rows, Eigen::Index cols, const std::string& name) {
  require(rows > 0 && cols > 0, "sdp: full variable must be non-empty");
  AffineMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      Matrix e = Matrix::Zero(rows, cols);
      e(i, j) = 1.0;
      out += AffineMatrix::term(
          add_scalar(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]"), e);
    }
  }
  return out;
}

void SdpProblem::set_objective(int var, double coeff) {
  require(var >= 0 && var < num_vars(), "sdp: objective variable out of range");
  objective_(var) = coeff;
}

void SdpProblem::add_negative_definite(const AffineMatrix& expr, const std::string& label) {
  require(expr.rows() == expr.cols() && expr.rows() > 0, "sdp: LMI block must be square and non-empty");
  LmiBlock b;
  b.label = label;
  b.f0 = 0.5 * (expr.constant() + expr.constant().transpose());
  for (const auto& t : expr.terms()) {
    require(t.var < num_vars(), "sdp: LMI references an unknown variable");
    Matrix sym = 0.5 * (t.coeff + t.coeff.transpose());
    if (!sym.isZero(0.0)) b.terms.push_back({t.var, std::move(sym)});
  }
  const double m = b.f0.cwiseAbs().maxCoeff();
  b.scale = m > 0.0 ? m : 1.0;
  blocks_.push_back(std::move(b));
}

void SdpProblem::add_positive_definite(const AffineMatrix& expr, const std::string& label) {
  add_negative_definite(-expr, label);
}

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::optimal:
      return "optimal";
    case SdpStatus::infeasible:
      return "infeasible";
    case SdpStatus::numerical_failure:
      break;
  }
  return "numerical_failure";
}

namespace {

double inner(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

struct StdBlock {
  Eigen::Index n = 0;
  Matrix C;
  std::vector<int> vars;
  Matrix V;  // column a holds vec(A_{vars[a]}), n^2 rows
};

struct StdForm {
  std::vector<StdBlock> blocks;
  Vector b;
  Vector var_scale;  // x = var_scale .* y
  Eigen::Index total_dim = 0;
};

StdForm to_standard_form(const SdpProblem& problem, double strictness) {
  const int m = problem.num_vars();
  StdForm sf;
  sf.var_scale = Vector::Zero(m);
  for (const auto& blk : problem.blocks()) {
    for (const auto& t : blk.terms) {
      sf.var_scale(t.var) = std::max(sf.var_scale(t.var), t.coeff.norm() / blk.scale);
    }
  }
  for (int i = 0; i < m; ++i) {
    sf.var_scale(i) = sf.var_scale(i) > 0.0 ? 1.0 / sf.var_scale(i) : 1.0;
  }
  sf.b = -problem.objective().cwiseProduct(sf.var_scale);

  for (const auto& blk : problem.blocks()) {
    StdBlock s;
    s.n = blk.size();
    s.C = -blk.f0 / blk.scale - strictness * Matrix::Identity(s.n, s.n);
    s.V.resize(s.n * s.n, static_cast<Eigen::Index>(blk.terms.size()));
    for (std::size_t a = 0; a < blk.terms.size(); ++a) {
      const auto& t = blk.terms[a];
      s.vars.push_back(t.var);
      const Matrix Ai = t.coeff * (sf.var_scale(t.var) / blk.scale);
      s.V.col(static_cast<Eigen::Index>(a)) = Eigen::Map<const Vector>(Ai.data(), Ai.size());
    }
    sf.total_dim += s.n;
    sf.blocks.push_back(std::move(s));
  }
  return sf;
}

Vector apply_A(const StdForm& sf, const std::vector<Matrix>& X, Eigen::Index m) {
  Vector out = Vector::Zero(m);
  for (std::size_t j = 0; j < sf.blocks.size(); ++j) {
    const auto& blk = sf.blocks[j];
    const Vector r = blk.V.transpose() * Eigen::Map<const Vector>(X[j].data(), X[j].size());
    for (std::size_t a = 0; a < blk.vars.size(); ++a) out(blk.vars[a]) += r(static_cast<Eigen::Index>(a));
  }
  return out;
}

Matrix apply_At(const StdBlock& blk, const Vector& y) {
  Vector ys(static_cast<Eigen::Index>(blk.vars.size()));
  for (std::size_t a = 0; a < blk.vars.size(); ++a) ys(static_cast<Eigen::Index>(a)) = y(blk.vars[a]);
  Vector v = blk.V * ys;
  return Eigen::Map<Matrix>(v.data(), blk.n, blk.n);
}

// Largest alpha with X + alpha dX >= 0 (infinity when dX >= 0).
double max_step(const Matrix& X, const Matrix& dX) {
  Eigen::LLT<Matrix> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix Linv_dX = llt.matrixL().solve(dX);
  const Matrix S = llt.matrixL().solve(Linv_dX.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(S), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double fro_norm(const std::vector<Matrix>& mats) {
  double s = 0.0;
  for (const auto& m : mats) s += m.squaredNorm();
  return std::sqrt(s);
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SolverOptions& opts) {
  const Eigen::Index m = problem.num_vars();
  SdpSolution sol;
  sol.x = Vector::Zero(m);
  if (problem.blocks().empty()) {
    sol.status = SdpStatus::numerical_failure;
    sol.message = "problem has no constraints";
    return sol;
  }

  const StdForm sf = to_standard_form(problem, opts.strictness);
  const std::size_t nb = sf.blocks.size();
  const double n_tot = static_cast<double>(sf.total_dim);

  // variables that appear nowhere are only acceptable with a zero objective
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (const auto& blk : sf.blocks) {
    for (int v : blk.vars) used[static_cast<std::size_t>(v)] = true;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!used[static_cast<std::size_t>(i)] && problem.objective()(i) != 0.0) {
      sol.message = "objective variable " + problem.var_names()[static_cast<std::size_t>(i)] +
                    " appears in no constraint";
      return sol;
    }
  }

  double normC = 0.0;
  for (const auto& blk : sf.blocks) normC += blk.C.squaredNorm();
  normC = std::sqrt(normC);
  const double normb = sf.b.norm();

  // starting point, after SDPT3's infeasible start heuristic
  std::vector<Matrix> X(nb), Z(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    const auto& blk = sf.blocks[j];
    const double n = static_cast<double>(blk.n);
    double xi = std::max(10.0, std::sqrt(n));
    double eta = std::max({10.0, std::sqrt(n), blk.C.norm()});
    for (std::size_t a = 0; a < blk.vars.size(); ++a) {
      const double nA = blk.V.col(static_cast<Eigen::Index>(a)).norm();
      xi = std::max(xi, n * (1.0 + std::abs(sf.b(blk.vars[a]))) / (1.0 + nA));
      eta = std::max(eta, nA);
    }
    X[j] = xi * Matrix::Identity(blk.n, blk.n);
    Z[j] = eta * Matrix::Identity(blk.n, blk.n);
  }
  Vector y = Vector::Zero(m);

  std::vector<Matrix> Rd(nb), Zinv(nb), dX(nb), dZ(nb), dXp(nb), dZp(nb);
  Matrix M(m, m);
  double best_gap = std::numeric_limits<double>::infinity();
  double best_pinf = best_gap;
  double best_dinf = best_gap;
  int stalled = 0;
  std::string breakdown = "iteration limit reached";

  auto finish = [&](SdpStatus st, std::string msg) {
    sol.status = st;
    sol.message = std::move(msg);
    sol.x = y.cwiseProduct(sf.var_scale);
    sol.objective = problem.objective().dot(sol.x);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& blk : problem.blocks()) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(sym(blk.eval(sol.x)) / blk.scale, Eigen::EigenvaluesOnly);
      worst = std::max(worst, es.eigenvalues().maxCoeff());
    }
    sol.worst_margin = worst;
    return sol;
  };

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    sol.iterations = iter;
    // residuals and merit quantities
    const Vector AX = apply_A(sf, X, m);
    const Vector rp = sf.b - AX;
    double pobj = 0.0, gap = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      Rd[j] = sf.blocks[j].C - Z[j] - apply_At(sf.blocks[j], y);
      pobj += inner(sf.blocks[j].C, X[j]);
      gap += inner(X[j], Z[j]);
    }
    const double dobj = sf.b.dot(y);
    const double mu = gap / n_tot;
    const double pinf = rp.norm() / (1.0 + normb);
    const double dinf = fro_norm(Rd) / (1.0 + normC);
    const double relgap = std::max(gap, std::abs(pobj - dobj)) / (1.0 + std::abs(pobj) + std::abs(dobj));
    sol.relative_gap = relgap;
    sol.primal_infeasibility = pinf;
    sol.dual_infeasibility = dinf;
    if (opts.verbose) {
      std::fprintf(stderr, "%3d  pobj % .8e  dobj % .8e  gap %.2e  pinf %.2e  dinf %.2e\n", iter, -pobj, -dobj,
                   relgap, pinf, dinf);
    }

    if (relgap < opts.gap_tol && pinf < opts.feas_tol && dinf < opts.feas_tol) {
      return finish(SdpStatus::optimal, "converged");
    }
    // LMI system infeasible: X / (-<C,X>) is a certificate once A(X) is negligible
    if (pobj < 0.0 && AX.norm() / (-pobj) < opts.infeas_tol) {
      return finish(SdpStatus::infeasible, "infeasibility certificate found");
    }
    // objective unbounded below
    if (dobj > 0.0) {
      std::vector<Matrix> AtyZ(nb);
      for (std::size_t j = 0; j < nb; ++j) AtyZ[j] = apply_At(sf.blocks[j], y) + Z[j];
      if (fro_norm(AtyZ) / dobj < opts.infeas_tol) {
        return finish(SdpStatus::numerical_failure, "objective unbounded below");
      }
    }

    // Schur complement M_ik = tr(A_i X A_k Z^{-1})
    M.setZero();
    bool slack_ok = true;
    for (std::size_t j = 0; j < nb && slack_ok; ++j) {
      const auto& blk = sf.blocks[j];
      Eigen::LLT<Matrix> llt(Z[j]);
      if (llt.info() != Eigen::Success) {
        slack_ok = false;
        continue;
      }
      Zinv[j] = llt.solve(Matrix::Identity(blk.n, blk.n));
      const auto s = static_cast<Eigen::Index>(blk.vars.size());
      if (s == 0) continue;
      Matrix T(blk.n * blk.n, s);
      for (Eigen::Index a = 0; a < s; ++a) {
        Eigen::Map<const Matrix> Ai(blk.V.col(a).data(), blk.n, blk.n);
        Matrix t = X[j] * Ai * Zinv[j];
        T.col(a) = Eigen::Map<const Vector>(t.data(), t.size());
      }
      const Matrix Mj = blk.V.transpose() * T;
      for (Eigen::Index a = 0; a < s; ++a) {
        for (Eigen::Index c = 0; c < s; ++c) M(blk.vars[a], blk.vars[c]) += 0.5 * (Mj(a, c) + Mj(c, a));
      }
    }
    if (!slack_ok) {
      breakdown = "dual slack lost definiteness";
      break;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!used[static_cast<std::size_t>(i)]) M(i, i) = 1.0;
    }
    Eigen::LLT<Matrix> Mllt(M);
    Eigen::LDLT<Matrix> Mldlt;
    const bool use_llt = Mllt.info() == Eigen::Success;
    if (!use_llt) {
      Mldlt.compute(M);
      if (Mldlt.info() != Eigen::Success) {
        breakdown = "Schur complement singular";
        break;
      }
    }
    auto solve_M = [&](const Vector& r) -> Vector { return use_llt ? Vector(Mllt.solve(r)) : Vector(Mldlt.solve(r)); };

    // one Newton solve for a given centering target and second-order correction
    auto direction = [&](double sigma_mu, const std::vector<Matrix>* corrX, const std::vector<Matrix>* corrZ) {
      std::vector<Matrix> G(nb);
      for (std::size_t j = 0; j < nb; ++j) {
        G[j] = -X[j] - sym(X[j] * Rd[j] * Zinv[j]);
        if (sigma_mu != 0.0) G[j] += sigma_mu * Zinv[j];
        if (corrX != nullptr) G[j] -= sym((*corrX)[j] * (*corrZ)[j] * Zinv[j]);
      }
      const Vector dy = solve_M(rp - apply_A(sf, G, m));
      for (std::size_t j = 0; j < nb; ++j) {
        const Matrix Atdy = apply_At(sf.blocks[j], dy);
        dZ[j] = Rd[j] - Atdy;
        dX[j] = G[j] + sym(X[j] * Atdy * Zinv[j]);
      }
      return dy;
    };
    auto step_lengths = [&]() {
      double ap = std::numeric_limits<double>::infinity();
      double ad = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < nb; ++j) {
        ap = std::min(ap, max_step(X[j], dX[j]));
        ad = std::min(ad, max_step(Z[j], dZ[j]));
      }
      return std::pair{ap, ad};
    };

    // predictor
    direction(0.0, nullptr, nullptr);
    auto [ap_max, ad_max] = step_lengths();
    const double ap = std::min(1.0, ap_max);
    const double ad = std::min(1.0, ad_max);
    double gap_aff = 0.0;
    for (std::size_t j = 0; j < nb; ++j) gap_aff += inner(X[j] + ap * dX[j], Z[j] + ad * dZ[j]);
    const double expo = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    const double sigma = std::min(1.0, std::pow(std::max(gap_aff, 0.0) / gap, expo));
    dXp = dX;
    dZp = dZ;

    // corrector
    const Vector dy = direction(sigma * mu, &dXp, &dZp);
    auto [cp_max, cd_max] = step_lengths();
    const double frac = 0.9 + 0.09 * std::min(ap, ad);
    const double alpha_p = std::min(1.0, frac * cp_max);
    const double alpha_d = std::min(1.0, frac * cd_max);
    if (!(alpha_p > 0.0) || !(alpha_d > 0.0)) {
      breakdown = "zero step length";
      break;
    }

    for (std::size_t j = 0; j < nb; ++j) {
      X[j] = sym(X[j] + alpha_p * dX[j]);
      Z[j] = sym(Z[j] + alpha_d * dZ[j]);
    }
    y += alpha_d * dy;

    // stagnation guard
    if (relgap < 0.999 * best_gap || pinf < 0.999 * best_pinf || dinf < 0.999 * best_dinf) {
      best_gap = std::min(best_gap, relgap);
      best_pinf = std::min(best_pinf, pinf);
      best_dinf = std::min(best_dinf, dinf);
      stalled = 0;
    } else if (++stalled > 20) {
      breakdown = "stalled";
      break;
    }
  }

  // breakdown or out of iterations: accept a loosely converged point, otherwise report
  if (sol.relative_gap < 1e3 * opts.gap_tol && sol.primal_infeasibility < 1e3 * opts.feas_tol &&
      sol.dual_infeasibility < 1e3 * opts.feas_tol) {
    return finish(SdpStatus::optimal, "converged to reduced accuracy");
  }
  return finish(SdpStatus::numerical_failure, "no convergence: " + breakdown);
}

FeasibilityAudit check_solution(const SdpProblem& problem, const Vector& x, double tol) {
  require(x.size() == problem.num_vars(), "check_solution: decision vector has wrong length");
  FeasibilityAudit audit;
  audit.worst = -std::numeric_limits<double>::infinity();
  for (const auto& blk : problem.blocks()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(blk.eval(x)) / blk.scale, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    audit.block_max_eigenvalue.push_back(lmax);
    audit.worst = std::max(audit.worst, lmax);
  }
  audit.feasible = audit.worst <= tol;
  return audit;
}

void write_sparse(const SdpProblem& problem, std::ostream& os) {
  os << "# vars " << problem.num_vars() << " blocks " << problem.blocks().size() << "\n";
  os << "# objective";
  for (Eigen::Index i = 0; i < problem.objective().size(); ++i) os << ' ' << problem.objective()(i);
  os << "\n";
  os.precision(17);
  for (std::size_t j = 0; j < problem.blocks().size(); ++j) {
    const auto& blk = problem.blocks()[j];
    auto emit = [&](int var, const Matrix& m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = r; c < m.cols(); ++c) {
          if (m(r, c) != 0.0) os << j + 1 << ' ' << var << ' ' << r + 1 << ' ' << c + 1 << ' ' << m(r, c) << "\n";
        }
      }
    };
    emit(0, blk.f0);
    for (const auto& t : blk.terms) emit(t.var + 1, t.coeff);
  }
}

}  // namespace lpviqc::sdp
