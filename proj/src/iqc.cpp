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

#include "lpviqc/iqc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace lpviqc {

std::string to_string(MultiplierKind kind) { return kind == MultiplierKind::pi1 ? "pi1" : "pi2"; }

MultiplierKind multiplier_kind_from_string(const std::string& name) {
  if (name == "pi1") return MultiplierKind::pi1;
  if (name == "pi2") return MultiplierKind::pi2;
  throw InvalidArgument("unknown multiplier kind '" + name + "'");
}

std::complex<double> MultiplierSpec::phi(double omega) const {
  const std::complex<double> s(0.0, omega * delay.tau_bar);
  return gain * (s * s + zero * s) / (s * s + damping * s + stiffness) + offset;
}

MultiplierSpec make_multiplier(MultiplierKind kind, const DelaySpec& delay, const ShapingConstants& shaping) {
  delay.validate();
  MultiplierSpec m;
  m.kind = kind;
  m.delay = delay;
  m.shaping = shaping;
  if (kind == MultiplierKind::pi1) {
    if (!(delay.r < 1.0)) throw InvalidArgument("pi1 requires r<1");
    require(shaping.c1 > 0.0, "pi1 requires c1>0");
    require(shaping.epsilon > 0.0, "pi1 requires epsilon>0");
    const double k1 = 1.0 + 1.0 / std::sqrt(1.0 - delay.r);
    if (!(shaping.c1 < 2.0 * k1)) throw InvalidArgument("pi1 requires c1<2*k1");
    m.gain = k1;
    m.zero = shaping.c1;
    m.damping = std::sqrt(2.0 * k1 * shaping.c1);
    m.stiffness = k1 * shaping.c1;
    m.offset = shaping.epsilon;
  } else {
    if (!(delay.r < 2.0)) throw InvalidArgument("pi2 requires r<2");
    require(shaping.delta > 0.0, "pi2 requires delta>0");
    const double b2 = std::sqrt(50.0);
    m.gain = std::sqrt(8.0 / (2.0 - delay.r));
    m.zero = std::sqrt(12.5);
    m.damping = std::sqrt(6.5 + 2.0 * b2);
    m.stiffness = b2;
    m.offset = shaping.delta;
  }
  return m;
}

std::vector<MultiplierSpec> select_multipliers(const DelaySpec& delay, const ShapingConstants& shaping) {
  std::vector<MultiplierSpec> out;
  if (delay.r <= 0.5) out.push_back(make_multiplier(MultiplierKind::pi1, delay, shaping));
  out.push_back(make_multiplier(MultiplierKind::pi2, delay, shaping));
  return out;
}

MultiplierRealization realize_filter(std::span<const MultiplierSpec> specs, std::size_t n_x) {
  require(!specs.empty(), "realize_filter: at least one multiplier is required");
  require(n_x > 0, "realize_filter: n_x must be positive");
  const auto N = static_cast<Eigen::Index>(specs.size());
  const auto nx = static_cast<Eigen::Index>(n_x);
  const Eigen::Index per_channel = 2 * N;
  const Eigen::Index n_psi = per_channel * nx;

  MultiplierRealization out;
  out.n_x = n_x;
  out.specs.assign(specs.begin(), specs.end());
  out.A = Matrix::Zero(n_psi, n_psi);
  out.B1 = Matrix::Zero(n_psi, nx);
  out.B2 = Matrix::Zero(n_psi, nx);

  // one channel's worth: companion blocks for each multiplier, driven by the channel signal
  Matrix A_ch = Matrix::Zero(per_channel, per_channel);
  Vector b_ch = Vector::Zero(per_channel);
  std::vector<Eigen::RowVectorXd> c_ch(specs.size(), Eigen::RowVectorXd::Zero(per_channel));
  for (Eigen::Index k = 0; k < N; ++k) {
    const MultiplierSpec& m = specs[static_cast<std::size_t>(k)];
    m.delay.validate();
    const double T = m.delay.tau_bar;
    const Eigen::Index o = 2 * k;
    A_ch(o, o + 1) = 1.0;
    A_ch(o + 1, o) = -m.stiffness / (T * T);
    A_ch(o + 1, o + 1) = -m.damping / T;
    b_ch(o + 1) = 1.0;
    c_ch[static_cast<std::size_t>(k)](o) = -m.gain * m.stiffness / (T * T);
    c_ch[static_cast<std::size_t>(k)](o + 1) = m.gain * (m.zero - m.damping) / T;
  }

  for (Eigen::Index i = 0; i < nx; ++i) {
    out.A.block(i * per_channel, i * per_channel, per_channel, per_channel) = A_ch;
    out.B1.block(i * per_channel, i, per_channel, 1) = b_ch;
  }
  for (Eigen::Index k = 0; k < N; ++k) {
    const MultiplierSpec& m = specs[static_cast<std::size_t>(k)];
    Matrix C = Matrix::Zero(2 * nx, n_psi);
    Matrix D1 = Matrix::Zero(2 * nx, nx);
    Matrix D2 = Matrix::Zero(2 * nx, nx);
    for (Eigen::Index i = 0; i < nx; ++i) {
      C.block(i, i * per_channel, 1, per_channel) = c_ch[static_cast<std::size_t>(k)];
    }
    D1.topRows(nx) = (m.gain + m.offset) * Matrix::Identity(nx, nx);
    D2.bottomRows(nx) = Matrix::Identity(nx, nx);
    out.C.push_back(std::move(C));
    out.D1.push_back(std::move(D1));
    out.D2.push_back(std::move(D2));
  }
  return out;
}

ComplexMatrix freq_response(const MultiplierRealization& realization, std::size_t k, double omega) {
  require(k < realization.count(), "freq_response: multiplier index out of range");
  require(std::isfinite(omega), "freq_response: frequency must be finite");
  const Eigen::Index n = realization.n_psi();
  const auto nx = static_cast<Eigen::Index>(realization.n_x);
  ComplexMatrix sI_A = std::complex<double>(0.0, omega) * ComplexMatrix::Identity(n, n) -
                       realization.A.cast<std::complex<double>>();
  Matrix B(n, 2 * nx);
  B << realization.B1, realization.B2;
  Matrix D(2 * nx, 2 * nx);
  D << realization.D1[k], realization.D2[k];
  ComplexMatrix X = sI_A.partialPivLu().solve(B.cast<std::complex<double>>());
  return D.cast<std::complex<double>>() + realization.C[k].cast<std::complex<double>>() * X;
}

std::complex<double> channel_response(const MultiplierRealization& realization, std::size_t k, double omega) {
  return freq_response(realization, k, omega)(0, 0);
}

std::vector<double> log_frequency_grid(double tau_bar, int count, double decades_below, double decades_above) {
  require(tau_bar > 0.0 && count >= 2, "log_frequency_grid: invalid arguments");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double lo = -decades_below;
  const double hi = decades_above;
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = std::pow(10.0, lo + (hi - lo) * i / (count - 1)) / tau_bar;
  }
  return out;
}

bool is_hurwitz(const Matrix& A, double margin) {
  if (A.size() == 0) return true;
  Eigen::EigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success) return false;
  return (es.eigenvalues().real().array() < -margin).all();
}

FactorizationReport verify_spectral_factorization(const MultiplierSpec& spec,
                                                  const MultiplierRealization& realization, std::size_t k,
                                                  std::span<const double> omegas, double tol) {
  require(k < realization.count(), "verify_spectral_factorization: multiplier index out of range");
  const auto nx = static_cast<Eigen::Index>(realization.n_x);
  FactorizationReport rep;

  Matrix W = Matrix::Identity(2 * nx, 2 * nx);
  W.bottomRightCorner(nx, nx) *= -1.0;
  for (double w : omegas) {
    const ComplexMatrix Psi = freq_response(realization, k, w);
    const ComplexMatrix lhs = Psi.adjoint() * W * Psi;
    ComplexMatrix rhs = ComplexMatrix::Zero(2 * nx, 2 * nx);
    rhs.topLeftCorner(nx, nx) = std::norm(spec.phi(w)) * ComplexMatrix::Identity(nx, nx);
    rhs.bottomRightCorner(nx, nx) = -ComplexMatrix::Identity(nx, nx);
    const double err = (lhs - rhs).cwiseAbs().maxCoeff();
    if (err >= rep.max_error) {
      rep.max_error = err;
      rep.worst_omega = w;
    }
  }

  rep.factor_stable = is_hurwitz(realization.A);
  // Psi_k is square with invertible feedthrough; inverse state matrix A - B D^{-1} C
  Matrix B(realization.n_psi(), 2 * nx);
  B << realization.B1, realization.B2;
  Matrix D(2 * nx, 2 * nx);
  D << realization.D1[k], realization.D2[k];
  Eigen::FullPivLU<Matrix> lu(D);
  if (lu.isInvertible()) {
    const Matrix A_inv = realization.A - B * lu.solve(realization.C[k]);
    rep.inverse_stable = is_hurwitz(A_inv);
  }
  rep.pass = rep.max_error <= tol && rep.factor_stable && rep.inverse_stable;
  return rep;
}

double HardIqcReport::worst() const {
  if (min_running_integral.empty()) return 0.0;
  return *std::min_element(min_running_integral.begin(), min_running_integral.end());
}

namespace {

Vector delayed_input(const VectorSignal& v, double t, double tau, Eigen::Index n) {
  const double arg = t - tau;
  if (arg < 0.0) return Vector::Zero(n);
  return v(arg);
}

}  // namespace

HardIqcReport check_hard_iqc_empirical(const MultiplierRealization& realization, const VectorSignal& v,
                                       const ScalarSignal& tau, const DelaySpec& delay_class, double horizon,
                                       double step) {
  require(horizon > 0.0 && step > 0.0, "check_hard_iqc_empirical: horizon and step must be positive");
  delay_class.validate();
  const auto nx = static_cast<Eigen::Index>(realization.n_x);
  const Eigen::Index n_psi = realization.n_psi();
  const auto N = static_cast<Eigen::Index>(realization.count());
  const auto steps = static_cast<long>(std::ceil(horizon / step - 1e-9));

  // class check on the node grid
  const double rate_tol = 1e-9 * std::max(1.0, delay_class.r);
  double prev_tau = tau(0.0);
  for (long i = 0; i <= steps; ++i) {
    const double t = std::min(horizon, i * step);
    const double tt = tau(t);
    if (!(tt >= -1e-12 && tt <= delay_class.tau_bar + 1e-12)) {
      throw ClassViolation("delay trajectory leaves [0, tau_bar] at t=" + std::to_string(t));
    }
    if (i > 0 && std::abs(tt - prev_tau) > (delay_class.r + rate_tol) * step + 1e-12) {
      throw ClassViolation("delay trajectory rate exceeds r near t=" + std::to_string(t));
    }
    prev_tau = tt;
  }

  // state: [x_psi; J_0..J_{N-1}; E] where J_k is the running IQC integral, E the input energy
  const Eigen::Index dim = n_psi + N + 1;
  auto rhs = [&](double t, const Vector& s) {
    const Vector vt = v(t);
    const double tt = tau(t);
    const Vector w = tt <= 0.0 ? Vector::Zero(nx) : Vector(vt - delayed_input(v, t, tt, nx));
    const Vector xpsi = s.head(n_psi);
    Vector ds(dim);
    ds.head(n_psi) = realization.A * xpsi + realization.B1 * vt + realization.B2 * w;
    for (Eigen::Index k = 0; k < N; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const Vector zbar = realization.Cbar(kk) * xpsi + realization.D1bar(kk) * vt + realization.D2bar(kk) * w;
      ds(n_psi + k) = zbar.squaredNorm() - w.squaredNorm();
    }
    ds(dim - 1) = vt.squaredNorm();
    return ds;
  };

  HardIqcReport rep;
  rep.min_running_integral.assign(static_cast<std::size_t>(N), 0.0);
  Vector s = Vector::Zero(dim);
  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    const double h = std::min(step, horizon - t);
    const Vector k1 = rhs(t, s);
    const Vector k2 = rhs(t + 0.5 * h, s + 0.5 * h * k1);
    const Vector k3 = rhs(t + 0.5 * h, s + 0.5 * h * k2);
    const Vector k4 = rhs(t + h, s + h * k3);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    for (Eigen::Index k = 0; k < N; ++k) {
      auto& m = rep.min_running_integral[static_cast<std::size_t>(k)];
      m = std::min(m, s(n_psi + k));
    }
  }
  rep.input_energy = s(dim - 1);
  return rep;
}

AdmissiblePair random_admissible_pair(const DelaySpec& cls, std::size_t n_x, std::uint64_t seed) {
  cls.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tb = cls.tau_bar;
  constexpr int kTerms = 4;
  Matrix amp(static_cast<Eigen::Index>(n_x), kTerms), freq(static_cast<Eigen::Index>(n_x), kTerms),
      phase(static_cast<Eigen::Index>(n_x), kTerms);
  for (Eigen::Index i = 0; i < amp.rows(); ++i) {
    for (int m = 0; m < kTerms; ++m) {
      amp(i, m) = 2.0 * unit(rng) - 1.0;
      freq(i, m) = std::pow(10.0, -1.0 + 2.0 * unit(rng)) / tb;  // [0.1, 10] / tau_bar
      phase(i, m) = 2.0 * std::numbers::pi * unit(rng);
    }
  }
  const double decay = (2.0 + 8.0 * unit(rng)) * tb;  // envelope keeps the energy finite

  const double c = tb * (0.05 + 0.9 * unit(rng));
  double a = std::min(c, tb - c) * unit(rng);
  double omega = 0.0;
  if (cls.r > 0.0 && a > 0.0) {
    omega = cls.r / a * unit(rng);
  } else {
    a = 0.0;
  }
  const double ph = 2.0 * std::numbers::pi * unit(rng);

  AdmissiblePair pair;
  pair.horizon = 20.0 * tb;
  pair.step = tb / 400.0;
  if (omega > 0.0) pair.step = std::min(pair.step, 0.05 / omega);
  for (Eigen::Index i = 0; i < amp.rows(); ++i) {
    for (int m = 0; m < kTerms; ++m) pair.step = std::min(pair.step, 0.05 / freq(i, m));
  }
  pair.v = [amp, freq, phase, decay](double t) {
    Vector out = Vector::Zero(amp.rows());
    if (t < 0.0) return out;
    const double env = std::exp(-t / decay);
    for (Eigen::Index i = 0; i < amp.rows(); ++i) {
      for (Eigen::Index m = 0; m < amp.cols(); ++m) out[i] += amp(i, m) * std::sin(freq(i, m) * t + phase(i, m));
    }
    return Vector(env * out);
  };
  pair.tau = [c, a, omega, ph](double t) { return c + a * std::sin(omega * t + ph); };
  return pair;
}

IqcValidationReport validate_iqc(const DelaySpec& delay, std::span<const MultiplierKind> kinds,
                                 const ShapingConstants& shaping, std::size_t pairs, std::uint64_t seed,
                                 std::size_t n_x, double factorization_tol, double iqc_tol) {
  delay.validate();
  require(n_x >= 1, "validate_iqc: n_x must be positive");
  IqcValidationReport rep;
  rep.delay = delay;
  rep.pass = true;
  const std::vector<double> omegas = log_frequency_grid(delay.tau_bar);
  for (std::size_t j = 0; j < kinds.size(); ++j) {
    const MultiplierSpec spec = make_multiplier(kinds[j], delay, shaping);
    const std::vector<MultiplierSpec> one{spec};
    const MultiplierRealization real = realize_filter(one, n_x);
    MultiplierValidation mv;
    mv.kind = kinds[j];
    mv.hurwitz = is_hurwitz(real.A, 1e-9);
    mv.factorization = verify_spectral_factorization(spec, real, 0, omegas, factorization_tol);
    mv.worst_normalized_integral = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < pairs; ++p) {
      // independent stream per (multiplier, pair)
      const AdmissiblePair pr = random_admissible_pair(delay, n_x, seed + 1000003ULL * j + p);
      const HardIqcReport h = check_hard_iqc_empirical(real, pr.v, pr.tau, delay, pr.horizon, pr.step);
      if (h.input_energy > 0.0) {
        mv.worst_normalized_integral = std::min(mv.worst_normalized_integral, h.worst() / h.input_energy);
      }
      ++mv.pairs;
    }
    if (pairs == 0) mv.worst_normalized_integral = 0.0;
    mv.pass = mv.hurwitz && mv.factorization.pass && mv.worst_normalized_integral >= -iqc_tol;
    rep.pass = rep.pass && mv.pass;
    rep.multipliers.push_back(mv);
  }
  return rep;
}

}  // namespace lpviqc
