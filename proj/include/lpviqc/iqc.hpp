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

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lpviqc {

enum class MultiplierKind { pi1, pi2 };

std::string to_string(MultiplierKind kind);
MultiplierKind multiplier_kind_from_string(const std::string& name);

struct ShapingConstants {
  double c1 = 1.0;
  double epsilon = 1e-7;
  double delta = 1e-4;
};

/// Delay multiplier diag(|phi(s)|^2 X, -X) for the delay-difference operator.
///
/// Both kinds share the shape
///   phi(s) = gain * (T^2 s^2 + zero * T s) / (T^2 s^2 + damping * T s + stiffness) + offset
/// with T = tau_bar. For pi1: gain = k1, zero = c1, damping = a1, stiffness = k1 c1,
/// offset = epsilon. For pi2: gain = k2, zero = c2, damping = a2, stiffness = b2,
/// offset = delta.
struct MultiplierSpec {
  MultiplierKind kind = MultiplierKind::pi2;
  DelaySpec delay;
  ShapingConstants shaping;

  double gain = 0.0;
  double zero = 0.0;
  double damping = 0.0;
  double stiffness = 0.0;
  double offset = 0.0;

  /// Closed-form phi(j omega).
  std::complex<double> phi(double omega) const;
};

MultiplierSpec make_multiplier(MultiplierKind kind, const DelaySpec& delay,
                               const ShapingConstants& shaping = {});

/// Both multipliers for r <= 0.5, pi2 alone above that.
std::vector<MultiplierSpec> select_multipliers(const DelaySpec& delay, const ShapingConstants& shaping = {});

/// State-space realization of the stacked factors Psi_k, k = 0..N-1:
///
///   d/dt x_psi = A x_psi + B1 x_p + B2 w
///   z_k        = C_k x_psi + D1_k x_p + D2_k w
///
/// Each z_k has 2 n_x rows; the bottom n_x rows of (C_k, D1_k, D2_k) are (0, 0, I)
/// so that z_k = [zbar_k; w]. States are grouped per signal channel: channel i
/// owns 2N consecutive states, two per multiplier.
struct MultiplierRealization {
  std::size_t n_x = 0;
  std::vector<MultiplierSpec> specs;
  Matrix A;
  Matrix B1;
  Matrix B2;
  std::vector<Matrix> C;
  std::vector<Matrix> D1;
  std::vector<Matrix> D2;

  std::size_t count() const { return specs.size(); }
  Eigen::Index n_psi() const { return A.rows(); }

  /// Top n_x rows of C_k, D1_k, D2_k.
  Matrix Cbar(std::size_t k) const { return C[k].topRows(static_cast<Eigen::Index>(n_x)); }
  Matrix D1bar(std::size_t k) const { return D1[k].topRows(static_cast<Eigen::Index>(n_x)); }
  Matrix D2bar(std::size_t k) const { return D2[k].topRows(static_cast<Eigen::Index>(n_x)); }
};

MultiplierRealization realize_filter(std::span<const MultiplierSpec> specs, std::size_t n_x);

/// Psi_k(j omega) = D_k + C_k (j omega I - A)^{-1} [B1 B2], a 2n_x x 2n_x matrix.
ComplexMatrix freq_response(const MultiplierRealization& realization, std::size_t k, double omega);

/// Scalar channel transfer function of Psi_{11,k}, read from channel 0 of the realization.
std::complex<double> channel_response(const MultiplierRealization& realization, std::size_t k, double omega);

/// 100 log-spaced frequencies over [1e-3, 1e3] / tau_bar by default.
std::vector<double> log_frequency_grid(double tau_bar, int count = 100, double decades_below = 3.0,
                                       double decades_above = 3.0);

bool is_hurwitz(const Matrix& A, double margin = 0.0);

struct FactorizationReport {
  double max_error = 0.0;
  double worst_omega = 0.0;
  bool factor_stable = false;
  bool inverse_stable = false;
  bool pass = false;
};

/// Checks Psi_k^~ W Psi_k against diag(|phi|^2 I, -I) (X slot set to identity) on
/// the frequency grid, and that Psi_k and Psi_k^{-1} have Hurwitz state matrices.
FactorizationReport verify_spectral_factorization(const MultiplierSpec& spec,
                                                  const MultiplierRealization& realization, std::size_t k,
                                                  std::span<const double> omegas, double tol = 1e-6);

using VectorSignal = std::function<Vector(double)>;
using ScalarSignal = std::function<double(double)>;

struct HardIqcReport {
  /// min over T' <= T of int_0^T' z_k^T W_k z_k dt, one entry per multiplier
  std::vector<double> min_running_integral;
  /// int_0^T |v|^2 dt
  double input_energy = 0.0;

  double worst() const;
};

/// Drives the filter with v and w = v - v(t - tau(t)) (v = 0 for negative time)
/// and tracks the running IQC integral with X = I. RK4 with step h.
/// Throws ClassViolation if tau leaves [0, tau_bar] or its rate exceeds r.
HardIqcReport check_hard_iqc_empirical(const MultiplierRealization& realization, const VectorSignal& v,
                                       const ScalarSignal& tau, const DelaySpec& delay_class, double horizon,
                                       double step);

/// A random (v, tau) pair inside the delay class: v a sum of sinusoids per channel,
/// tau a sinusoid (or constant when r = 0) within [0, tau_bar] with |tau'| <= r.
struct AdmissiblePair {
  VectorSignal v;
  ScalarSignal tau;
  double horizon = 0.0;
  double step = 0.0;
};

AdmissiblePair random_admissible_pair(const DelaySpec& delay_class, std::size_t n_x, std::uint64_t seed);

struct MultiplierValidation {
  MultiplierKind kind = MultiplierKind::pi2;
  FactorizationReport factorization;
  bool hurwitz = false;
  /// min over pairs and channels of the running integral divided by the input energy
  double worst_normalized_integral = 0.0;
  std::size_t pairs = 0;
  bool pass = false;
};

struct IqcValidationReport {
  DelaySpec delay;
  std::vector<MultiplierValidation> multipliers;
  bool pass = false;
};

/// Factorization identity on the default frequency grid plus the empirical hard-IQC check
/// over `pairs` random admissible pairs, for each requested multiplier.
IqcValidationReport validate_iqc(const DelaySpec& delay, std::span<const MultiplierKind> kinds,
                                 const ShapingConstants& shaping, std::size_t pairs, std::uint64_t seed,
                                 std::size_t n_x = 1, double factorization_tol = 1e-6, double iqc_tol = 1e-6);

}  // namespace lpviqc
