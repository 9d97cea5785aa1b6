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

#include "lpviqc/model.hpp"
#include "lpviqc/sdp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lpviqc {

enum class GammaMode { minimize, fixed };

/// How the multiplier variables X̂_k enter the w-w block of the synthesis LMI.
///   pooled:          -(X̂ + X̂^T) + sum_k X̂_k
///   per_multiplier:  -sum_k (X̂ + X̂^T - X̂_k)
/// Both coincide for a single multiplier.
enum class WBlockCoupling { pooled, per_multiplier };

std::string to_string(WBlockCoupling c);
WBlockCoupling coupling_from_string(const std::string& name);

struct SynthesisConfig {
  std::vector<Monomial> r_basis;  // f_i, must contain the constant
  std::vector<Monomial> x_basis;  // g_i, shared by X̂ and X̂_k
  std::vector<int> grid_counts;   // points per parameter component
  std::vector<MultiplierKind> multipliers;  // empty: select by r
  ShapingConstants shaping;
  GammaMode gamma_mode = GammaMode::minimize;
  double fixed_gamma = 0.0;
  double recovery_margin = 0.01;
  WBlockCoupling coupling = WBlockCoupling::pooled;
  double nullspace_tol = 1e-9;
  sdp::SolverOptions solver;

  /// Constant R, X̂, X̂_k.
  static SynthesisConfig quadratic(std::size_t dimension, int grid_points = 11);
  /// R over monomials up to r_degree, X̂ and X̂_k up to x_degree.
  static SynthesisConfig parameter_dependent(std::size_t dimension, int r_degree = 2, int x_degree = 1,
                                             int grid_points = 11);

  void validate(std::size_t dimension) const;
};

/// Orthonormal basis of ker(M); singular values below tol * sigma_max count as zero.
Matrix nullspace_basis(const Matrix& M, double tol = 1e-9);

MultiplierRealization build_realization(const DelayedLpvPlant& plant, const SynthesisConfig& config);

/// Piecewise-multilinear schedule of gains over the tensor grid.
struct GainSchedule {
  ParameterDomain domain;
  std::vector<int> counts;
  std::vector<Vector> points;
  std::vector<Matrix> F;
  std::vector<Matrix> H;

  bool empty() const { return F.empty(); }
  /// Interpolated (F, H); rho is clamped to the box.
  std::pair<Matrix, Matrix> at(const Vector& rho) const;
};

struct GridDiagnostic {
  Vector rho;
  double lmi1_margin = 0.0;      // worst normalized max eigenvalue over rate vertices (< 0 is good)
  double lmi2_margin = 0.0;
  double r_min_eig = 0.0;
  double recovery_margin = 0.0;  // worst (temp) max eigenvalue after recovery
  double gain_norm = 0.0;        // ||[F̂ Ĥ]||
  bool lmi1_vacuous = false;
};

struct SynthesisResult {
  sdp::SdpStatus status = sdp::SdpStatus::numerical_failure;
  std::string message;
  double gamma = 0.0;

  DelaySpec delay;
  std::vector<MultiplierKind> multipliers;
  ShapingConstants shaping;
  WBlockCoupling coupling = WBlockCoupling::pooled;
  std::vector<Monomial> r_basis;
  std::vector<Monomial> x_basis;
  std::vector<int> grid_counts;

  std::vector<Matrix> R;                  // per f_i
  std::vector<Matrix> Xhat;               // per g_i
  std::vector<std::vector<Matrix>> Xhat_k;  // [k][i]

  GainSchedule gains;
  std::vector<GridDiagnostic> diagnostics;
  int iterations = 0;

  bool ok() const { return status == sdp::SdpStatus::optimal; }
  Matrix R_at(const Vector& rho) const;
  Matrix R_derivative(const Vector& rho, std::size_t j) const;
  Matrix Xhat_at(const Vector& rho) const;
  Matrix Xhat_k_at(std::size_t k, const Vector& rho) const;
};

/// Assembled synthesis SDP with handles to its matrix unknowns.
struct SynthesisSdp {
  sdp::SdpProblem problem;
  std::vector<sdp::AffineMatrix> R;
  std::vector<sdp::AffineMatrix> Xhat;
  std::vector<std::vector<sdp::AffineMatrix>> Xhat_k;
  int gamma_var = -1;  // -1 when gamma is fixed
  std::vector<Vector> grid;
  std::vector<Vector> rates;
  std::size_t lmi1_blocks = 0;
  std::size_t lmi2_blocks = 0;
  std::size_t positivity_blocks = 0;
  std::size_t vacuous_points = 0;
  // per block: grid index and kind (0 LMI1, 1 LMI2, 2 positivity)
  std::vector<std::size_t> block_point;
  std::vector<int> block_kind;
};

/// Rate vertices actually needed: just the origin when R does not depend on rho.
std::vector<Vector> synthesis_rates(const DelayedLpvPlant& plant, const std::vector<Monomial>& r_basis);

SynthesisSdp assemble_synthesis_sdp(const DelayedLpvPlant& plant, const MultiplierRealization& realization,
                                    const SynthesisConfig& config);

/// Solves the synthesis SDP; gains are left empty.
SynthesisResult minimize_gamma(const DelayedLpvPlant& plant, const MultiplierRealization& realization,
                               const SynthesisConfig& config);

/// The full synthesis LMI with the controller variables [F̂ Ĥ] left free, at one
/// (rho, rate) pair and with the certificate matrices of `result` frozen.
/// K is the n_u x (n_cl + n_x) expression [F̂ Ĥ].
sdp::AffineMatrix recovery_lmi(const AugmentedSystem& aug, const SynthesisResult& result, const Vector& rho,
                               const Vector& rate, double gamma, const sdp::AffineMatrix& K);

/// Pointwise recovery of F_c = F̂ R^{-1}, H_c = Ĥ X̂^{-1} on the grid at gamma * (1 + margin).
/// Returns false (and fills result.message) when some grid point is infeasible.
bool recover_gains(const DelayedLpvPlant& plant, const MultiplierRealization& realization, SynthesisResult& result,
                   double margin, const sdp::SolverOptions& options = {});

/// Closed loop at every grid point of the schedule.
std::vector<ClosedLoopRealization> closed_loop_on_grid(const DelayedLpvPlant& plant,
                                                       const MultiplierRealization& realization,
                                                       const GainSchedule& gains);

struct AnalysisInput {
  std::vector<Vector> grid;
  std::vector<ClosedLoopRealization> closed_loop;  // one per grid point
  std::vector<Vector> rates;                       // rate vertices
  std::vector<Monomial> p_basis;
  std::vector<Monomial> x_basis;
};

struct AnalysisCertificate {
  sdp::SdpStatus status = sdp::SdpStatus::numerical_failure;
  std::string message;
  double gamma = 0.0;
  std::vector<Matrix> P;                 // per p_i
  std::vector<std::vector<Matrix>> X_k;  // [k][i]
  std::vector<double> margins;           // worst normalized eigenvalue per grid point

  bool feasible() const { return status == sdp::SdpStatus::optimal; }
};

/// Feasibility of the analysis LMI at a fixed gamma, or the smallest gamma when none is given.
AnalysisCertificate verify_analysis(const AnalysisInput& input, std::optional<double> gamma,
                                    const sdp::SolverOptions& options = {});

/// Analysis input for synthesized gains. P uses monomials up to p_degree; a negative value
/// picks 0 for a constant R basis and 4 otherwise.
AnalysisInput analysis_input(const DelayedLpvPlant& plant, const MultiplierRealization& realization,
                             const SynthesisResult& result, int p_degree = -1);

}  // namespace lpviqc
