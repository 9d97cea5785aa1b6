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

#include "lpviqc/affine.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lpviqc::sdp {

/// One matrix inequality F0 + sum_i x_i F_i < 0, stored unscaled.
struct LmiBlock {
  std::string label;
  Matrix f0;
  std::vector<AffineMatrix::Term> terms;
  /// Normalization: max |F0| entry, or 1 when F0 vanishes.
  double scale = 1.0;

  Eigen::Index size() const { return f0.rows(); }
  Matrix eval(const Vector& x) const;
};

/// minimize c^T x  subject to  F_j(x) <= -strictness * scale_j * I  for every block j.
///
/// Matrix-valued unknowns are flattened into scalar variables; symmetric
/// variables only allocate their upper triangle, so symmetry holds by construction.
class SdpProblem {
 public:
  int add_scalar(const std::string& name);
  AffineMatrix scalar_variable(const std::string& name);
  AffineMatrix add_symmetric(Eigen::Index n, const std::string& name);
  AffineMatrix add_full(Eigen::Index rows, Eigen::Index cols, const std::string& name);

  void set_objective(int var, double coeff);

  /// expr < 0 (expr is symmetrized first).
  void add_negative_definite(const AffineMatrix& expr, const std::string& label);
  /// expr > 0
  void add_positive_definite(const AffineMatrix& expr, const std::string& label);

  int num_vars() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& var_names() const { return names_; }
  const Vector& objective() const { return objective_; }
  const std::vector<LmiBlock>& blocks() const { return blocks_; }

 private:
  std::vector<std::string> names_;
  Vector objective_;
  std::vector<LmiBlock> blocks_;
};

enum class SdpStatus { optimal, infeasible, numerical_failure };

std::string to_string(SdpStatus status);

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  /// Certificate threshold for declaring the LMI system infeasible.
  double infeas_tol = 1e-8;
  int max_iter = 200;
  /// Strict inequalities become F <= -strictness * scale * I.
  double strictness = 1e-7;
  bool verbose = false;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::numerical_failure;
  Vector x;
  double objective = 0.0;
  /// Largest normalized eigenvalue over all blocks, max_j lambda_max(F_j(x) / scale_j).
  double worst_margin = 0.0;
  int iterations = 0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  std::string message;
};

SdpSolution solve_sdp(const SdpProblem& problem, const SolverOptions& options = {});

struct FeasibilityAudit {
  std::vector<double> block_max_eigenvalue;  // normalized by block scale
  double worst = 0.0;
  bool feasible = false;
};

/// Independent audit of x: symmetric eigensolver on every normalized block.
FeasibilityAudit check_solution(const SdpProblem& problem, const Vector& x, double tol);

/// Sparse text dump, one line per stored upper-triangular entry:
/// `block var row col value`, one-based block/row/col; var 0 is F0 and var i >= 1 is x_{i-1}.
void write_sparse(const SdpProblem& problem, std::ostream& os);

}  // namespace lpviqc::sdp
