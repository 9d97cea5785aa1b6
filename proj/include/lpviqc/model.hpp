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

#include "lpviqc/iqc.hpp"
#include "lpviqc/param.hpp"

namespace lpviqc {

struct PlantDims {
  Eigen::Index nx = 0;
  Eigen::Index nd = 0;
  Eigen::Index nu = 0;
  Eigen::Index ne = 0;
};

/// State-delayed LPV plant
///
///   dx/dt = Ap x + Ad x(t - tau) + Bp1 d + Bp2 u
///   e     = Cp1 x + Cd1 x(t - tau) + Dp11 d + Dp12 u
struct DelayedLpvPlant {
  ParamMatrix Ap, Ad, Bp1, Bp2;
  ParamMatrix Cp1, Cd1, Dp11, Dp12;
  PlantDims dims;
  DelaySpec delay;
  ParameterDomain domain;

  /// Throws InvalidArgument on inconsistent shapes or parameter dimensions.
  void validate() const;
};

/// The two-state benchmark plant with phi = 0.2, sigma = 0.1 and rho in [-1, 1].
DelayedLpvPlant example_plant(const DelaySpec& delay, double rate_bound = 0.0, double phi = 0.2,
                              double sigma = 0.1);

/// Delay-free part after pulling out w = x - x(t - tau):
///
///   dx/dt = A x + Bw w + Bd d + Bu u,   e = C x + Dw w + Dd d + Du u
struct NominalSystem {
  ParamMatrix A, Bw, Bd, Bu;
  ParamMatrix C, Dw, Dd, Du;
  PlantDims dims;
};

NominalSystem nominal_interconnection(const DelayedLpvPlant& plant);

/// Nominal system in series with the IQC filter. State x_cl = [x_p; x_psi],
/// inputs (w, d, u), outputs zbar (stacked over multipliers) and e.
struct AugmentedSystem {
  ParamMatrix A;   // A_aug
  ParamMatrix B0;  // w channel
  ParamMatrix B1;  // d channel
  ParamMatrix B2;  // u channel
  Matrix C0;       // stacked [D1bar_k Cbar_k], LTI
  Matrix D00;      // stacked D2bar_k, LTI
  ParamMatrix C1;  // e row
  ParamMatrix D10, D11, D12;

  PlantDims dims;
  Eigen::Index n_psi = 0;
  std::size_t n_multipliers = 0;

  Eigen::Index n_cl() const { return dims.nx + n_psi; }
};

AugmentedSystem augment_with_filter(const NominalSystem& nominal, const MultiplierRealization& realization);

/// Closed loop at one parameter point for u = F [x_p; x_psi] + H w.
struct ClosedLoopRealization {
  Matrix A, B1, B2;
  std::vector<Matrix> C1, D11, D12;  // full 2n_x-row z_k maps
  Matrix C2, D21, D22;

  Matrix C1bar(std::size_t k) const { return C1[k].topRows(C1[k].rows() / 2); }
  Matrix D11bar(std::size_t k) const { return D11[k].topRows(D11[k].rows() / 2); }
  Matrix D12bar(std::size_t k) const { return D12[k].topRows(D12[k].rows() / 2); }
};

ClosedLoopRealization close_loop(const AugmentedSystem& aug, const Matrix& F, const Matrix& H, const Vector& rho);

}  // namespace lpviqc
