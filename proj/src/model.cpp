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

#include "lpviqc/model.hpp"

namespace lpviqc {

namespace {

void check_shape(const ParamMatrix& m, Eigen::Index rows, Eigen::Index cols, std::size_t dim, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InvalidArgument(std::string("plant: ") + name + " must be " + std::to_string(rows) + "x" +
                          std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  }
  if (m.dimension() != dim) throw InvalidArgument(std::string("plant: ") + name + " has wrong parameter dimension");
}

// Stacks parameter matrices that share a column count.
ParamMatrix vstack(const ParamMatrix& top, const ParamMatrix& bottom) {
  require(top.cols() == bottom.cols(), "vstack: column mismatch");
  const Matrix upper = Matrix::Identity(top.rows() + bottom.rows(), top.rows());
  Matrix lower = Matrix::Zero(top.rows() + bottom.rows(), bottom.rows());
  lower.bottomRows(bottom.rows()).setIdentity();
  return upper * top + lower * bottom;
}

ParamMatrix hstack(const ParamMatrix& left, const ParamMatrix& right) {
  return vstack(left.transpose(), right.transpose()).transpose();
}

}  // namespace

void DelayedLpvPlant::validate() const {
  const auto [nx, nd, nu, ne] = dims;
  require(nx > 0 && nd > 0 && nu > 0 && ne > 0, "plant: all dimensions must be positive");
  delay.validate();
  const std::size_t s = domain.dimension();
  check_shape(Ap, nx, nx, s, "Ap");
  check_shape(Ad, nx, nx, s, "Ad");
  check_shape(Bp1, nx, nd, s, "Bp1");
  check_shape(Bp2, nx, nu, s, "Bp2");
  check_shape(Cp1, ne, nx, s, "Cp1");
  check_shape(Cd1, ne, nx, s, "Cd1");
  check_shape(Dp11, ne, nd, s, "Dp11");
  check_shape(Dp12, ne, nu, s, "Dp12");
}

DelayedLpvPlant example_plant(const DelaySpec& delay, double rate_bound, double phi, double sigma) {
  const std::size_t s = 1;
  const Monomial one = Monomial::constant(s);
  const Monomial rho({1});
  DelayedLpvPlant p;
  p.dims = {2, 1, 1, 2};
  p.delay = delay;
  p.domain = ParameterDomain({{-1.0, 1.0}}, {{-rate_bound, rate_bound}});

  Matrix m(2, 2);
  p.Ap = ParamMatrix(2, 2, s);
  m << 0, 1, -2, -3;
  p.Ap.add_term(one, m);
  m << 0, phi, 0, sigma;
  p.Ap.add_term(rho, m);

  p.Ad = ParamMatrix(2, 2, s);
  m << 0, 0.1, -0.2, -0.3;
  p.Ad.add_term(one, m);
  m << phi, 0, sigma, 0;
  p.Ad.add_term(rho, m);

  Matrix v(2, 1);
  v << 0.2, 0.2;
  p.Bp1 = ParamMatrix::constant(v, s);

  p.Bp2 = ParamMatrix(2, 1, s);
  v << 0.0, 0.1;
  p.Bp2.add_term(one, v);
  v << phi, sigma;
  p.Bp2.add_term(rho, v);

  m << 0, 10, 0, 0;
  p.Cp1 = ParamMatrix::constant(m, s);
  p.Cd1 = ParamMatrix::zero(2, 2, s);
  p.Dp11 = ParamMatrix::zero(2, 1, s);
  v << 0.0, 0.1;
  p.Dp12 = ParamMatrix::constant(v, s);
  p.validate();
  return p;
}

NominalSystem nominal_interconnection(const DelayedLpvPlant& plant) {
  plant.validate();
  NominalSystem n;
  n.dims = plant.dims;
  n.A = plant.Ap + plant.Ad;
  n.Bw = -plant.Ad;
  n.Bd = plant.Bp1;
  n.Bu = plant.Bp2;
  n.C = plant.Cp1 + plant.Cd1;
  n.Dw = -plant.Cd1;
  n.Dd = plant.Dp11;
  n.Du = plant.Dp12;
  return n;
}

AugmentedSystem augment_with_filter(const NominalSystem& nominal, const MultiplierRealization& realization) {
  const auto [nx, nd, nu, ne] = nominal.dims;
  if (static_cast<Eigen::Index>(realization.n_x) != nx || realization.B1.cols() != nx ||
      realization.B2.cols() != nx) {
    throw InvalidArgument("augment_with_filter: filter input width must be n_x + n_x");
  }
  const std::size_t s = nominal.A.dimension();
  const Eigen::Index np = realization.n_psi();
  const std::size_t N = realization.count();

  AugmentedSystem aug;
  aug.dims = nominal.dims;
  aug.n_psi = np;
  aug.n_multipliers = N;

  const ParamMatrix filter_row = hstack(ParamMatrix::constant(realization.B1, s), ParamMatrix::constant(realization.A, s));
  aug.A = vstack(hstack(nominal.A, ParamMatrix::zero(nx, np, s)), filter_row);
  aug.B0 = vstack(nominal.Bw, ParamMatrix::constant(realization.B2, s));
  aug.B1 = vstack(nominal.Bd, ParamMatrix::zero(np, nd, s));
  aug.B2 = vstack(nominal.Bu, ParamMatrix::zero(np, nu, s));

  aug.C0 = Matrix::Zero(static_cast<Eigen::Index>(N) * nx, nx + np);
  aug.D00 = Matrix::Zero(static_cast<Eigen::Index>(N) * nx, nx);
  for (std::size_t k = 0; k < N; ++k) {
    const auto row = static_cast<Eigen::Index>(k) * nx;
    aug.C0.block(row, 0, nx, nx) = realization.D1bar(k);
    aug.C0.block(row, nx, nx, np) = realization.Cbar(k);
    aug.D00.block(row, 0, nx, nx) = realization.D2bar(k);
  }
  aug.C1 = hstack(nominal.C, ParamMatrix::zero(ne, np, s));
  aug.D10 = nominal.Dw;
  aug.D11 = nominal.Dd;
  aug.D12 = nominal.Du;
  return aug;
}

ClosedLoopRealization close_loop(const AugmentedSystem& aug, const Matrix& F, const Matrix& H, const Vector& rho) {
  const auto [nx, nd, nu, ne] = aug.dims;
  const Eigen::Index ncl = aug.n_cl();
  if (F.rows() != nu || F.cols() != ncl) throw InvalidArgument("close_loop: F must be n_u x (n_x + n_psi)");
  if (H.rows() != nu || H.cols() != nx) throw InvalidArgument("close_loop: H must be n_u x n_x");

  const Matrix B2 = aug.B2.eval(rho);
  const Matrix D12 = aug.D12.eval(rho);
  ClosedLoopRealization cl;
  cl.A = aug.A.eval(rho) + B2 * F;
  cl.B1 = aug.B0.eval(rho) + B2 * H;
  cl.B2 = aug.B1.eval(rho);
  cl.C2 = aug.C1.eval(rho) + D12 * F;
  cl.D21 = aug.D10.eval(rho) + D12 * H;
  cl.D22 = aug.D11.eval(rho);
  for (std::size_t k = 0; k < aug.n_multipliers; ++k) {
    const auto row = static_cast<Eigen::Index>(k) * nx;
    Matrix C = Matrix::Zero(2 * nx, ncl);
    Matrix D11 = Matrix::Zero(2 * nx, nx);
    Matrix D12k = Matrix::Zero(2 * nx, nd);
    C.topRows(nx) = aug.C0.middleRows(row, nx);
    D11.topRows(nx) = aug.D00.middleRows(row, nx);
    D11.bottomRows(nx).setIdentity();
    cl.C1.push_back(std::move(C));
    cl.D11.push_back(std::move(D11));
    cl.D12.push_back(std::move(D12k));
  }
  return cl;
}

}  // namespace lpviqc
