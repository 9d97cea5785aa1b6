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

#include "lpviqc/ddesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace lpviqc {

Trajectory Trajectory::constant(double v) {
  Trajectory tr;
  tr.kind = Kind::constant;
  tr.value = v;
  return tr;
}

Trajectory Trajectory::sinusoid(double amplitude, double frequency, double phase, double offset) {
  Trajectory tr;
  tr.kind = Kind::sinusoid;
  tr.amplitude = amplitude;
  tr.frequency = frequency;
  tr.phase = phase;
  tr.value = offset;
  return tr;
}

Trajectory Trajectory::pulse(double amplitude, double start, double stop) {
  Trajectory tr;
  tr.kind = Kind::pulse;
  tr.value = amplitude;
  tr.start = start;
  tr.stop = stop;
  tr.validate();
  return tr;
}

Trajectory Trajectory::tabulated(std::vector<double> times, std::vector<double> values) {
  Trajectory tr;
  tr.kind = Kind::tabulated;
  tr.times = std::move(times);
  tr.values = std::move(values);
  tr.validate();
  return tr;
}

void Trajectory::validate() const {
  switch (kind) {
    case Kind::constant:
      require(std::isfinite(value), "trajectory: constant must be finite");
      break;
    case Kind::sinusoid:
      require(std::isfinite(amplitude) && std::isfinite(frequency) && std::isfinite(phase) && std::isfinite(value),
              "trajectory: sinusoid parameters must be finite");
      break;
    case Kind::pulse:
      require(std::isfinite(value) && start <= stop, "trajectory: pulse needs start <= stop");
      break;
    case Kind::tabulated:
      require(!times.empty() && times.size() == values.size(), "trajectory: tabulated needs matching times/values");
      for (std::size_t i = 1; i < times.size(); ++i) {
        require(times[i] > times[i - 1], "trajectory: tabulated times must be strictly increasing");
      }
      break;
  }
}

double Trajectory::eval(double t) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::sinusoid:
      return value + amplitude * std::sin(frequency * t + phase);
    case Kind::pulse:
      return (t >= start && t < stop) ? value : 0.0;
    case Kind::tabulated: {
      if (t <= times.front()) return values.front();
      if (t >= times.back()) return values.back();
      const auto it = std::upper_bound(times.begin(), times.end(), t);
      const auto i = static_cast<std::size_t>(it - times.begin());
      const double a = (t - times[i - 1]) / (times[i] - times[i - 1]);
      return (1.0 - a) * values[i - 1] + a * values[i];
    }
  }
  return 0.0;
}

double Trajectory::rate(double t) const {
  switch (kind) {
    case Kind::constant:
    case Kind::pulse:
      return 0.0;
    case Kind::sinusoid:
      return amplitude * frequency * std::cos(frequency * t + phase);
    case Kind::tabulated: {
      if (t < times.front() || t >= times.back() || times.size() < 2) return 0.0;
      const auto it = std::upper_bound(times.begin(), times.end(), t);
      const auto i = static_cast<std::size_t>(it - times.begin());
      return (values[i] - values[i - 1]) / (times[i] - times[i - 1]);
    }
  }
  return 0.0;
}

std::string to_string(Trajectory::Kind kind) {
  switch (kind) {
    case Trajectory::Kind::constant:
      return "constant";
    case Trajectory::Kind::sinusoid:
      return "sinusoid";
    case Trajectory::Kind::pulse:
      return "pulse";
    case Trajectory::Kind::tabulated:
      break;
  }
  return "tabulated";
}

Trajectory::Kind trajectory_kind_from_string(const std::string& name) {
  if (name == "constant") return Trajectory::Kind::constant;
  if (name == "sinusoid") return Trajectory::Kind::sinusoid;
  if (name == "pulse") return Trajectory::Kind::pulse;
  if (name == "tabulated") return Trajectory::Kind::tabulated;
  throw InvalidArgument("unknown trajectory kind '" + name + "'");
}

std::size_t Scenario::steps() const { return static_cast<std::size_t>(std::llround(horizon / step)); }

Scenario pulse_scenario(double horizon, double step) {
  Scenario sc;
  sc.name = "pulse";
  sc.rho = {Trajectory::sinusoid(1.0, 0.5)};
  sc.tau = Trajectory::sinusoid(0.2, 6.0, 0.0, 1.8);
  sc.d = {Trajectory::pulse(1.0, 0.0, 2.0)};
  sc.horizon = horizon;
  sc.step = step;
  return sc;
}

void validate_scenario(const Scenario& sc, const DelayedLpvPlant& plant) {
  require(sc.step > 0.0 && sc.horizon > 0.0, "scenario: step and horizon must be positive");
  require(sc.steps() >= 1, "scenario: horizon shorter than one step");
  require(sc.rho.size() == plant.domain.dimension(), "scenario: one rho trajectory per parameter component");
  require(sc.d.size() == static_cast<std::size_t>(plant.dims.nd), "scenario: one disturbance per channel");
  if (sc.x0) require(sc.x0->size() == plant.dims.nx, "scenario: x0 has wrong length");
  sc.tau.validate();
  for (const auto& r : sc.rho) r.validate();
  for (const auto& d : sc.d) d.validate();

  const double tol = 1e-9;
  const double tau_bar = plant.delay.tau_bar;
  const double r = plant.delay.r;
  const Eigen::Index s = static_cast<Eigen::Index>(plant.domain.dimension());
  double tau_min = tau_bar;
  Vector rho(s), rate(s);
  auto fail = [&](const std::string& what, double t) {
    std::ostringstream msg;
    msg << what << " at t=" << t;
    throw ClassViolation(msg.str());
  };
  const std::size_t n = sc.steps();
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * sc.step;
    const double tau = sc.tau.eval(t);
    if (tau < -tol || tau > tau_bar * (1.0 + tol)) fail("delay outside [0, tau_bar]", t);
    if (std::abs(sc.tau.rate(t)) > r * (1.0 + tol) + tol) fail("delay rate exceeds r", t);
    tau_min = std::min(tau_min, tau);
    for (Eigen::Index i = 0; i < s; ++i) {
      rho[i] = sc.rho[static_cast<std::size_t>(i)].eval(t);
      rate[i] = sc.rho[static_cast<std::size_t>(i)].rate(t);
    }
    if (!plant.domain.contains(rho, tol)) fail("parameter outside its box", t);
    if (!plant.domain.rate_admissible(rate, tol)) fail("parameter rate outside its rate box", t);
  }
  if (sc.step > 0.5 * tau_min * (1.0 + 1e-12)) {
    throw InvalidArgument("scenario: step exceeds tau_min/2, the explicit delayed lookup needs tau >= 2h");
  }
}

History::History(double step, Eigen::Index dim) : step_(step), dim_(dim) {
  require(step > 0.0, "history: step must be positive");
}

void History::push(const Vector& x) {
  require(x.size() == dim_, "history: wrong state length");
  nodes_.push_back(x);
}

double History::current_time() const {
  return nodes_.empty() ? 0.0 : static_cast<double>(nodes_.size() - 1) * step_;
}

Vector History::lookup(double t) const {
  if (t <= 0.0) return Vector::Zero(dim_);
  const double now = current_time();
  if (nodes_.empty() || t > now * (1.0 + 1e-12) + 1e-12) {
    throw InvalidArgument("history: lookup beyond the current time");
  }
  const double pos = t / step_;
  auto k = static_cast<std::size_t>(std::floor(pos));
  if (k >= nodes_.size() - 1) return nodes_.back();
  const double a = pos - static_cast<double>(k);
  if (a == 0.0) return nodes_[k];
  return (1.0 - a) * nodes_[k] + a * nodes_[k + 1];
}

Vector delayed_lookup(const History& history, double t_query) { return history.lookup(t_query); }

SimulationTrace simulate(const DelayedLpvPlant& plant, const MultiplierRealization& realization,
                         const GainSchedule& gains, const Scenario& sc) {
  plant.validate();
  validate_scenario(sc, plant);
  const Eigen::Index nx = plant.dims.nx;
  const Eigen::Index nd = plant.dims.nd;
  const Eigen::Index nu = plant.dims.nu;
  const Eigen::Index ne = plant.dims.ne;
  const Eigen::Index np = realization.n_psi();
  require(static_cast<Eigen::Index>(realization.n_x) == nx, "simulate: filter does not match the plant state");
  if (!gains.empty()) {
    require(gains.F.front().rows() == nu && gains.F.front().cols() == nx + np, "simulate: F has wrong shape");
    require(gains.H.front().rows() == nu && gains.H.front().cols() == nx, "simulate: H has wrong shape");
  }
  const Eigen::Index s = static_cast<Eigen::Index>(plant.domain.dimension());
  const double h = sc.step;
  const std::size_t n = sc.steps();

  struct Signals {
    Vector rho, d, xd, w, u, e;
    double tau = 0.0;
  };
  History hist(h, nx);
  auto eval = [&](double t, const Vector& z, Signals& sig) -> Vector {
    sig.rho.resize(s);
    for (Eigen::Index i = 0; i < s; ++i) sig.rho[i] = sc.rho[static_cast<std::size_t>(i)].eval(t);
    sig.d.resize(nd);
    for (Eigen::Index i = 0; i < nd; ++i) sig.d[i] = sc.d[static_cast<std::size_t>(i)].eval(t);
    sig.tau = sc.tau.eval(t);
    const auto xp = z.head(nx);
    const auto psi = z.tail(np);
    sig.xd = hist.lookup(t - sig.tau);
    sig.w = xp - sig.xd;
    if (gains.empty()) {
      sig.u = Vector::Zero(nu);
    } else {
      const auto [F, H] = gains.at(sig.rho);
      sig.u = F * z + H * sig.w;
    }
    sig.e = plant.Cp1.eval(sig.rho) * xp + plant.Cd1.eval(sig.rho) * sig.xd + plant.Dp11.eval(sig.rho) * sig.d +
            plant.Dp12.eval(sig.rho) * sig.u;
    Vector dz(nx + np);
    dz.head(nx) = plant.Ap.eval(sig.rho) * xp + plant.Ad.eval(sig.rho) * sig.xd + plant.Bp1.eval(sig.rho) * sig.d +
                  plant.Bp2.eval(sig.rho) * sig.u;
    dz.tail(np) = realization.A * psi + realization.B1 * xp + realization.B2 * sig.w;
    return dz;
  };

  SimulationTrace tr;
  tr.t.resize(n + 1);
  tr.tau.resize(n + 1);
  tr.x_p.resize(static_cast<Eigen::Index>(n + 1), nx);
  tr.x_psi.resize(static_cast<Eigen::Index>(n + 1), np);
  tr.w.resize(static_cast<Eigen::Index>(n + 1), nx);
  tr.u.resize(static_cast<Eigen::Index>(n + 1), nu);
  tr.e.resize(static_cast<Eigen::Index>(n + 1), ne);
  tr.d.resize(static_cast<Eigen::Index>(n + 1), nd);
  tr.rho.resize(static_cast<Eigen::Index>(n + 1), s);

  Vector z = Vector::Zero(nx + np);
  if (sc.x0) z.head(nx) = *sc.x0;
  hist.push(z.head(nx));
  Signals sig, scratch;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    const Vector k1 = eval(t, z, sig);
    const auto row = static_cast<Eigen::Index>(k);
    tr.t[k] = t;
    tr.tau[k] = sig.tau;
    tr.x_p.row(row) = z.head(nx).transpose();
    tr.x_psi.row(row) = z.tail(np).transpose();
    tr.w.row(row) = sig.w.transpose();
    tr.u.row(row) = sig.u.transpose();
    tr.e.row(row) = sig.e.transpose();
    tr.d.row(row) = sig.d.transpose();
    tr.rho.row(row) = sig.rho.transpose();
    if (k == n) break;

    const Vector k2 = eval(t + 0.5 * h, z + 0.5 * h * k1, scratch);
    const Vector k3 = eval(t + 0.5 * h, z + 0.5 * h * k2, scratch);
    const Vector k4 = eval(t + h, z + h * k3, scratch);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!z.allFinite()) throw std::runtime_error("simulate: state diverged to a non-finite value");
    hist.push(z.head(nx));
  }
  return tr;
}

double trapezoid_energy(const std::vector<double>& t, const Matrix& samples) {
  require(static_cast<Eigen::Index>(t.size()) == samples.rows(), "energy: sample count mismatch");
  double acc = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const auto a = static_cast<Eigen::Index>(k - 1);
    const auto b = static_cast<Eigen::Index>(k);
    acc += 0.5 * (t[k] - t[k - 1]) * (samples.row(a).squaredNorm() + samples.row(b).squaredNorm());
  }
  return acc;
}

double l2_gain_estimate(const SimulationTrace& trace) {
  const double ed = trapezoid_energy(trace.t, trace.d);
  if (!(ed > 0.0)) throw ClassViolation("zero disturbance energy");
  return std::sqrt(trapezoid_energy(trace.t, trace.e) / ed);
}

double refilter_error(const MultiplierRealization& realization, const SimulationTrace& trace) {
  const std::size_t n = trace.t.size();
  require(n >= 4, "refilter: need at least four samples");
  const Eigen::Index np = realization.n_psi();
  const double h = trace.t[1] - trace.t[0];
  auto input = [&](std::size_t k) -> Vector {
    const auto r = static_cast<Eigen::Index>(k);
    return realization.B1 * trace.x_p.row(r).transpose() + realization.B2 * trace.w.row(r).transpose();
  };
  // cubic through four neighbouring nodes, evaluated at the midpoint of [k, k+1]
  auto midpoint = [&](std::size_t k) -> Vector {
    const std::size_t j0 = std::min(k == 0 ? 0 : k - 1, n - 4);
    const double x = static_cast<double>(k) + 0.5 - static_cast<double>(j0);
    Vector out = Vector::Zero(np);
    for (std::size_t a = 0; a < 4; ++a) {
      double l = 1.0;
      for (std::size_t b = 0; b < 4; ++b) {
        if (a != b) l *= (x - static_cast<double>(b)) / (static_cast<double>(a) - static_cast<double>(b));
      }
      out += l * input(j0 + a);
    }
    return out;
  };
  Vector psi = Vector::Zero(np);
  double max_err = 0.0;
  double max_ref = trace.x_psi.cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Vector u0 = input(k);
    const Vector um = midpoint(k);
    const Vector u1 = input(k + 1);
    const Vector k1 = realization.A * psi + u0;
    const Vector k2 = realization.A * (psi + 0.5 * h * k1) + um;
    const Vector k3 = realization.A * (psi + 0.5 * h * k2) + um;
    const Vector k4 = realization.A * (psi + h * k3) + u1;
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    max_err = std::max(max_err, (psi.transpose() - trace.x_psi.row(static_cast<Eigen::Index>(k + 1))).cwiseAbs().maxCoeff());
  }
  return max_ref > 0.0 ? max_err / max_ref : max_err;
}

void write_trace_csv(const SimulationTrace& tr, std::ostream& os) {
  os << "t";
  auto header = [&](const char* name, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) os << ',' << name << i + 1;
  };
  header("x", tr.x_p.cols());
  header("u", tr.u.cols());
  header("e", tr.e.cols());
  header("d", tr.d.cols());
  os << ",tau";
  header("rho", tr.rho.cols());
  os << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.10g", v);
    os << buf;
  };
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    std::snprintf(buf, sizeof buf, "%.10g", tr.t[k]);
    os << buf;
    for (Eigen::Index i = 0; i < tr.x_p.cols(); ++i) put(tr.x_p(r, i));
    for (Eigen::Index i = 0; i < tr.u.cols(); ++i) put(tr.u(r, i));
    for (Eigen::Index i = 0; i < tr.e.cols(); ++i) put(tr.e(r, i));
    for (Eigen::Index i = 0; i < tr.d.cols(); ++i) put(tr.d(r, i));
    put(tr.tau[k]);
    for (Eigen::Index i = 0; i < tr.rho.cols(); ++i) put(tr.rho(r, i));
    os << '\n';
  }
}

}  // namespace lpviqc
