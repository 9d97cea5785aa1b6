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

#include "lpviqc/synthesis.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lpviqc {

/// Scalar signal descriptor.
struct Trajectory {
  enum class Kind { constant, sinusoid, pulse, tabulated };

  Kind kind = Kind::constant;
  double value = 0.0;      // constant level, sinusoid offset, pulse amplitude
  double amplitude = 0.0;  // sinusoid
  double frequency = 0.0;  // sinusoid, rad/s
  double phase = 0.0;      // sinusoid, rad
  double start = 0.0;      // pulse
  double stop = 0.0;       // pulse
  std::vector<double> times;   // tabulated, strictly increasing
  std::vector<double> values;  // tabulated, linear in between and held outside

  static Trajectory constant(double v);
  /// offset + amplitude * sin(frequency * t + phase)
  static Trajectory sinusoid(double amplitude, double frequency, double phase = 0.0, double offset = 0.0);
  /// amplitude on [start, stop), zero elsewhere
  static Trajectory pulse(double amplitude, double start, double stop);
  static Trajectory tabulated(std::vector<double> times, std::vector<double> values);

  void validate() const;
  double eval(double t) const;
  /// Time derivative where it exists (zero across pulse edges).
  double rate(double t) const;
};

std::string to_string(Trajectory::Kind kind);
Trajectory::Kind trajectory_kind_from_string(const std::string& name);

struct Scenario {
  std::string name;
  std::vector<Trajectory> rho;  // one per parameter component
  Trajectory tau;
  std::vector<Trajectory> d;    // one per disturbance channel
  double horizon = 60.0;
  double step = 1e-3;
  std::optional<Vector> x0;     // plant state at t = 0, zero by default

  std::size_t steps() const;
};

/// Reference scenario: rho = sin(0.5 t), tau = 0.2 sin(6 t) + 1.8, unit pulse on [0, 2].
Scenario pulse_scenario(double horizon = 60.0, double step = 1e-3);

/// Throws ClassViolation when tau, rho or their rates leave the class at any step node,
/// InvalidArgument for malformed scenarios or step > tau_min / 2.
void validate_scenario(const Scenario& scenario, const DelayedLpvPlant& plant);

/// Uniformly sampled plant-state history with zero pre-history.
class History {
 public:
  History(double step, Eigen::Index dim);

  void push(const Vector& x);
  double current_time() const;
  std::size_t size() const { return nodes_.size(); }
  const Vector& node(std::size_t k) const { return nodes_[k]; }

  /// Zero for t <= 0, linear interpolation between nodes; throws past the current time.
  Vector lookup(double t) const;

 private:
  double step_;
  Eigen::Index dim_;
  std::vector<Vector> nodes_;
};

Vector delayed_lookup(const History& history, double t_query);

struct SimulationTrace {
  std::vector<double> t;
  Matrix x_p;    // samples x n_x
  Matrix x_psi;  // samples x n_psi
  Matrix w;      // samples x n_x
  Matrix u;
  Matrix e;
  Matrix d;
  std::vector<double> tau;
  Matrix rho;    // samples x s
};

/// RK4 on (x_p, x_psi) with the scheduled state feedback; empty gains mean u = 0.
SimulationTrace simulate(const DelayedLpvPlant& plant, const MultiplierRealization& realization,
                         const GainSchedule& gains, const Scenario& scenario);

/// ||e||_2 / ||d||_2 by trapezoidal quadrature; ClassViolation on zero disturbance energy.
double l2_gain_estimate(const SimulationTrace& trace);

/// Signal energy int |v|^2 dt of sampled rows, trapezoidal.
double trapezoid_energy(const std::vector<double>& t, const Matrix& samples);

/// Re-runs the filter offline on the recorded (x_p, w) with cubic interpolation at
/// half steps; returns max |x_psi - x_psi_offline| / max |x_psi|.
double refilter_error(const MultiplierRealization& realization, const SimulationTrace& trace);

/// CSV: t, x_p..., u..., e..., d..., tau, rho...
void write_trace_csv(const SimulationTrace& trace, std::ostream& os);

}  // namespace lpviqc
