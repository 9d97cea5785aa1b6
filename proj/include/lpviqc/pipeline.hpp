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

#include "lpviqc/config.hpp"
#include "lpviqc/ddesim.hpp"
#include "lpviqc/synthesis.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lpviqc {

enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_infeasible = 2,
  exit_solver_failure = 3,
  exit_class_violation = 4,
};

int exit_code_for(sdp::SdpStatus status);

/// Synthesis with gain recovery. A recovery failure turns the status into numerical_failure.
SynthesisResult synthesize(const RunConfig& config);

/// Filter realization described by a stored result; its delay class must match the plant.
MultiplierRealization realization_for(const RunConfig& config, const SynthesisResult& result);

/// Analysis of the stored gains at gamma, or the smallest certified gamma when none is given.
AnalysisCertificate analyze(const RunConfig& config, const SynthesisResult& result, std::optional<double> gamma);

struct SimulationSummary {
  std::string scenario;
  double gamma = 0.0;          // certified bound of the gains
  double ratio = 0.0;          // ||e|| / ||d||
  double disturbance_energy = 0.0;
  double output_energy = 0.0;
  double max_abs_u = 0.0;
  double max_state_norm = 0.0;
  double max_state_norm_tail = 0.0;  // over the last third of the horizon
  double refilter_error = 0.0;
  bool within_bound = false;
};

SimulationSummary summarize(const SimulationTrace& trace, const MultiplierRealization& realization, double gamma,
                            const std::string& name);
nlohmann::json summary_to_json(const SimulationSummary& s);

struct TableCell {
  std::string method;      // "quadratic" or "parameter_dependent"
  double nu = 0.0;         // rate bound, 0 for the quadratic row
  TableColumn column;
  sdp::SdpStatus status = sdp::SdpStatus::numerical_failure;
  double gamma = 0.0;
  double seconds = 0.0;
  std::string message;
};

struct MonotonicityViolation {
  TableColumn column;
  std::string lower;  // row label expected to be <=
  std::string upper;
  double slack = 0.0;  // gamma(upper) - gamma(lower)
};

struct TableReport {
  std::vector<std::string> rows;  // row labels in order
  std::vector<TableColumn> columns;
  std::vector<TableCell> cells;   // row-major
  std::vector<MonotonicityViolation> violations;
  bool monotone = true;

  const TableCell& cell(std::size_t row, std::size_t col) const { return cells[row * columns.size() + col]; }
};

/// Rows: parameter-dependent at each rate bound (ascending), then quadratic. Cells run on a
/// small thread pool; `threads` = 0 picks the hardware concurrency.
TableReport reproduce_table(const RunConfig& config, unsigned threads = 0);

/// Monotone ordering down each column with the given slack.
std::vector<MonotonicityViolation> check_monotone(const TableReport& report, double slack = 1e-4);

void write_table_csv(const TableReport& report, std::ostream& os);

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> gains;
  std::optional<double> gamma;
  std::optional<std::string> scenario;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

int cmd_synthesize(const CommandOptions& opts, std::ostream& out);
int cmd_analyze(const CommandOptions& opts, std::ostream& out);
int cmd_simulate(const CommandOptions& opts, std::ostream& out);
int cmd_reproduce_table(const CommandOptions& opts, std::ostream& out);
int cmd_validate_iqc(const CommandOptions& opts, std::ostream& out);

/// Runs a command, mapping exceptions to exit codes with a JSON error line on `err`.
int run_guarded(const std::function<int()>& command, std::ostream& err);

}  // namespace lpviqc
