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

#include "lpviqc/ddesim.hpp"
#include "lpviqc/synthesis.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lpviqc {

/// One Table-1 style column: a delay class.
struct TableColumn {
  double r = 0.0;
  double tau_bar = 1.0;
};

struct TableSpec {
  std::vector<TableColumn> columns;
  std::vector<double> rates;   // parameter-dependent rows, one per rate bound
  bool quadratic_row = true;
  int r_degree = 2;
  int x_degree = 1;
};

struct IqcSuiteSpec {
  std::vector<DelaySpec> cases;
  std::size_t pairs = 50;
};

struct RunConfig {
  DelayedLpvPlant plant;
  bool example_plant = false;  // the built-in benchmark; enables rate-bound rows in tables
  double example_phi = 0.2;
  double example_sigma = 0.1;

  SynthesisConfig synthesis;
  int analysis_p_degree = -1;
  std::vector<Scenario> scenarios;
  TableSpec table;
  IqcSuiteSpec iqc;
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 1;

  /// Throws InvalidArgument when absent.
  const Scenario& scenario(const std::string& name) const;
};

/// Monomial from a catalog name: "1", "rho1", "rho2^3", "rho1*rho2^2".
Monomial parse_basis_name(const std::string& name, std::size_t dimension);
std::string basis_name(const Monomial& m);

/// Schema-checked parse; unknown keys and malformed values raise InvalidArgument.
/// Relative output paths resolve against base_dir (the working directory for load_config).
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

Trajectory parse_trajectory(const nlohmann::json& j);
nlohmann::json trajectory_to_json(const Trajectory& t);

}  // namespace lpviqc
