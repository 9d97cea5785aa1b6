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


#include "lpviqc/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace lpviqc;
  CLI::App app{"LPV time-delay IQC synthesis and verification"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::string config, gains, scenario, out;
  double gamma = 0.0;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration (JSON)")->required();
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
  };
  auto* syn = app.add_subcommand("synthesize", "minimize gamma and recover scheduled gains");
  common(syn);
  auto* ana = app.add_subcommand("analyze", "verify stored gains with the analysis LMI");
  common(ana);
  ana->add_option("--gains", gains, "synthesis result JSON")->required();
  ana->add_option("--gamma", gamma, "bound to certify; minimized when omitted");
  auto* sim = app.add_subcommand("simulate", "simulate the closed loop on a scenario");
  common(sim);
  sim->add_option("--gains", gains, "synthesis result JSON")->required();
  sim->add_option("--scenario", scenario, "scenario name from the config");
  auto* tab = app.add_subcommand("reproduce-table", "gamma for every (method, delay class) cell");
  common(tab);
  auto* iqc = app.add_subcommand("validate-iqc", "frequency and time-domain multiplier checks");
  common(iqc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << nlohmann::json({{"error", "usage"}, {"message", e.what()}, {"exit_code", exit_config_error}}).dump()
              << "\n";
    return exit_config_error;
  }

  opts.config = config;
  if (!gains.empty()) opts.gains = gains;
  if (!scenario.empty()) opts.scenario = scenario;
  if (!out.empty()) opts.out = out;
  for (auto* sub : {syn, ana, sim, tab, iqc}) {
    if (sub->count("--seed")) opts.seed = seed;
  }
  if (ana->count("--gamma")) opts.gamma = gamma;

  return run_guarded(
      [&]() -> int {
        if (*syn) return cmd_synthesize(opts, std::cout);
        if (*ana) return cmd_analyze(opts, std::cout);
        if (*sim) return cmd_simulate(opts, std::cout);
        if (*tab) return cmd_reproduce_table(opts, std::cout);
        return cmd_validate_iqc(opts, std::cout);
      },
      std::cerr);
}
