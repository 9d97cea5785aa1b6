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

#include "lpviqc/serialize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace lpviqc {

using nlohmann::json;

namespace {

std::string fmt(double v, const char* f = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::filesystem::path output_dir(const RunConfig& cfg, const CommandOptions& opts) {
  std::filesystem::path dir = opts.out ? *opts.out : cfg.output_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

RunConfig load(const CommandOptions& opts) {
  RunConfig cfg = load_config(opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  return os;
}

void check_schedule(const RunConfig& cfg, const SynthesisResult& result) {
  if (result.gains.empty()) throw InvalidArgument("gains file holds no gain schedule");
  require(result.gains.domain.dimension() == cfg.plant.domain.dimension(),
          "gains were computed for a different parameter dimension");
  require(result.gains.H.front().rows() == cfg.plant.dims.nu && result.gains.H.front().cols() == cfg.plant.dims.nx,
          "gains do not match the plant dimensions");
}

std::string row_label(const std::string& method, double nu) {
  if (method == "quadratic") return "quadratic";
  return "parameter_dependent nu=" + fmt(nu, "%g");
}

std::string column_label(const TableColumn& c) { return "r=" + fmt(c.r, "%g") + " tau_bar=" + fmt(c.tau_bar, "%g"); }

}  // namespace

int exit_code_for(sdp::SdpStatus status) {
  switch (status) {
    case sdp::SdpStatus::optimal: return exit_ok;
    case sdp::SdpStatus::infeasible: return exit_infeasible;
    default: return exit_solver_failure;
  }
}

SynthesisResult synthesize(const RunConfig& config) {
  const MultiplierRealization real = build_realization(config.plant, config.synthesis);
  SynthesisResult res = minimize_gamma(config.plant, real, config.synthesis);
  if (!res.ok()) return res;
  if (!recover_gains(config.plant, real, res, config.synthesis.recovery_margin, config.synthesis.solver)) {
    res.status = sdp::SdpStatus::numerical_failure;
  }
  return res;
}

MultiplierRealization realization_for(const RunConfig& config, const SynthesisResult& result) {
  require(result.delay.tau_bar == config.plant.delay.tau_bar && result.delay.r == config.plant.delay.r,
          "gains were synthesized for a different delay class");
  require(!result.multipliers.empty() || result.Xhat_k.empty(), "gains file lists no multipliers");
  std::vector<MultiplierSpec> specs;
  for (MultiplierKind k : result.multipliers) specs.push_back(make_multiplier(k, result.delay, result.shaping));
  return realize_filter(specs, static_cast<std::size_t>(config.plant.dims.nx));
}

AnalysisCertificate analyze(const RunConfig& config, const SynthesisResult& result, std::optional<double> gamma) {
  check_schedule(config, result);
  if (gamma) require(*gamma > 0.0 && std::isfinite(*gamma), "gamma must be positive");
  const MultiplierRealization real = realization_for(config, result);
  const AnalysisInput in = analysis_input(config.plant, real, result, config.analysis_p_degree);
  return verify_analysis(in, gamma, config.synthesis.solver);
}

SimulationSummary summarize(const SimulationTrace& trace, const MultiplierRealization& realization, double gamma,
                            const std::string& name) {
  SimulationSummary s;
  s.scenario = name;
  s.gamma = gamma;
  s.ratio = l2_gain_estimate(trace);
  s.disturbance_energy = trapezoid_energy(trace.t, trace.d);
  s.output_energy = trapezoid_energy(trace.t, trace.e);
  s.max_abs_u = trace.u.size() ? trace.u.cwiseAbs().maxCoeff() : 0.0;
  const double t_end = trace.t.empty() ? 0.0 : trace.t.back();
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    const double n = trace.x_p.row(static_cast<Eigen::Index>(i)).norm();
    s.max_state_norm = std::max(s.max_state_norm, n);
    if (trace.t[i] >= t_end * 2.0 / 3.0) s.max_state_norm_tail = std::max(s.max_state_norm_tail, n);
  }
  s.refilter_error = realization.n_psi() > 0 ? refilter_error(realization, trace) : 0.0;
  s.within_bound = s.ratio <= gamma;
  return s;
}

json summary_to_json(const SimulationSummary& s) {
  return {{"scenario", s.scenario},
          {"gamma", s.gamma},
          {"ratio", s.ratio},
          {"within_bound", s.within_bound},
          {"disturbance_energy", s.disturbance_energy},
          {"output_energy", s.output_energy},
          {"max_abs_u", s.max_abs_u},
          {"max_state_norm", s.max_state_norm},
          {"max_state_norm_tail", s.max_state_norm_tail},
          {"refilter_error", s.refilter_error}};
}

TableReport reproduce_table(const RunConfig& config, unsigned threads) {
  TableReport rep;
  rep.columns = config.table.columns;
  std::vector<double> rates = config.table.rates;
  std::sort(rates.begin(), rates.end());
  std::vector<std::pair<std::string, double>> rows;
  for (double nu : rates) rows.emplace_back("parameter_dependent", nu);
  if (config.table.quadratic_row) rows.emplace_back("quadratic", 0.0);
  for (const auto& [m, nu] : rows) rep.rows.push_back(row_label(m, nu));

  for (const auto& [m, nu] : rows) {
    for (const TableColumn& c : rep.columns) {
      TableCell cell;
      cell.method = m;
      cell.nu = nu;
      cell.column = c;
      rep.cells.push_back(cell);
    }
  }

  auto run_cell = [&config](TableCell& cell) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const DelaySpec delay{cell.column.tau_bar, cell.column.r};
      DelayedLpvPlant plant;
      if (config.example_plant) {
        plant = example_plant(delay, cell.nu, config.example_phi, config.example_sigma);
      } else {
        plant = config.plant;
        plant.delay = delay;
      }
      const std::size_t s = plant.domain.dimension();
      const int grid = config.synthesis.grid_counts.empty() ? 11 : config.synthesis.grid_counts.front();
      SynthesisConfig sc = cell.method == "quadratic"
                               ? SynthesisConfig::quadratic(s, grid)
                               : SynthesisConfig::parameter_dependent(s, config.table.r_degree, config.table.x_degree, grid);
      sc.grid_counts = config.synthesis.grid_counts;
      sc.multipliers = config.synthesis.multipliers;
      sc.shaping = config.synthesis.shaping;
      sc.coupling = config.synthesis.coupling;
      sc.nullspace_tol = config.synthesis.nullspace_tol;
      sc.solver = config.synthesis.solver;
      const MultiplierRealization real = build_realization(plant, sc);
      const SynthesisResult res = minimize_gamma(plant, real, sc);
      cell.status = res.status;
      cell.gamma = res.gamma;
      cell.message = res.message;
    } catch (const std::exception& e) {
      cell.status = sdp::SdpStatus::numerical_failure;
      cell.message = e.what();
    }
    cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(1, rep.cells.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rep.cells.size(); i = next++) run_cell(rep.cells[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  rep.violations = check_monotone(rep);
  rep.monotone = rep.violations.empty();
  return rep;
}

std::vector<MonotonicityViolation> check_monotone(const TableReport& rep, double slack) {
  std::vector<MonotonicityViolation> out;
  auto value = [](const TableCell& c) {
    if (c.status == sdp::SdpStatus::optimal) return c.gamma;
    if (c.status == sdp::SdpStatus::infeasible) return std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  };
  for (std::size_t j = 0; j < rep.columns.size(); ++j) {
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
      const double lo = value(rep.cell(i, j));
      const double hi = value(rep.cell(i + 1, j));
      if (std::isnan(lo) || std::isnan(hi)) continue;
      if (std::isinf(lo) && std::isinf(hi)) continue;
      const double gap = hi - lo;
      if (gap < -slack) out.push_back({rep.columns[j], rep.rows[i], rep.rows[i + 1], gap});
    }
  }
  return out;
}

void write_table_csv(const TableReport& rep, std::ostream& os) {
  os << "method";
  for (const TableColumn& c : rep.columns) os << "," << column_label(c);
  os << "\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    os << rep.rows[i];
    for (std::size_t j = 0; j < rep.columns.size(); ++j) {
      const TableCell& c = rep.cell(i, j);
      os << ",";
      if (c.status == sdp::SdpStatus::optimal) {
        os << fmt(c.gamma, "%.4f");
      } else if (c.status == sdp::SdpStatus::infeasible) {
        os << "inf";
      } else {
        os << "nan";
      }
    }
    os << "\n";
  }
  os << "lft_exact_memory";
  for (std::size_t j = 0; j < rep.columns.size(); ++j) os << ",out_of_scope";
  os << "\n";
}

int cmd_synthesize(const CommandOptions& opts, std::ostream& out) {
  const RunConfig cfg = load(opts);
  const SynthesisResult res = synthesize(cfg);
  const int code = exit_code_for(res.status);
  const auto dir = output_dir(cfg, opts);
  json summary = {{"command", "synthesize"},
                  {"status", sdp::to_string(res.status)},
                  {"exit_code", code},
                  {"message", res.message},
                  {"gamma", res.ok() ? json(res.gamma) : json(nullptr)}};
  if (code == exit_ok) {
    write_result(res, dir / "synthesis_result.json");
    auto os = open_out(dir / "diagnostics.csv");
    write_diagnostics_csv(res, os);
    summary["result"] = (dir / "synthesis_result.json").string();
    summary["diagnostics"] = (dir / "diagnostics.csv").string();
  }
  out << summary.dump() << "\n";
  return code;
}

int cmd_analyze(const CommandOptions& opts, std::ostream& out) {
  const RunConfig cfg = load(opts);
  if (!opts.gains) throw InvalidArgument("analyze needs --gains");
  const SynthesisResult res = read_result(*opts.gains);
  const AnalysisCertificate cert = analyze(cfg, res, opts.gamma);
  const int code = exit_code_for(cert.status);
  const auto dir = output_dir(cfg, opts);
  write_json(certificate_to_json(cert), dir / "certificate.json");
  json summary = {{"command", "analyze"},
                  {"status", sdp::to_string(cert.status)},
                  {"feasible", cert.feasible()},
                  {"exit_code", code},
                  {"gamma", opts.gamma ? *opts.gamma : cert.gamma},
                  {"message", cert.message},
                  {"certificate", (dir / "certificate.json").string()}};
  out << summary.dump() << "\n";
  return code;
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out) {
  const RunConfig cfg = load(opts);
  if (!opts.gains) throw InvalidArgument("simulate needs --gains");
  const SynthesisResult res = read_result(*opts.gains);
  check_schedule(cfg, res);
  if (cfg.scenarios.empty()) throw InvalidArgument("config defines no scenarios");
  std::string name;
  if (opts.scenario) {
    name = *opts.scenario;
  } else if (cfg.scenarios.size() == 1) {
    name = cfg.scenarios.front().name;
  } else {
    throw InvalidArgument("several scenarios defined; pick one with --scenario");
  }
  const Scenario& sc = cfg.scenario(name);
  const MultiplierRealization real = realization_for(cfg, res);
  const SimulationTrace trace = simulate(cfg.plant, real, res.gains, sc);
  const SimulationSummary s = summarize(trace, real, res.gamma, name);
  const auto dir = output_dir(cfg, opts);
  {
    auto os = open_out(dir / ("trace_" + name + ".csv"));
    write_trace_csv(trace, os);
  }
  json j = summary_to_json(s);
  write_json(j, dir / ("summary_" + name + ".json"));
  j["command"] = "simulate";
  j["exit_code"] = exit_ok;
  j["trace"] = (dir / ("trace_" + name + ".csv")).string();
  out << j.dump() << "\n";
  return exit_ok;
}

int cmd_reproduce_table(const CommandOptions& opts, std::ostream& out) {
  const RunConfig cfg = load(opts);
  if (cfg.table.columns.empty()) throw InvalidArgument("config defines no table columns");
  const TableReport rep = reproduce_table(cfg);
  const auto dir = output_dir(cfg, opts);
  {
    auto os = open_out(dir / "table.csv");
    write_table_csv(rep, os);
  }
  json cells = json::array();
  for (const TableCell& c : rep.cells) {
    cells.push_back({{"method", c.method},
                     {"nu", c.nu},
                     {"r", c.column.r},
                     {"tau_bar", c.column.tau_bar},
                     {"status", sdp::to_string(c.status)},
                     {"gamma", c.status == sdp::SdpStatus::optimal ? json(c.gamma) : json(nullptr)},
                     {"seconds", c.seconds},
                     {"message", c.message}});
  }
  json viol = json::array();
  for (const auto& v : rep.violations) {
    viol.push_back({{"r", v.column.r}, {"tau_bar", v.column.tau_bar}, {"lower", v.lower}, {"upper", v.upper},
                    {"slack", v.slack}});
  }
  json j = {{"cells", cells}, {"monotone", rep.monotone}, {"violations", viol},
            {"out_of_scope", json::array({"lft_exact_memory"})}};
  write_json(j, dir / "table_summary.json");
  out << json({{"command", "reproduce-table"},
               {"exit_code", exit_ok},
               {"monotone", rep.monotone},
               {"table", (dir / "table.csv").string()}})
             .dump()
      << "\n";
  return exit_ok;
}

int cmd_validate_iqc(const CommandOptions& opts, std::ostream& out) {
  const RunConfig cfg = load(opts);
  json reports = json::array();
  bool pass = true;
  for (const DelaySpec& d : cfg.iqc.cases) {
    std::vector<MultiplierKind> kinds = cfg.synthesis.multipliers;
    if (kinds.empty()) {
      if (d.r < 1.0) kinds.push_back(MultiplierKind::pi1);
      if (d.r < 2.0) kinds.push_back(MultiplierKind::pi2);
    }
    if (kinds.empty()) throw InvalidArgument("no multiplier admits r=" + fmt(d.r, "%g"));
    const IqcValidationReport rep = validate_iqc(d, kinds, cfg.synthesis.shaping, cfg.iqc.pairs, cfg.seed,
                                                 static_cast<std::size_t>(cfg.plant.dims.nx));
    pass = pass && rep.pass;
    for (const MultiplierValidation& m : rep.multipliers) {
      reports.push_back({{"tau_bar", d.tau_bar},
                         {"r", d.r},
                         {"multiplier", to_string(m.kind)},
                         {"factorization_error", m.factorization.max_error},
                         {"factorization_worst_omega", m.factorization.worst_omega},
                         {"factor_stable", m.factorization.factor_stable},
                         {"inverse_stable", m.factorization.inverse_stable},
                         {"filter_hurwitz", m.hurwitz},
                         {"pairs", m.pairs},
                         {"worst_normalized_integral", m.worst_normalized_integral},
                         {"pass", m.pass}});
    }
  }
  const auto dir = output_dir(cfg, opts);
  const int code = pass ? exit_ok : exit_infeasible;
  json j = {{"seed", cfg.seed}, {"pass", pass}, {"checks", reports}};
  write_json(j, dir / "iqc_report.json");
  j["command"] = "validate-iqc";
  j["exit_code"] = code;
  out << j.dump() << "\n";
  return code;
}

int run_guarded(const std::function<int()>& command, std::ostream& err) {
  auto report = [&err](const char* kind, const std::string& msg, int code) {
    err << json({{"error", kind}, {"message", msg}, {"exit_code", code}}).dump() << "\n";
    return code;
  };
  try {
    return command();
  } catch (const InvalidArgument& e) {
    return report("config_error", e.what(), exit_config_error);
  } catch (const ClassViolation& e) {
    return report("class_violation", e.what(), exit_class_violation);
  } catch (const std::exception& e) {
    return report("solver_failure", e.what(), exit_solver_failure);
  }
}

}  // namespace lpviqc
