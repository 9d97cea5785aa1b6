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


#include "doctest.h"

#include "lpviqc/config.hpp"
#include "lpviqc/pipeline.hpp"
#include "lpviqc/serialize.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace lpviqc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lpviqc_unit_" + std::to_string(::getpid())) / name;
  fs::create_directories(p);
  return p;
}

json bundled(const std::string& name) {
  std::ifstream in(fs::path(LPVIQC_CONFIG_DIR) / name);
  return json::parse(in);
}

fs::path write_config(const json& j, const fs::path& dir, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(int (*cmd)(const CommandOptions&, std::ostream&), const CommandOptions& o) {
  std::ostringstream out, err;
  const int code = run_guarded([&] { return cmd(o, out); }, err);
  return {code, out.str(), err.str()};
}

CommandOptions options(const fs::path& config, const fs::path& out) {
  CommandOptions o;
  o.config = config;
  o.out = out;
  return o;
}

int shell(const std::string& cmd) {
  const int st = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// shared across cases: one synthesis of the varying-delay configuration
struct Synthesized {
  fs::path dir;
  fs::path config;
  fs::path gains;
  double gamma;
};

const Synthesized& varying_delay() {
  static const Synthesized s = [] {
    Synthesized r;
    r.dir = scratch("varying");
    r.config = write_config(bundled("varying_delay_pd.json"), r.dir);
    const Run res = run(cmd_synthesize, options(r.config, r.dir));
    REQUIRE(res.code == 0);
    r.gains = r.dir / "synthesis_result.json";
    r.gamma = json::parse(res.out).at("gamma").get<double>();
    return r;
  }();
  return s;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("basis catalog names") {
  CHECK(parse_basis_name("1", 2).is_constant());
  CHECK(parse_basis_name("rho1^2", 1).exponents() == std::vector<int>{2});
  CHECK(parse_basis_name("rho1*rho2^3", 2).exponents() == std::vector<int>{1, 3});
  CHECK_THROWS_AS(parse_basis_name("sin(rho1)", 1), InvalidArgument);
  CHECK_THROWS_AS(parse_basis_name("rho3", 2), InvalidArgument);
  CHECK_THROWS_AS(parse_basis_name("rho1^9", 1), InvalidArgument);
  for (const Monomial& m : monomial_basis(2, 2)) CHECK(parse_basis_name(basis_name(m), 2) == m);
}

TEST_CASE("schema violations are config errors") {
  json j = bundled("example_quadratic.json");
  j["synthesis"]["bogus"] = 1;
  CHECK_THROWS_AS(parse_config(j), InvalidArgument);
  json k = bundled("example_quadratic.json");
  k.erase("delay");
  CHECK_THROWS_AS(parse_config(k), InvalidArgument);
  json m = bundled("example_quadratic.json");
  m["delay"]["tau_bar"] = -1.0;
  CHECK_THROWS_AS(parse_config(m), InvalidArgument);
}

TEST_CASE("explicit matrices reproduce the built-in benchmark") {
  const json j = json::parse(R"({
    "plant": {"dims": {"nx": 2, "nd": 1, "nu": 1, "ne": 2},
      "matrices": {
        "Ap": [{"basis": "1", "coeff": [[0, 1], [-2, -3]]}, {"basis": "rho1", "coeff": [[0, 0.2], [0, 0.1]]}],
        "Ad": [{"basis": "1", "coeff": [[0, 0.1], [-0.2, -0.3]]}, {"basis": "rho1", "coeff": [[0.2, 0], [0.1, 0]]}],
        "Bp1": [[0.2], [0.2]],
        "Bp2": [{"basis": "1", "coeff": [[0], [0.1]]}, {"basis": "rho1", "coeff": [[0.2], [0.1]]}],
        "Cp1": [[0, 10], [0, 0]],
        "Dp12": [[0], [0.1]]}},
    "parameter": {"box": [[-1, 1]], "rate_box": [[-0.5, 0.5]]},
    "delay": {"tau_bar": 2, "r": 1.2}
  })");
  const RunConfig cfg = parse_config(j);
  const auto ref = example_plant({2.0, 1.2}, 0.5);
  for (double r : {-1.0, -0.3, 0.6}) {
    const Vector rho = Vector::Constant(1, r);
    CHECK((cfg.plant.Ap.eval(rho) - ref.Ap.eval(rho)).norm() == 0.0);
    CHECK((cfg.plant.Ad.eval(rho) - ref.Ad.eval(rho)).norm() == 0.0);
    CHECK((cfg.plant.Bp2.eval(rho) - ref.Bp2.eval(rho)).norm() == 0.0);
    CHECK((cfg.plant.Cd1.eval(rho)).norm() == 0.0);
  }
  CHECK(cfg.plant.domain.rate_box()[0].hi == 0.5);

  json bad = j;
  bad["plant"]["matrices"]["Ap"][1]["basis"] = "cos(rho1)";
  CHECK_THROWS_AS(parse_config(bad), InvalidArgument);
  json shape = j;
  shape["plant"]["matrices"]["Bp1"] = json::parse("[[0.2, 0.1], [0.2, 0.1]]");
  CHECK_THROWS_AS(parse_config(shape), InvalidArgument);
}

TEST_CASE("pi1 at r=1.5 is rejected before any solve") {
  const fs::path dir = scratch("pi1");
  json j = bundled("example_quadratic.json");
  j["delay"]["r"] = 1.5;
  j["delay"]["tau_bar"] = 1.0;
  j["multipliers"]["kinds"] = json::array({"pi1"});
  const Run r = run(cmd_synthesize, options(write_config(j, dir), dir));
  CHECK(r.code == 1);
  const json err = json::parse(r.err);
  CHECK(err.at("message").get<std::string>() == "pi1 requires r<1");
  CHECK(err.at("exit_code") == 1);
}

TEST_CASE("bundled benchmark config synthesizes") {
  const fs::path dir = scratch("bench");
  const Run r = run(cmd_synthesize, options(write_config(bundled("example_quadratic.json"), dir), dir));
  REQUIRE(r.code == 0);
  const double g = json::parse(r.out).at("gamma").get<double>();
  CHECK(std::abs(g - 3.6859) <= 0.01 * 3.6859);
  CHECK(fs::exists(dir / "synthesis_result.json"));
  CHECK(fs::exists(dir / "diagnostics.csv"));
}

TEST_CASE("unstabilizable custom plant exits with infeasible") {
  const fs::path dir = scratch("unstab");
  const json j = json::parse(R"({
    "plant": {"dims": {"nx": 1, "nd": 1, "nu": 1, "ne": 1},
              "matrices": {"Ap": [[1]], "Bp1": [[1]], "Cp1": [[1]]}},
    "parameter": {"box": [[0, 0]]},
    "delay": {"tau_bar": 1, "r": 0},
    "synthesis": {"grid": [1]}
  })");
  CHECK(run(cmd_synthesize, options(write_config(j, dir), dir)).code == 2);
}

TEST_CASE("analyze exit codes") {
  const auto& s = varying_delay();
  CommandOptions o = options(s.config, s.dir);
  o.gains = s.gains;
  o.gamma = 1.05 * s.gamma;
  CHECK(run(cmd_analyze, o).code == 0);
  o.gamma = 0.1 * s.gamma;
  CHECK(run(cmd_analyze, o).code == 2);
  o.gains = s.dir / "missing.json";
  CHECK(run(cmd_analyze, o).code == 1);
}

TEST_CASE("simulate: bound holds, class violations map to exit 4") {
  const auto& s = varying_delay();
  CommandOptions o = options(s.config, s.dir);
  o.gains = s.gains;
  o.scenario = "pulse";
  const Run ok = run(cmd_simulate, o);
  REQUIRE(ok.code == 0);
  const json sum = json::parse(ok.out);
  CHECK(sum.at("ratio").get<double>() <= s.gamma);
  CHECK(fs::exists(s.dir / "trace_pulse.csv"));

  json high = bundled("varying_delay_pd.json");
  high["scenarios"][0]["tau"]["params"]["offset"] = 1.95;
  CommandOptions oh = options(write_config(high, s.dir, "high.json"), s.dir);
  oh.gains = s.gains;
  oh.scenario = "pulse";
  CHECK(run(cmd_simulate, oh).code == 4);

  json quiet = bundled("varying_delay_pd.json");
  quiet["scenarios"][0]["d"][0]["params"]["amplitude"] = 0.0;
  CommandOptions oq = options(write_config(quiet, s.dir, "quiet.json"), s.dir);
  oq.gains = s.gains;
  oq.scenario = "pulse";
  const Run q = run(cmd_simulate, oq);
  CHECK(q.code == 4);
  CHECK(json::parse(q.err).at("message").get<std::string>() == "zero disturbance energy");

  CommandOptions ou = o;
  ou.scenario = "nope";
  CHECK(run(cmd_simulate, ou).code == 1);
}

TEST_CASE("stored results round-trip exactly") {
  const auto& s = varying_delay();
  const SynthesisResult a = read_result(s.gains);
  const json ja = result_to_json(a);
  const SynthesisResult b = result_from_json(json::parse(ja.dump()));
  CHECK(result_to_json(b).dump() == ja.dump());

  // in-memory synthesis drives simulation identically to the re-read file
  const RunConfig cfg = load_config(s.config);
  const SynthesisResult mem = synthesize(cfg);
  REQUIRE(mem.ok());
  CHECK(result_to_json(mem).dump() == ja.dump());
  const Scenario& sc = cfg.scenario("slow");
  const auto real_mem = realization_for(cfg, mem);
  const auto real_file = realization_for(cfg, a);
  const json m1 = summary_to_json(summarize(simulate(cfg.plant, real_mem, mem.gains, sc), real_mem, mem.gamma, "slow"));
  const json m2 = summary_to_json(summarize(simulate(cfg.plant, real_file, a.gains, sc), real_file, a.gamma, "slow"));
  CHECK(m1.dump() == m2.dump());

  const auto c1 = analyze(cfg, mem, 1.05 * mem.gamma);
  const auto c2 = analyze(cfg, a, 1.05 * a.gamma);
  CHECK(certificate_to_json(c1).dump() == certificate_to_json(c2).dump());
}

TEST_CASE("small table: shape, out-of-scope row, ordering") {
  const fs::path dir = scratch("table");
  json j = bundled("table.json");
  j["table"]["columns"] = json::parse(R"([{"r": 0.9, "tau_bar": 1.0}, {"r": 1.5, "tau_bar": 1.0}])");
  j["table"]["rates"] = json::array({10.0, 0.1});
  const Run r = run(cmd_reproduce_table, options(write_config(j, dir), dir));
  REQUIRE(r.code == 0);
  std::ifstream in(dir / "table.csv");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "method,r=0.9 tau_bar=1,r=1.5 tau_bar=1");
  CHECK(lines[1].rfind("parameter_dependent nu=0.1,", 0) == 0);
  CHECK(lines[3].rfind("quadratic,", 0) == 0);
  CHECK(lines[4] == "lft_exact_memory,out_of_scope,out_of_scope");
  CHECK(json::parse(r.out).at("monotone").get<bool>());

  // the post-processing check itself fires on a reversed column
  TableReport rep;
  rep.rows = {"a", "b"};
  rep.columns = {TableColumn{0.0, 1.0}};
  TableCell lo, hi;
  lo.status = hi.status = sdp::SdpStatus::optimal;
  lo.gamma = 2.0;
  hi.gamma = 1.9;
  rep.cells = {lo, hi};
  CHECK(check_monotone(rep).size() == 1);
  rep.cells[1].gamma = 2.0 - 5e-5;
  CHECK(check_monotone(rep).empty());
}

TEST_CASE("iqc validation report is deterministic under a seed") {
  const fs::path dir = scratch("iqc");
  json j = bundled("iqc_suite.json");
  j["iqc"]["pairs"] = 3;
  const fs::path cfg = write_config(j, dir);
  CommandOptions o = options(cfg, dir);
  const Run a = run(cmd_validate_iqc, o);
  REQUIRE(a.code == 0);
  const Run b = run(cmd_validate_iqc, o);
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out).at("checks").size() == 5);
}

TEST_CASE("command-line binary") {
  const std::string cli = LPVIQC_CLI_PATH;
  const fs::path dir = scratch("binary");
  const fs::path cfg = write_config(bundled("example_quadratic.json"), dir);
  CHECK(shell(cli + " --help") == 0);
  CHECK(shell(cli + " synthesize --config " + cfg.string() + " --out " + dir.string()) == 0);
  CHECK(shell(cli + " analyze --config " + cfg.string() + " --gains " + (dir / "synthesis_result.json").string() +
              " --gamma 3.9 --out " + dir.string()) == 0);
  CHECK(shell(cli + " synthesize --config " + (dir / "absent.json").string()) == 1);
  CHECK(shell(cli + " frobnicate") == 1);
}

}  // TEST_SUITE
