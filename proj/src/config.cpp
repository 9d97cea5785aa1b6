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


#include "lpviqc/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace lpviqc {

using nlohmann::json;

namespace {

constexpr int kMaxCatalogExponent = 6;

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw InvalidArgument(where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidArgument(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InvalidArgument(where + ": must be finite");
  return v;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? get_number(j.at(key), where + "." + key) : fallback;
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw InvalidArgument(where + ": expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw InvalidArgument(where + ": expected a string");
  return j.get<std::string>();
}

Matrix get_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidArgument(where + ": expected a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw InvalidArgument(where + ": expected a nested array");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument(where + ": ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = get_number(row[static_cast<std::size_t>(c)], where);
    }
  }
  return m;
}

std::vector<Interval> get_intervals(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidArgument(where + ": expected a list of [lo, hi] pairs");
  std::vector<Interval> out;
  for (const json& p : j) {
    if (!p.is_array() || p.size() != 2) throw InvalidArgument(where + ": expected [lo, hi]");
    Interval iv{get_number(p[0], where), get_number(p[1], where)};
    if (!(iv.lo <= iv.hi)) throw InvalidArgument(where + ": lo must not exceed hi");
    out.push_back(iv);
  }
  return out;
}

// Either a nested array (constant) or a list of {basis, coeff} terms.
ParamMatrix get_param_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, std::size_t dim,
                             const std::string& where) {
  ParamMatrix pm = ParamMatrix::zero(rows, cols, dim);
  auto check = [&](const Matrix& m) {
    if (m.rows() != rows || m.cols() != cols) {
      throw InvalidArgument(where + ": must be " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  };
  if (j.is_array() && (j.empty() || j[0].is_array())) {
    if (j.empty() && rows * cols != 0) check(Matrix(0, 0));
    if (!j.empty()) {
      const Matrix m = get_matrix(j, where);
      check(m);
      pm.add_term(Monomial::constant(dim), m);
    }
    return pm;
  }
  if (!j.is_array()) throw InvalidArgument(where + ": expected a matrix or a list of terms");
  for (const json& t : j) {
    allow_keys(t, where, {"basis", "coeff"});
    if (!t.contains("basis") || !t.contains("coeff")) throw InvalidArgument(where + ": term needs basis and coeff");
    const Monomial m = parse_basis_name(get_string(t.at("basis"), where + ".basis"), dim);
    const Matrix c = get_matrix(t.at("coeff"), where + ".coeff");
    check(c);
    pm.add_term(m, c);
  }
  return pm;
}

std::vector<Monomial> get_basis_list(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(where + ": expected a non-empty list of basis names");
  std::vector<Monomial> out;
  for (const json& n : j) out.push_back(parse_basis_name(get_string(n, where), dim));
  return out;
}

sdp::SolverOptions parse_solver(const json& j, const std::string& where) {
  allow_keys(j, where, {"gap_tol", "feas_tol", "infeas_tol", "max_iter", "strictness", "verbose"});
  sdp::SolverOptions o;
  o.gap_tol = number_or(j, "gap_tol", o.gap_tol, where);
  o.feas_tol = number_or(j, "feas_tol", o.feas_tol, where);
  o.infeas_tol = number_or(j, "infeas_tol", o.infeas_tol, where);
  o.strictness = number_or(j, "strictness", o.strictness, where);
  if (j.contains("max_iter")) o.max_iter = get_int(j.at("max_iter"), where + ".max_iter");
  if (j.contains("verbose")) {
    if (!j.at("verbose").is_boolean()) throw InvalidArgument(where + ".verbose: expected a boolean");
    o.verbose = j.at("verbose").get<bool>();
  }
  require(o.gap_tol > 0 && o.feas_tol > 0 && o.infeas_tol > 0 && o.max_iter > 0 && o.strictness >= 0,
          where + ": tolerances and max_iter must be positive");
  return o;
}

DelayedLpvPlant parse_plant(const json& doc, const DelaySpec& delay, RunConfig& cfg) {
  const json& p = doc.at("plant");
  allow_keys(p, "plant", {"example", "dims", "matrices"});
  const json par = doc.value("parameter", json::object());
  allow_keys(par, "parameter", {"box", "rate_box", "rate_bound"});

  if (p.contains("example")) {
    if (p.contains("dims") || p.contains("matrices")) {
      throw InvalidArgument("plant: 'example' excludes 'dims' and 'matrices'");
    }
    const json& ex = p.at("example");
    allow_keys(ex, "plant.example", {"phi", "sigma"});
    cfg.example_plant = true;
    cfg.example_phi = number_or(ex, "phi", 0.2, "plant.example");
    cfg.example_sigma = number_or(ex, "sigma", 0.1, "plant.example");
    if (par.contains("box")) throw InvalidArgument("parameter.box: fixed to [-1, 1] for the example plant");
    double nu = number_or(par, "rate_bound", 0.0, "parameter");
    require(nu >= 0.0, "parameter.rate_bound must be non-negative");
    DelayedLpvPlant plant = example_plant(delay, nu, cfg.example_phi, cfg.example_sigma);
    if (par.contains("rate_box")) {
      if (par.contains("rate_bound")) throw InvalidArgument("parameter: give rate_bound or rate_box, not both");
      plant.domain = ParameterDomain(plant.domain.box(), get_intervals(par.at("rate_box"), "parameter.rate_box"));
    }
    return plant;
  }

  if (!p.contains("dims") || !p.contains("matrices")) throw InvalidArgument("plant: needs 'example' or 'dims' + 'matrices'");
  if (!par.contains("box")) throw InvalidArgument("parameter.box is required for a custom plant");
  if (par.contains("rate_bound")) throw InvalidArgument("parameter.rate_bound applies to the example plant only");
  const std::vector<Interval> box = get_intervals(par.at("box"), "parameter.box");
  require(!box.empty(), "parameter.box must not be empty");
  std::vector<Interval> rates(box.size(), Interval{0.0, 0.0});
  if (par.contains("rate_box")) rates = get_intervals(par.at("rate_box"), "parameter.rate_box");
  require(rates.size() == box.size(), "parameter.rate_box must match parameter.box in length");

  const json& d = p.at("dims");
  allow_keys(d, "plant.dims", {"nx", "nd", "nu", "ne"});
  for (const char* k : {"nx", "nd", "nu", "ne"}) {
    if (!d.contains(k)) throw InvalidArgument(std::string("plant.dims.") + k + " is required");
  }
  DelayedLpvPlant plant;
  plant.dims = {get_int(d.at("nx"), "plant.dims.nx"), get_int(d.at("nd"), "plant.dims.nd"),
                get_int(d.at("nu"), "plant.dims.nu"), get_int(d.at("ne"), "plant.dims.ne")};
  require(plant.dims.nx > 0 && plant.dims.nd > 0 && plant.dims.nu > 0 && plant.dims.ne > 0,
          "plant.dims must be positive");
  plant.delay = delay;
  plant.domain = ParameterDomain(box, rates);
  const std::size_t s = box.size();
  const auto& D = plant.dims;

  const json& m = p.at("matrices");
  allow_keys(m, "plant.matrices", {"Ap", "Ad", "Bp1", "Bp2", "Cp1", "Cd1", "Dp11", "Dp12"});
  auto get = [&](const char* name, Eigen::Index r, Eigen::Index c) {
    if (!m.contains(name)) return ParamMatrix::zero(r, c, s);
    return get_param_matrix(m.at(name), r, c, s, std::string("plant.matrices.") + name);
  };
  plant.Ap = get("Ap", D.nx, D.nx);
  plant.Ad = get("Ad", D.nx, D.nx);
  plant.Bp1 = get("Bp1", D.nx, D.nd);
  plant.Bp2 = get("Bp2", D.nx, D.nu);
  plant.Cp1 = get("Cp1", D.ne, D.nx);
  plant.Cd1 = get("Cd1", D.ne, D.nx);
  plant.Dp11 = get("Dp11", D.ne, D.nd);
  plant.Dp12 = get("Dp12", D.ne, D.nu);
  plant.validate();
  return plant;
}

void parse_multipliers(const json& doc, RunConfig& cfg) {
  if (!doc.contains("multipliers")) return;
  const json& j = doc.at("multipliers");
  allow_keys(j, "multipliers", {"kinds", "c1", "epsilon", "delta"});
  ShapingConstants& sh = cfg.synthesis.shaping;
  sh.c1 = number_or(j, "c1", sh.c1, "multipliers");
  sh.epsilon = number_or(j, "epsilon", sh.epsilon, "multipliers");
  sh.delta = number_or(j, "delta", sh.delta, "multipliers");
  if (j.contains("kinds")) {
    const json& k = j.at("kinds");
    if (k.is_string()) {
      if (k.get<std::string>() != "auto") throw InvalidArgument("multipliers.kinds: expected \"auto\" or a list");
    } else if (k.is_array() && !k.empty()) {
      for (const json& n : k) cfg.synthesis.multipliers.push_back(multiplier_kind_from_string(get_string(n, "multipliers.kinds")));
    } else {
      throw InvalidArgument("multipliers.kinds: expected \"auto\" or a non-empty list");
    }
  }
}

void parse_synthesis(const json& doc, RunConfig& cfg) {
  const std::size_t s = cfg.plant.domain.dimension();
  std::vector<MultiplierKind> kinds = cfg.synthesis.multipliers;
  ShapingConstants shaping = cfg.synthesis.shaping;
  const json j = doc.value("synthesis", json::object());
  allow_keys(j, "synthesis", {"lyapunov", "r_basis", "x_basis", "r_degree", "x_degree", "grid", "gamma",
                              "recovery_margin", "coupling", "nullspace_tol", "solver"});

  int grid = 11;
  std::vector<int> counts;
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (g.is_number_integer()) {
      grid = g.get<int>();
    } else if (g.is_array()) {
      for (const json& c : g) counts.push_back(get_int(c, "synthesis.grid"));
      require(counts.size() == s, "synthesis.grid: one count per parameter component");
    } else {
      throw InvalidArgument("synthesis.grid: expected an integer or a list");
    }
  }
  const std::string lyap = j.contains("lyapunov") ? get_string(j.at("lyapunov"), "synthesis.lyapunov") : "quadratic";
  if (lyap == "quadratic") {
    for (const char* k : {"r_degree", "x_degree"}) {
      if (j.contains(k)) throw InvalidArgument(std::string("synthesis.") + k + " needs lyapunov=parameter_dependent");
    }
    cfg.synthesis = SynthesisConfig::quadratic(s, grid);
  } else if (lyap == "parameter_dependent") {
    const int rd = j.contains("r_degree") ? get_int(j.at("r_degree"), "synthesis.r_degree") : 2;
    const int xd = j.contains("x_degree") ? get_int(j.at("x_degree"), "synthesis.x_degree") : 1;
    require(rd >= 0 && rd <= kMaxCatalogExponent && xd >= 0 && xd <= kMaxCatalogExponent,
            "synthesis: basis degrees must lie in [0, 6]");
    cfg.synthesis = SynthesisConfig::parameter_dependent(s, rd, xd, grid);
  } else {
    throw InvalidArgument("synthesis.lyapunov: expected quadratic or parameter_dependent");
  }
  cfg.synthesis.multipliers = kinds;
  cfg.synthesis.shaping = shaping;
  if (!counts.empty()) cfg.synthesis.grid_counts = counts;
  if (j.contains("r_basis")) cfg.synthesis.r_basis = get_basis_list(j.at("r_basis"), s, "synthesis.r_basis");
  if (j.contains("x_basis")) cfg.synthesis.x_basis = get_basis_list(j.at("x_basis"), s, "synthesis.x_basis");
  if (j.contains("gamma")) {
    const json& g = j.at("gamma");
    if (g.is_string()) {
      if (g.get<std::string>() != "minimize") throw InvalidArgument("synthesis.gamma: expected \"minimize\" or a number");
    } else {
      cfg.synthesis.gamma_mode = GammaMode::fixed;
      cfg.synthesis.fixed_gamma = get_number(g, "synthesis.gamma");
    }
  }
  cfg.synthesis.recovery_margin = number_or(j, "recovery_margin", cfg.synthesis.recovery_margin, "synthesis");
  cfg.synthesis.nullspace_tol = number_or(j, "nullspace_tol", cfg.synthesis.nullspace_tol, "synthesis");
  if (j.contains("coupling")) cfg.synthesis.coupling = coupling_from_string(get_string(j.at("coupling"), "synthesis.coupling"));
  if (j.contains("solver")) cfg.synthesis.solver = parse_solver(j.at("solver"), "synthesis.solver");
  cfg.synthesis.validate(s);

  // multiplier admissibility is a config error, caught before any solve
  if (cfg.synthesis.multipliers.empty()) {
    (void)select_multipliers(cfg.plant.delay, cfg.synthesis.shaping);
  } else {
    for (MultiplierKind k : cfg.synthesis.multipliers) (void)make_multiplier(k, cfg.plant.delay, cfg.synthesis.shaping);
  }
}

Scenario parse_scenario(const json& j, std::size_t s, std::size_t nd, std::size_t nx, std::size_t index) {
  const std::string where = "scenarios[" + std::to_string(index) + "]";
  allow_keys(j, where, {"name", "horizon", "step", "rho", "tau", "d", "x0"});
  Scenario sc;
  if (!j.contains("name")) throw InvalidArgument(where + ": name is required");
  sc.name = get_string(j.at("name"), where + ".name");
  sc.horizon = number_or(j, "horizon", sc.horizon, where);
  sc.step = number_or(j, "step", sc.step, where);
  require(sc.horizon > 0.0 && sc.step > 0.0, where + ": horizon and step must be positive");
  auto list = [&](const char* key, std::size_t n) {
    std::vector<Trajectory> out;
    if (!j.contains(key)) throw InvalidArgument(where + "." + key + " is required");
    const json& a = j.at(key);
    if (a.is_object()) {
      out.push_back(parse_trajectory(a));
    } else if (a.is_array()) {
      for (const json& t : a) out.push_back(parse_trajectory(t));
    } else {
      throw InvalidArgument(where + "." + key + ": expected a trajectory or a list");
    }
    if (out.size() != n) throw InvalidArgument(where + "." + key + ": expected " + std::to_string(n) + " trajectories");
    return out;
  };
  sc.rho = list("rho", s);
  sc.d = list("d", nd);
  if (!j.contains("tau")) throw InvalidArgument(where + ".tau is required");
  sc.tau = parse_trajectory(j.at("tau"));
  if (j.contains("x0")) {
    const json& x = j.at("x0");
    if (!x.is_array() || x.size() != nx) throw InvalidArgument(where + ".x0: expected " + std::to_string(nx) + " numbers");
    Vector v(static_cast<Eigen::Index>(nx));
    for (std::size_t i = 0; i < nx; ++i) v[static_cast<Eigen::Index>(i)] = get_number(x[i], where + ".x0");
    sc.x0 = v;
  }
  return sc;
}

}  // namespace

Monomial parse_basis_name(const std::string& raw, std::size_t dimension) {
  std::string name;
  for (char c : raw) {
    if (c != ' ') name += c;
  }
  std::vector<int> e(dimension, 0);
  const std::string err = "unknown basis function '" + raw + "'";
  if (name == "1") return Monomial(e);
  std::stringstream ss(name);
  std::string factor;
  while (std::getline(ss, factor, '*')) {
    if (factor.rfind("rho", 0) != 0) throw InvalidArgument(err);
    const std::size_t caret = factor.find('^');
    const std::string idx = factor.substr(3, caret == std::string::npos ? std::string::npos : caret - 3);
    const std::string pw = caret == std::string::npos ? "1" : factor.substr(caret + 1);
    auto digits = [](const std::string& t) {
      return !t.empty() && t.size() < 4 && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!digits(idx) || !digits(pw)) throw InvalidArgument(err);
    const int k = std::stoi(idx);
    const int p = std::stoi(pw);
    if (k < 1 || static_cast<std::size_t>(k) > dimension || p < 1) throw InvalidArgument(err);
    e[static_cast<std::size_t>(k - 1)] += p;
    if (e[static_cast<std::size_t>(k - 1)] > kMaxCatalogExponent) throw InvalidArgument(err);
  }
  return Monomial(e);
}

std::string basis_name(const Monomial& m) {
  std::string out;
  for (std::size_t k = 0; k < m.dimension(); ++k) {
    const int p = m.exponents()[k];
    if (p == 0) continue;
    if (!out.empty()) out += "*";
    out += "rho" + std::to_string(k + 1);
    if (p > 1) out += "^" + std::to_string(p);
  }
  return out.empty() ? "1" : out;
}

Trajectory parse_trajectory(const json& j) {
  allow_keys(j, "trajectory", {"kind", "params"});
  if (!j.contains("kind")) throw InvalidArgument("trajectory: kind is required");
  const Trajectory::Kind kind = trajectory_kind_from_string(get_string(j.at("kind"), "trajectory.kind"));
  const json p = j.value("params", json::object());
  const std::string w = "trajectory.params";
  Trajectory t;
  switch (kind) {
    case Trajectory::Kind::constant:
      allow_keys(p, w, {"value"});
      t = Trajectory::constant(number_or(p, "value", 0.0, w));
      break;
    case Trajectory::Kind::sinusoid:
      allow_keys(p, w, {"amplitude", "frequency", "phase", "offset"});
      t = Trajectory::sinusoid(number_or(p, "amplitude", 0.0, w), number_or(p, "frequency", 0.0, w),
                               number_or(p, "phase", 0.0, w), number_or(p, "offset", 0.0, w));
      break;
    case Trajectory::Kind::pulse:
      allow_keys(p, w, {"amplitude", "start", "stop"});
      t = Trajectory::pulse(number_or(p, "amplitude", 1.0, w), number_or(p, "start", 0.0, w),
                            number_or(p, "stop", 0.0, w));
      break;
    case Trajectory::Kind::tabulated: {
      allow_keys(p, w, {"times", "values"});
      auto vec = [&](const char* key) {
        std::vector<double> v;
        if (!p.contains(key) || !p.at(key).is_array()) throw InvalidArgument(w + "." + key + ": expected a list");
        for (const json& x : p.at(key)) v.push_back(get_number(x, w + "." + key));
        return v;
      };
      t = Trajectory::tabulated(vec("times"), vec("values"));
      break;
    }
  }
  t.validate();
  return t;
}

json trajectory_to_json(const Trajectory& t) {
  json p = json::object();
  switch (t.kind) {
    case Trajectory::Kind::constant: p = {{"value", t.value}}; break;
    case Trajectory::Kind::sinusoid:
      p = {{"amplitude", t.amplitude}, {"frequency", t.frequency}, {"phase", t.phase}, {"offset", t.value}};
      break;
    case Trajectory::Kind::pulse: p = {{"amplitude", t.value}, {"start", t.start}, {"stop", t.stop}}; break;
    case Trajectory::Kind::tabulated: p = {{"times", t.times}, {"values", t.values}}; break;
  }
  return {{"kind", to_string(t.kind)}, {"params", p}};
}

const Scenario& RunConfig::scenario(const std::string& name) const {
  for (const Scenario& s : scenarios) {
    if (s.name == name) return s;
  }
  throw InvalidArgument("no scenario named '" + name + "'");
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  allow_keys(doc, "config", {"plant", "parameter", "delay", "multipliers", "synthesis", "analysis", "scenarios",
                             "table", "iqc", "output", "seed", "license"});
  if (!doc.contains("plant")) throw InvalidArgument("config: plant is required");
  if (!doc.contains("delay")) throw InvalidArgument("config: delay is required");
  RunConfig cfg;

  const json& dj = doc.at("delay");
  allow_keys(dj, "delay", {"tau_bar", "r"});
  if (!dj.contains("tau_bar")) throw InvalidArgument("delay.tau_bar is required");
  DelaySpec delay{get_number(dj.at("tau_bar"), "delay.tau_bar"), number_or(dj, "r", 0.0, "delay")};
  delay.validate();

  cfg.plant = parse_plant(doc, delay, cfg);
  parse_multipliers(doc, cfg);
  parse_synthesis(doc, cfg);

  if (doc.contains("analysis")) {
    const json& a = doc.at("analysis");
    allow_keys(a, "analysis", {"p_degree"});
    if (a.contains("p_degree")) cfg.analysis_p_degree = get_int(a.at("p_degree"), "analysis.p_degree");
    require(cfg.analysis_p_degree <= kMaxCatalogExponent, "analysis.p_degree must not exceed 6");
  }

  if (doc.contains("scenarios")) {
    const json& s = doc.at("scenarios");
    if (!s.is_array()) throw InvalidArgument("scenarios: expected a list");
    std::set<std::string> names;
    for (std::size_t i = 0; i < s.size(); ++i) {
      Scenario sc = parse_scenario(s[i], cfg.plant.domain.dimension(), static_cast<std::size_t>(cfg.plant.dims.nd),
                                   static_cast<std::size_t>(cfg.plant.dims.nx), i);
      if (!names.insert(sc.name).second) throw InvalidArgument("scenarios: duplicate name '" + sc.name + "'");
      cfg.scenarios.push_back(std::move(sc));
    }
  }

  if (doc.contains("table")) {
    const json& t = doc.at("table");
    allow_keys(t, "table", {"columns", "rates", "quadratic", "r_degree", "x_degree"});
    if (!t.contains("columns") || !t.at("columns").is_array()) throw InvalidArgument("table.columns: expected a list");
    for (const json& c : t.at("columns")) {
      allow_keys(c, "table.columns", {"r", "tau_bar"});
      if (!c.contains("r") || !c.contains("tau_bar")) throw InvalidArgument("table.columns: need r and tau_bar");
      TableColumn col{get_number(c.at("r"), "table.columns.r"), get_number(c.at("tau_bar"), "table.columns.tau_bar")};
      DelaySpec{col.tau_bar, col.r}.validate();
      cfg.table.columns.push_back(col);
    }
    if (t.contains("rates")) {
      if (!t.at("rates").is_array()) throw InvalidArgument("table.rates: expected a list");
      for (const json& v : t.at("rates")) {
        const double nu = get_number(v, "table.rates");
        require(nu >= 0.0, "table.rates must be non-negative");
        cfg.table.rates.push_back(nu);
      }
      if (!cfg.table.rates.empty() && !cfg.example_plant) {
        throw InvalidArgument("table.rates: rate-bound rows need the example plant");
      }
    }
    if (t.contains("quadratic")) {
      if (!t.at("quadratic").is_boolean()) throw InvalidArgument("table.quadratic: expected a boolean");
      cfg.table.quadratic_row = t.at("quadratic").get<bool>();
    }
    if (t.contains("r_degree")) cfg.table.r_degree = get_int(t.at("r_degree"), "table.r_degree");
    if (t.contains("x_degree")) cfg.table.x_degree = get_int(t.at("x_degree"), "table.x_degree");
  }

  if (doc.contains("iqc")) {
    const json& q = doc.at("iqc");
    allow_keys(q, "iqc", {"cases", "pairs"});
    if (q.contains("pairs")) {
      const int n = get_int(q.at("pairs"), "iqc.pairs");
      require(n >= 0, "iqc.pairs must be non-negative");
      cfg.iqc.pairs = static_cast<std::size_t>(n);
    }
    if (q.contains("cases")) {
      if (!q.at("cases").is_array()) throw InvalidArgument("iqc.cases: expected a list");
      for (const json& c : q.at("cases")) {
        allow_keys(c, "iqc.cases", {"r", "tau_bar"});
        if (!c.contains("tau_bar")) throw InvalidArgument("iqc.cases: tau_bar is required");
        DelaySpec d{get_number(c.at("tau_bar"), "iqc.cases.tau_bar"), number_or(c, "r", 0.0, "iqc.cases")};
        d.validate();
        cfg.iqc.cases.push_back(d);
      }
    }
  }
  if (cfg.iqc.cases.empty()) cfg.iqc.cases.push_back(delay);

  if (doc.contains("output")) {
    std::filesystem::path out = get_string(doc.at("output"), "output");
    cfg.output_dir = out.is_absolute() ? out : base_dir / out;
  } else {
    cfg.output_dir = base_dir;
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw InvalidArgument("seed: expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, ".");
}

}  // namespace lpviqc
