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


#include "lpviqc/serialize.hpp"

#include "lpviqc/config.hpp"

#include <fstream>
#include <ostream>

namespace lpviqc {

using nlohmann::json;

namespace {

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("result: expected a numeric list");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json matrices_to_json(const std::vector<Matrix>& ms) {
  json a = json::array();
  for (const Matrix& m : ms) a.push_back(matrix_to_json(m));
  return a;
}

std::vector<Matrix> matrices_from_json(const json& j) {
  std::vector<Matrix> out;
  for (const json& m : j) out.push_back(matrix_from_json(m));
  return out;
}

json intervals_to_json(const std::vector<Interval>& iv) {
  json a = json::array();
  for (const Interval& i : iv) a.push_back({i.lo, i.hi});
  return a;
}

std::vector<Interval> intervals_from_json(const json& j) {
  std::vector<Interval> out;
  for (const json& p : j) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

json basis_to_json(const std::vector<Monomial>& b) {
  json a = json::array();
  for (const Monomial& m : b) a.push_back(basis_name(m));
  return a;
}

std::vector<Monomial> basis_from_json(const json& j, std::size_t dim) {
  std::vector<Monomial> out;
  for (const json& n : j) out.push_back(parse_basis_name(n.get<std::string>(), dim));
  return out;
}

sdp::SdpStatus status_from_string(const std::string& s) {
  for (auto st : {sdp::SdpStatus::optimal, sdp::SdpStatus::infeasible, sdp::SdpStatus::numerical_failure}) {
    if (sdp::to_string(st) == s) return st;
  }
  throw InvalidArgument("result: unknown status '" + s + "'");
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("result: expected a nested array");
  if (j.empty()) return Matrix(0, 0);
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw InvalidArgument("result: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json result_to_json(const SynthesisResult& r) {
  json j;
  j["format"] = "lpviqc-synthesis-result";
  j["version"] = 1;
  j["status"] = sdp::to_string(r.status);
  j["message"] = r.message;
  j["gamma"] = r.gamma;
  j["iterations"] = r.iterations;
  j["delay"] = {{"tau_bar", r.delay.tau_bar}, {"r", r.delay.r}};
  json kinds = json::array();
  for (auto k : r.multipliers) kinds.push_back(to_string(k));
  j["multipliers"] = kinds;
  j["shaping"] = {{"c1", r.shaping.c1}, {"epsilon", r.shaping.epsilon}, {"delta", r.shaping.delta}};
  j["coupling"] = to_string(r.coupling);
  j["parameter_dimension"] = r.gains.domain.dimension() > 0 ? r.gains.domain.dimension()
                             : r.r_basis.empty()            ? 0
                                                            : r.r_basis.front().dimension();
  j["r_basis"] = basis_to_json(r.r_basis);
  j["x_basis"] = basis_to_json(r.x_basis);
  j["grid_counts"] = r.grid_counts;
  j["R"] = matrices_to_json(r.R);
  j["Xhat"] = matrices_to_json(r.Xhat);
  json xk = json::array();
  for (const auto& v : r.Xhat_k) xk.push_back(matrices_to_json(v));
  j["Xhat_k"] = xk;

  json g;
  g["box"] = intervals_to_json(r.gains.domain.box());
  g["rate_box"] = intervals_to_json(r.gains.domain.rate_box());
  g["counts"] = r.gains.counts;
  json pts = json::array();
  for (std::size_t i = 0; i < r.gains.points.size(); ++i) {
    pts.push_back({{"rho", vector_to_json(r.gains.points[i])},
                   {"F", matrix_to_json(r.gains.F[i])},
                   {"H", matrix_to_json(r.gains.H[i])}});
  }
  g["points"] = pts;
  j["gains"] = g;

  json diag = json::array();
  for (const GridDiagnostic& d : r.diagnostics) {
    diag.push_back({{"rho", vector_to_json(d.rho)},
                    {"lmi1_margin", d.lmi1_margin},
                    {"lmi2_margin", d.lmi2_margin},
                    {"r_min_eig", d.r_min_eig},
                    {"recovery_margin", d.recovery_margin},
                    {"gain_norm", d.gain_norm},
                    {"lmi1_vacuous", d.lmi1_vacuous}});
  }
  j["diagnostics"] = diag;
  return j;
}

SynthesisResult result_from_json(const json& j) {
  try {
    if (j.value("format", "") != "lpviqc-synthesis-result") throw InvalidArgument("not a synthesis result document");
    SynthesisResult r;
    r.status = status_from_string(j.at("status").get<std::string>());
    r.message = j.at("message").get<std::string>();
    r.gamma = j.at("gamma").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.delay = {j.at("delay").at("tau_bar").get<double>(), j.at("delay").at("r").get<double>()};
    r.delay.validate();
    for (const json& k : j.at("multipliers")) r.multipliers.push_back(multiplier_kind_from_string(k.get<std::string>()));
    const json& sh = j.at("shaping");
    r.shaping = {sh.at("c1").get<double>(), sh.at("epsilon").get<double>(), sh.at("delta").get<double>()};
    r.coupling = coupling_from_string(j.at("coupling").get<std::string>());
    const auto dim = j.at("parameter_dimension").get<std::size_t>();
    r.r_basis = basis_from_json(j.at("r_basis"), dim);
    r.x_basis = basis_from_json(j.at("x_basis"), dim);
    r.grid_counts = j.at("grid_counts").get<std::vector<int>>();
    r.R = matrices_from_json(j.at("R"));
    r.Xhat = matrices_from_json(j.at("Xhat"));
    for (const json& v : j.at("Xhat_k")) r.Xhat_k.push_back(matrices_from_json(v));

    const json& g = j.at("gains");
    r.gains.domain = ParameterDomain(intervals_from_json(g.at("box")), intervals_from_json(g.at("rate_box")));
    r.gains.counts = g.at("counts").get<std::vector<int>>();
    for (const json& p : g.at("points")) {
      r.gains.points.push_back(vector_from_json(p.at("rho")));
      r.gains.F.push_back(matrix_from_json(p.at("F")));
      r.gains.H.push_back(matrix_from_json(p.at("H")));
    }
    std::size_t expected = r.gains.points.empty() ? 0 : 1;
    for (int c : r.gains.counts) expected *= static_cast<std::size_t>(std::max(c, 0));
    if (!r.gains.points.empty() && (expected != r.gains.points.size() || r.gains.counts.size() != dim)) {
      throw InvalidArgument("gain grid does not match its counts");
    }

    for (const json& d : j.at("diagnostics")) {
      GridDiagnostic gd;
      gd.rho = vector_from_json(d.at("rho"));
      gd.lmi1_margin = d.at("lmi1_margin").get<double>();
      gd.lmi2_margin = d.at("lmi2_margin").get<double>();
      gd.r_min_eig = d.at("r_min_eig").get<double>();
      gd.recovery_margin = d.at("recovery_margin").get<double>();
      gd.gain_norm = d.at("gain_norm").get<double>();
      gd.lmi1_vacuous = d.at("lmi1_vacuous").get<bool>();
      r.diagnostics.push_back(gd);
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed synthesis result: ") + e.what());
  }
}

void write_json(const json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

void write_result(const SynthesisResult& result, const std::filesystem::path& path) {
  write_json(result_to_json(result), path);
}

SynthesisResult read_result(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open gains file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("gains file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return result_from_json(j);
}

void write_diagnostics_csv(const SynthesisResult& result, std::ostream& os) {
  const std::size_t s = result.diagnostics.empty() ? 0 : static_cast<std::size_t>(result.diagnostics.front().rho.size());
  for (std::size_t k = 0; k < s; ++k) os << "rho" << k + 1 << ",";
  os << "lmi1_margin,lmi2_margin,r_min_eig,recovery_margin,gain_norm,lmi1_vacuous\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  for (const GridDiagnostic& d : result.diagnostics) {
    for (Eigen::Index k = 0; k < d.rho.size(); ++k) os << num(d.rho[k]) << ",";
    os << num(d.lmi1_margin) << "," << num(d.lmi2_margin) << "," << num(d.r_min_eig) << ","
       << num(d.recovery_margin) << "," << num(d.gain_norm) << "," << (d.lmi1_vacuous ? 1 : 0) << "\n";
  }
}

json certificate_to_json(const AnalysisCertificate& c) {
  json j;
  j["format"] = "lpviqc-analysis-certificate";
  j["status"] = sdp::to_string(c.status);
  j["feasible"] = c.feasible();
  j["message"] = c.message;
  j["gamma"] = c.gamma;
  j["P"] = matrices_to_json(c.P);
  json xk = json::array();
  for (const auto& v : c.X_k) xk.push_back(matrices_to_json(v));
  j["X_k"] = xk;
  j["margins"] = c.margins;
  return j;
}

}  // namespace lpviqc
