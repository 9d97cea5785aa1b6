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
#include "lpviqc/pipeline.hpp"
#include "lpviqc/serialize.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace lpviqc;
using nlohmann::json;

namespace {

// config may be a JSON text or a path to a JSON file
RunConfig config_from(const std::string& text_or_path, const std::string& base_dir) {
  const auto first = text_or_path.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text_or_path[first] == '{') return parse_config(json::parse(text_or_path), base_dir);
  return load_config(text_or_path);
}

SynthesisResult result_from(const std::string& text) { return result_from_json(json::parse(text)); }

py::dict trace_dict(const SimulationTrace& tr) {
  py::dict d;
  d["t"] = tr.t;
  d["x_p"] = tr.x_p;
  d["x_psi"] = tr.x_psi;
  d["w"] = tr.w;
  d["u"] = tr.u;
  d["e"] = tr.e;
  d["d"] = tr.d;
  d["tau"] = tr.tau;
  d["rho"] = tr.rho;
  return d;
}

}  // namespace

PYBIND11_MODULE(_lpviqc, m) {
  static py::exception<ClassViolation> class_violation(m, "ClassViolation", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ClassViolation& e) {
      PyErr_SetString(class_violation.ptr(), e.what());
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def(
      "synthesize",
      [](const std::string& config, const std::string& base_dir) {
        const RunConfig cfg = config_from(config, base_dir);
        SynthesisResult r;
        {
          py::gil_scoped_release release;
          r = synthesize(cfg);
        }
        return result_to_json(r).dump();
      },
      py::arg("config"), py::arg("base_dir") = ".");

  m.def(
      "analyze",
      [](const std::string& config, const std::string& result, std::optional<double> gamma, const std::string& base_dir) {
        const RunConfig cfg = config_from(config, base_dir);
        const SynthesisResult r = result_from(result);
        py::gil_scoped_release release;
        return certificate_to_json(analyze(cfg, r, gamma)).dump();
      },
      py::arg("config"), py::arg("result"), py::arg("gamma") = std::nullopt, py::arg("base_dir") = ".");

  m.def(
      "simulate",
      [](const std::string& config, const std::string& result, std::optional<std::string> scenario,
         const std::string& base_dir) {
        const RunConfig cfg = config_from(config, base_dir);
        const SynthesisResult r = result_from(result);
        std::string name;
        if (scenario) {
          name = *scenario;
        } else {
          if (cfg.scenarios.size() != 1) throw InvalidArgument("scenario name required");
          name = cfg.scenarios.front().name;
        }
        const Scenario& sc = cfg.scenario(name);
        const auto real = realization_for(cfg, r);
        SimulationTrace tr;
        {
          py::gil_scoped_release release;
          tr = simulate(cfg.plant, real, r.gains, sc);
        }
        const auto s = summarize(tr, real, r.gamma, name);
        return py::make_tuple(summary_to_json(s).dump(), trace_dict(tr));
      },
      py::arg("config"), py::arg("result"), py::arg("scenario") = std::nullopt, py::arg("base_dir") = ".");

  m.def(
      "reproduce_table",
      [](const std::string& config, unsigned threads, const std::string& base_dir) {
        const RunConfig cfg = config_from(config, base_dir);
        TableReport rep;
        {
          py::gil_scoped_release release;
          rep = reproduce_table(cfg, threads);
        }
        py::list rows;
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
          py::list cells;
          for (std::size_t j = 0; j < rep.columns.size(); ++j) {
            const TableCell& c = rep.cell(i, j);
            py::dict d;
            d["r"] = c.column.r;
            d["tau_bar"] = c.column.tau_bar;
            d["status"] = sdp::to_string(c.status);
            d["gamma"] = c.gamma;
            cells.append(d);
          }
          py::dict row;
          row["label"] = rep.rows[i];
          row["cells"] = cells;
          rows.append(row);
        }
        py::dict out;
        out["rows"] = rows;
        out["monotone"] = rep.monotone;
        return out;
      },
      py::arg("config"), py::arg("threads") = 0u, py::arg("base_dir") = ".");

  m.def(
      "validate_iqc",
      [](double tau_bar, double r, std::vector<std::string> kinds, std::size_t pairs, std::uint64_t seed) {
        const DelaySpec delay{tau_bar, r};
        std::vector<MultiplierKind> ks;
        if (kinds.empty()) {
          for (const auto& s : select_multipliers(delay)) ks.push_back(s.kind);
        } else {
          for (const auto& k : kinds) ks.push_back(multiplier_kind_from_string(k));
        }
        IqcValidationReport rep;
        {
          py::gil_scoped_release release;
          rep = validate_iqc(delay, ks, ShapingConstants{}, pairs, seed);
        }
        py::list ms;
        for (const auto& v : rep.multipliers) {
          py::dict d;
          d["kind"] = to_string(v.kind);
          d["factorization_error"] = v.factorization.max_error;
          d["hurwitz"] = v.hurwitz;
          d["worst_normalized_integral"] = v.worst_normalized_integral;
          d["pairs"] = v.pairs;
          d["pass"] = v.pass;
          ms.append(d);
        }
        py::dict out;
        out["multipliers"] = ms;
        out["pass"] = rep.pass;
        return out;
      },
      py::arg("tau_bar"), py::arg("r"), py::arg("kinds") = std::vector<std::string>{}, py::arg("pairs") = 50,
      py::arg("seed") = 1);

  m.def(
      "multiplier_response",
      [](const std::string& kind, double tau_bar, double r, double omega) {
        const std::vector<MultiplierSpec> specs = {
            make_multiplier(multiplier_kind_from_string(kind), DelaySpec{tau_bar, r}, ShapingConstants{})};
        return py::make_tuple(specs[0].phi(omega), channel_response(realize_filter(specs, 1), 0, omega));
      },
      py::arg("kind"), py::arg("tau_bar"), py::arg("r"), py::arg("omega"));

  m.def("parse_config", [](const std::string& config, const std::string& base_dir) {
    config_from(config, base_dir);
  }, py::arg("config"), py::arg("base_dir") = ".");
}
