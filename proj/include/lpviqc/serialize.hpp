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

#include "json.hpp"

#include <filesystem>
#include <iosfwd>

namespace lpviqc {

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

/// Everything needed to rebuild the realization and the gain schedule; doubles
/// are written in shortest round-trip form so re-reading is exact.
nlohmann::json result_to_json(const SynthesisResult& result);
SynthesisResult result_from_json(const nlohmann::json& j);

void write_result(const SynthesisResult& result, const std::filesystem::path& path);
/// InvalidArgument on a missing or malformed file.
SynthesisResult read_result(const std::filesystem::path& path);

/// rho..., lmi1_margin, lmi2_margin, r_min_eig, recovery_margin, gain_norm, lmi1_vacuous
void write_diagnostics_csv(const SynthesisResult& result, std::ostream& os);

nlohmann::json certificate_to_json(const AnalysisCertificate& cert);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace lpviqc
