#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbq/shaper.hpp"
#include "fbq/spectra.hpp"
#include "fbq/states.hpp"

// File formats: JSON for structured reports, CSV for curves and matrices.
// Complex numbers serialize as [re, im] pairs; doubles use shortest
// round-trip form, so write/read cycles are bit-exact.
// Count files carry a schema tag (fbq-counts-v1); they are the interchange
// format between the shaper, tomography and bell layers.

namespace fbq {

using json = nlohmann::ordered_json;

inline constexpr const char* counts_schema_version = "fbq-counts-v1";

json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const json& j);

json state_to_json(const BipartiteStateVector& psi);
BipartiteStateVector state_from_json(const json& j);

json counts_to_json(const std::vector<CountRecord>& records);
std::vector<CountRecord> counts_from_json(const json& j);

std::string counts_to_csv(const std::vector<CountRecord>& records);
std::vector<CountRecord> counts_from_csv(const std::string& csv);

// CSV writers used by the CLI; every file starts with provenance comments
// (# key: value) injected by the caller.
std::string format_double(double x);  // shortest round-trip decimal
std::string schmidt_to_csv(const SchmidtReport& report);
std::string jsa_to_csv(const JsaGrid& grid);
std::string matrix_to_csv(const Eigen::MatrixXd& m);

// Atomic file write: temp file in the same directory, then rename.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace fbq
