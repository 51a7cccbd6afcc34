#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fockcat/fock.hpp"
#include "fockcat/protocol.hpp"
#include "fockcat/tomography.hpp"
#include "fockcat/wigner.hpp"

namespace fockcat::io {

using nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// ---- density matrices -------------------------------------------------------------

/// {"truncation": N, "modes": m, "re": [[...]], "im": [[...]]}
json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const json& j);

// ---- CSV artifacts ------------------------------------------------------------------

/// Header "x,p,w", one row per grid point, x outer.
void write_wigner_csv(const std::filesystem::path& path, const WignerGrid& grid);

/// Header "R,fidelity,alpha,z,squeezing_db".
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep);
SweepResult read_sweep_csv(const std::filesystem::path& path);

/// Header "x,theta". Parse failures name the offending line.
void write_quadratures_csv(const std::filesystem::path& path, const std::vector<QuadratureRecord>& records);
std::vector<QuadratureRecord> read_quadratures_csv(const std::filesystem::path& path);

/// Header "n_stor,fidelity".
void write_decay_csv(const std::filesystem::path& path, const std::vector<std::pair<int, double>>& points);
std::vector<std::pair<int, double>> read_decay_csv(const std::filesystem::path& path);

/// Generic CSV checker for --check: header must match and every row must have
/// that many finite numeric fields. Returns the number of data rows.
std::size_t validate_csv(const std::filesystem::path& path, const std::vector<std::string>& header);

// ---- configuration ------------------------------------------------------------------

json config_to_json(const ExperimentConfig& config);
/// Applies the keys present in `j` on top of `base`; unknown keys are errors.
ExperimentConfig config_from_json(const json& j, ExperimentConfig base = {});

/// $FOCKCAT_CONFIG_DIR if set, otherwise the directory baked in at build time.
std::filesystem::path config_directory();

struct ResolvedConfig {
  ExperimentConfig config;
  std::string profile;  // profile name or the file path that was loaded
  std::filesystem::path source;
};

/// `spec` is a path to a JSON file or the name of a profile in config_directory().
/// Throws ParseError naming the path when nothing can be loaded.
ResolvedConfig load_config(const std::string& spec);

// ---- reports --------------------------------------------------------------------------

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

/// Provenance for every file a command writes.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string config_profile;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string tool_version;
  double wall_seconds = 0.0;
};

json manifest_to_json(const RunManifest& m);
/// Writes `<first output>.manifest.json` next to the first output file.
std::filesystem::path write_manifest(const RunManifest& m);

}  // namespace fockcat::io
