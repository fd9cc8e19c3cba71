#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "prs/rate_engine.hpp"
#include "prs/readout.hpp"

namespace prs {

using Json = nlohmann::ordered_json;

struct ScanSettings {
  double half_span = 0.0;       // rad/s
  int points = 101;
  double tau_spec = 0.0;        // s, spectrum pulse length
  std::vector<double> taus_scaled;  // width curve
  double duration = 0.0;        // s, dynamics
  int time_points = 0;          // dynamics samples including t = 0
  double dynamics_detuning = 0.0;  // rad/s
};

struct OutputSettings {
  std::string directory = ".";
  std::string prefix = "prs";
  bool gnuplot = true;
};

/// Everything one run needs, resolved from a preset, a file and overrides.
struct ScenarioConfig {
  Json document;  // fully resolved, every key present
  SpectroscopyScenario scenario;
  ReadoutConfig readout;
  ScanSettings scan;
  EvolutionMethod method = EvolutionMethod::matrix_exponential;
  double kappa = 0.5;
  OutputSettings output;
};

std::vector<std::string> preset_names();

/// Complete document for a named preset; throws ConfigError for unknown names.
Json preset_document(const std::string& name);

/// Starts from the preset named in `user` (default mg24_ca40), merges `user`
/// on top and rejects keys the schema does not know.
Json resolve_document(const Json& user);

/// Applies "a.b.c=value" to a resolved document. The value is read as JSON
/// when possible and as a plain string otherwise.
void apply_override(Json& document, const std::string& assignment);

/// Builds and validates the typed configuration; errors name the field.
ScenarioConfig build_config(const Json& document);

/// Reads a JSON file (empty path: preset only), applies overrides, builds.
ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                           const std::string& preset = "");

}  // namespace prs
