#pragma once

#include "relbandit/simulation.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace relbandit {

/// Flat `key = value` settings; `#` starts a comment. Keys match the
/// SimulationConfig and AgentConfig field names.
using ConfigMap = std::map<std::string, std::string>;

/// Parses config text. Throws ConfigError naming the offending line or key.
ConfigMap parse_config(const std::string& text);

/// Reads and parses a config file. Throws IoError if it cannot be read.
ConfigMap read_config_file(const std::filesystem::path& path);

/// Everything needed to launch a `run`.
struct RunSettings {
  SimulationConfig sim;
  std::string dataset;
  std::string out;
  double linucb_alpha = 0.5;
};

/// Applies a config map on top of the built-in defaults (λ = 0.5, λ̃ = 1,
/// σ = 0.05, α = α̃ = 0.25, LinUCB α = 0.5, 400 rounds per user, 50
/// candidates, σ_g = 0.1, b(t) = 5⌊ln t⌋, 10 runs). Throws ConfigError on
/// unknown keys or malformed values.
RunSettings resolve_settings(const ConfigMap& map);

/// Serializes settings back to the flat format; resolve_settings(parse_config(x))
/// reproduces the same settings.
std::string render_settings(const RunSettings& settings);

}  // namespace relbandit
