#pragma once

#include <string>
#include <vector>

#include "swnudge/harness.hpp"

namespace swnudge {

// Sweep axes; the variation list is their cartesian product in declaration
// order (alpha outermost, dt innermost). An absent dts axis means no
// per-row dt override.
struct SweepAxes {
  std::vector<double> alphas = {1.0, 1000.0};
  std::vector<double> beta_hs = {5e-7};
  std::vector<double> noises = {0.0};
  std::vector<double> dts;
};

// A fully resolved configuration: every field has a value (defaults are the
// reference experiment), so an empty file reproduces the baseline run.
struct ResolvedConfig {
  TwinConfig twin;
  SweepAxes sweep;
};

// Parses the sectioned key = value format. Sections: [grid], [model],
// [observer], [noise], [sweep]. '#' and ';' start comments. Unknown sections
// or keys, malformed values, and violated basic bounds throw ConfigError.
ResolvedConfig parse_config_string(const std::string& text);

// Reads and parses a config file; a missing file throws ConfigError naming
// the path.
ResolvedConfig parse_config_file(const std::string& path);

// Canonical serialization of a resolved config: one "section.key=value" line
// per parameter, sorted, %.17g numbers. The config hash is the FNV-1a 64 of
// this text, so it is stable across platforms for identical configs.
std::string canonical_config(const ResolvedConfig& cfg);
std::string config_hash(const ResolvedConfig& cfg);

// The cartesian product of the sweep axes.
std::vector<SweepPoint> sweep_points(const ResolvedConfig& cfg);

}  // namespace swnudge
