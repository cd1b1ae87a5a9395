#pragma once

// Run configuration: a sectioned key/value file (INI) or the same schema as
// JSON. Every key is checked; unknown sections and keys are errors.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "franson/dispersion.hpp"
#include "franson/grid.hpp"
#include "franson/optimizer.hpp"
#include "franson/phase.hpp"
#include "franson/source.hpp"

namespace franson {

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(std::string_view text);
std::string_view to_string(OutputFormat format);

struct InterferometerSettings {
  double path_diff_b_m = 0.067;
  double detuning_m = 0.0;
  bool auto_offset = false;
  /// Raw φ₀, or the offset added after calibration when calibration_nm is set.
  double phase_offset_rad = 0.0;
  std::optional<double> calibration_nm;
};

struct AnalysisSettings {
  double threshold_phase_rad = 0.14;
  double sweep_step_nm = 0.1;
  double dispersion_min_nm = 1450.0;
  double dispersion_max_nm = 1650.0;
  double dispersion_step_nm = 1.0;
};

struct OptimizeSettings {
  DetuningSearch search;
  PhaseOffsetMode offset_mode;
  double threshold_phase_rad = 0.14;
};

struct SimulationSettings {
  std::uint64_t pairs = 1'000'000;
  std::uint64_t seed = 1;
  double eta_a = 0.20;
  double eta_b = 0.25;
  double dark_count_prob = 0.0;
  unsigned shards = 1;
  std::optional<double> forced_phase_rad;
  std::optional<int> channel;  // Alice channel index to filter on
};

struct OutputSettings {
  OutputFormat format = OutputFormat::csv;
  bool header_timestamp = true;
};

struct RunConfig {
  SourceSpec source;
  SellmeierModel fiber = fused_silica();
  InterferometerSettings interferometers;
  GridSpec grid;
  EdgeRule edge_rule = EdgeRule::center;
  AnalysisSettings analysis;
  OptimizeSettings optimize;
  SimulationSettings simulation;
  OutputSettings output;

  OptimizationProblem optimization_problem() const;
};

enum class ConfigSyntax { ini, json };

/// Parses and validates. Throws ConfigError naming `section.key`.
RunConfig parse_config(std::string_view text, ConfigSyntax syntax);

/// Reads `path`; `.json` files are JSON, anything else INI. A missing or
/// unreadable file is a ConfigError.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace franson
