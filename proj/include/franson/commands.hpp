#pragma once

// The five front-end commands. execute() maps failures to exit codes:
// 2 for configuration problems, 3 for numerical or domain errors.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "franson/config.hpp"

namespace franson {

enum class Command { sweep, plan, optimize, simulate, dispersion };

Command parse_command(std::string_view text);
std::string_view to_string(Command command);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct CommandOptions {
  Command command = Command::plan;
  std::string config_path;
  std::optional<std::string> out_path;  // stdout when unset
  std::optional<OutputFormat> format;   // overrides [output] format
  std::optional<std::string> svg_path;
  bool no_header_timestamp = false;
  std::optional<std::uint64_t> seed;  // overrides [simulation] seed
};

/// The payload a command produces, before anything is written.
struct CommandOutput {
  std::string table;                 // CSV or JSON text
  std::optional<std::string> svg;
  std::string summary;               // key=value lines for the console
};

/// Interferometers for sweep, plan and simulate: [interferometers] with its
/// calibration or automatic offset resolved against `pairs`.
InterferometerPair analysis_interferometers(const RunConfig& config, std::span<const ChannelPair> pairs);

/// Runs a command on an already parsed config. Throws on failure.
CommandOutput run_command(Command command, const RunConfig& config, OutputFormat format,
                          const std::optional<std::string>& timestamp, bool want_svg);

/// Loads the config, runs the command, writes the outputs. Files are only
/// written after the command succeeded. Returns the process exit code.
int execute(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace franson
