// franson: channel planning and simulation for energy-time entangled pairs
// analyzed with Franson interferometers over DWDM grids.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "franson/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dispersion-aware channel planning for Franson-type energy-time entanglement analysis"};
  app.set_version_flag("--version", "franson 1.0.0");

  std::string command;
  franson::CommandOptions options;
  std::string format;
  std::string out_path, svg_path;
  std::uint64_t seed = 0;

  app.add_option("command", command, "sweep | plan | optimize | simulate | dispersion")
      ->required()
      ->check(CLI::IsMember({"sweep", "plan", "optimize", "simulate", "dispersion"}));
  app.add_option("--config", options.config_path, "Configuration file (INI, or JSON by .json extension)")
      ->required();
  app.add_option("--out", out_path, "Write the table here instead of stdout");
  app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--svg", svg_path, "Phase plot (sweep and plan)");
  app.add_flag("--no-header-timestamp", options.no_header_timestamp, "Omit the generation timestamp");
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed, overrides the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : franson::kExitConfig;
  }

  options.command = franson::parse_command(command);
  if (!format.empty()) options.format = franson::parse_output_format(format);
  if (!out_path.empty()) options.out_path = out_path;
  if (!svg_path.empty()) options.svg_path = svg_path;
  if (seed_opt->count() > 0) options.seed = seed;
  return franson::execute(options, std::cout, std::cerr);
}
