#include "franson/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "franson/constants.hpp"
#include "franson/errors.hpp"
#include "franson/montecarlo.hpp"
#include "franson/report.hpp"

namespace franson {

Command parse_command(std::string_view text) {
  if (text == "sweep") return Command::sweep;
  if (text == "plan") return Command::plan;
  if (text == "optimize") return Command::optimize;
  if (text == "simulate") return Command::simulate;
  if (text == "dispersion") return Command::dispersion;
  throw std::invalid_argument(fmt::format("unknown command '{}'", text));
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::sweep: return "sweep";
    case Command::plan: return "plan";
    case Command::optimize: return "optimize";
    case Command::simulate: return "simulate";
    case Command::dispersion: return "dispersion";
  }
  return "?";
}

InterferometerPair analysis_interferometers(const RunConfig& config, std::span<const ChannelPair> pairs) {
  const auto& s = config.interferometers;
  const double pump = config.source.pump_nm;
  const InterferometerPair base(config.fiber, s.path_diff_b_m, s.detuning_m);
  if (s.auto_offset) {
    const auto choice = auto_phase_offset(pairs, base, pump, config.analysis.threshold_phase_rad, config.edge_rule);
    return base.with_phase_offset(choice.phase_offset_rad);
  }
  if (s.calibration_nm) {
    const auto cal = base.calibrated(pump, *s.calibration_nm);
    return cal.with_phase_offset(cal.phase_offset() + s.phase_offset_rad);
  }
  return base.with_phase_offset(s.phase_offset_rad);
}

namespace {

using report::Cell;
using report::Table;

std::int64_t as_int(int v) { return static_cast<std::int64_t>(v); }
std::int64_t as_int(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::string render(const Table& table, OutputFormat format, const std::optional<std::string>& timestamp) {
  return format == OutputFormat::csv ? report::to_csv(table, timestamp) : report::to_json(table, timestamp);
}

std::vector<ChannelPair> source_pairs(const RunConfig& config) {
  return pair_channels(config.grid, config.source.pump_nm, emission_band(config.source));
}

CommandOutput run_sweep(const RunConfig& config, OutputFormat format, const std::optional<std::string>& ts,
                        bool want_svg) {
  const double pump = config.source.pump_nm;
  const double threshold = config.analysis.threshold_phase_rad;
  const Band band = emission_band(config.source);
  const auto pairs = source_pairs(config);
  const auto interf = analysis_interferometers(config, pairs);

  std::vector<double> alice;
  const double step = config.analysis.sweep_step_nm;
  const auto n = static_cast<long>(std::floor(band.width() / step + 1e-9));
  for (long i = 0; i <= n; ++i) alice.push_back(band.lo_nm + static_cast<double>(i) * step);
  std::vector<double> phase(alice.size());
  two_photon_phase_batch(interf, pump, alice, phase);

  Table table{{"lambda_A_nm", "lambda_B_nm", "phi_rad", "qber", "channel_index_A", "channel_index_B", "pass"}, {}};
  report::PhasePlot plot;
  plot.title = fmt::format("Two-photon phase, delta = {} um", report::format_number(interf.detuning_m() * 1e6));
  plot.threshold = threshold;
  int passing = 0;
  for (std::size_t i = 0; i < alice.size(); ++i) {
    const double bob = conjugate_wavelength(pump, alice[i]);
    const bool pass = std::abs(phase[i]) <= threshold;
    passing += pass ? 1 : 0;
    table.add({alice[i], bob, phase[i], qber_from_phase(phase[i]),
               as_int(nearest_channel_index(config.grid, nm_to_thz(alice[i]))),
               as_int(nearest_channel_index(config.grid, nm_to_thz(bob))), pass});
    plot.curve.push_back({alice[i], phase[i], pass});
  }
  CommandOutput out;
  out.table = render(table, format, ts);
  if (want_svg) out.svg = report::to_svg(plot);
  out.summary = fmt::format("points={}\npassing_points={}\nphase_offset_rad={}\n", alice.size(), passing,
                            report::format_number(interf.phase_offset()));
  return out;
}

CommandOutput run_plan(const RunConfig& config, OutputFormat format, const std::optional<std::string>& ts,
                       bool want_svg) {
  const double pump = config.source.pump_nm;
  const auto pairs = source_pairs(config);
  const auto interf = analysis_interferometers(config, pairs);
  const auto counted = count_passing_pairs(pairs, interf, pump, config.analysis.threshold_phase_rad, config.edge_rule);

  Table table{{"channel_index_A", "channel_index_B", "lambda_A_nm", "lambda_B_nm", "frequency_A_THz",
               "frequency_B_THz", "frequency_sum_error_GHz", "misaligned", "worst_phase_rad", "worst_qber", "pass"},
              {}};
  report::PhasePlot plot;
  plot.title = fmt::format("Channel pairs, {} of {} pass", counted.count, counted.pairs.size());
  plot.threshold = config.analysis.threshold_phase_rad;
  for (const auto& p : counted.pairs) {
    table.add({as_int(p.alice.index), as_int(p.bob.index), p.alice.center_nm, p.bob.center_nm, p.alice.center_thz,
               p.bob.center_thz, p.frequency_sum_error_ghz, p.misaligned, p.worst_phase_rad, p.worst_qber, p.passes});
    plot.markers.push_back({p.alice.center_nm, two_photon_phase(interf, pump, p.alice.center_nm), p.passes});
  }
  if (want_svg && !pairs.empty()) {
    const double lo = pairs.front().alice.passband.lo_nm, hi = pairs.back().alice.passband.hi_nm;
    for (int i = 0; i <= 400; ++i) {
      const double a = std::min(std::max(lo, hi), std::min(lo, hi) + std::abs(hi - lo) * i / 400.0);
      plot.curve.push_back({a, two_photon_phase(interf, pump, a)});
    }
  }
  CommandOutput out;
  out.table = render(table, format, ts);
  if (want_svg) out.svg = report::to_svg(plot);
  out.summary = fmt::format("passing_pairs={}\ntotal_pairs={}\nphase_offset_rad={}\n", counted.count,
                            counted.pairs.size(), report::format_number(interf.phase_offset()));
  return out;
}

CommandOutput run_optimize(const RunConfig& config, OutputFormat format, const std::optional<std::string>& ts) {
  const auto problem = config.optimization_problem();
  const auto scan = scan_optimize(problem);
  const auto closed = closed_form_optimize(problem);

  Table profile{{"lambda_A_nm", "lambda_B_nm", "phi_rad", "qber", "pass"}, {}};
  for (const auto& p : scan.profile) profile.add({p.alice_nm, p.bob_nm, p.phase_rad, p.qber, p.passes});

  CommandOutput out;
  if (format == OutputFormat::json) {
    nlohmann::ordered_json doc;
    if (ts) doc["generated"] = *ts;
    doc["method"] = "scan";
    doc["fiber"] = problem.fiber.name();
    doc["threshold_phase_rad"] = problem.threshold_phase_rad;
    doc["best_delta_um"] = scan.best_detuning_m * 1e6;
    doc["best_phase_offset_rad"] = scan.best_phase_offset_rad;
    doc["pair_count"] = scan.pair_count;
    doc["total_pairs"] = scan.pairs.size();
    if (scan.passing_band)
      doc["passing_band_nm"] = {scan.passing_band->lo_nm, scan.passing_band->hi_nm};
    else
      doc["passing_band_nm"] = nullptr;
    doc["closed_form_delta_um"] = closed.best_detuning_m * 1e6;
    doc["closed_form_pair_count"] = closed.pair_count;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& p : scan.profile)
      rows.push_back({{"lambda_A_nm", p.alice_nm},
                      {"lambda_B_nm", p.bob_nm},
                      {"phi_rad", p.phase_rad},
                      {"qber", p.qber},
                      {"pass", p.passes}});
    doc["profile"] = std::move(rows);
    out.table = doc.dump(2) + "\n";
  } else {
    out.table = report::to_csv(profile, ts);
  }
  out.summary = fmt::format("best_delta_um={}\nbest_phase_offset_rad={}\npair_count={}\nclosed_form_delta_um={}\n",
                            report::format_number(scan.best_detuning_m * 1e6),
                            report::format_number(scan.best_phase_offset_rad), scan.pair_count,
                            report::format_number(closed.best_detuning_m * 1e6));
  if (scan.passing_band)
    out.summary += fmt::format("passing_band_nm={},{}\n", report::format_number(scan.passing_band->lo_nm),
                               report::format_number(scan.passing_band->hi_nm));
  return out;
}

CommandOutput run_simulate(const RunConfig& config, OutputFormat format, const std::optional<std::string>& ts) {
  const auto& sim = config.simulation;
  const auto pairs = source_pairs(config);

  ExperimentConfig exp;
  exp.source = config.source;
  exp.interf = analysis_interferometers(config, pairs);
  exp.forced_phase_rad = sim.forced_phase_rad;
  exp.pairs_generated = sim.pairs;
  exp.alice = {sim.eta_a, sim.dark_count_prob};
  exp.bob = {sim.eta_b, sim.dark_count_prob};
  exp.seed = sim.seed;
  exp.shards = sim.shards;
  if (sim.channel) {
    const auto it = std::find_if(pairs.begin(), pairs.end(), [&](const auto& p) { return p.alice.index == *sim.channel; });
    if (it == pairs.end())
      throw ConfigError("simulation.channel", fmt::format("no Alice channel {} inside the source band", *sim.channel));
    exp.channel_filter = *it;
  } else {
    exp.breakdown_grid = config.grid;
  }
  const auto tally = simulate(exp);

  Table table{{"channel_index_A", "channel_index_B", "lambda_A_nm", "lambda_B_nm", "detected_coincidences",
               "post_selected", "port1", "port2", "qber", "sigma"},
              {}};
  const double nu_p = nm_to_thz(config.source.pump_nm);
  auto add_row = [&](int index, const Counts& c) {
    if (c.post_selected == 0) return;
    const auto est = estimate_qber(c);
    const int bob = nearest_channel_index(config.grid, nu_p - make_channel(config.grid, index).center_thz);
    table.add({as_int(index), as_int(bob), make_channel(config.grid, index).center_nm,
               make_channel(config.grid, bob).center_nm, as_int(c.detected_coincidences), as_int(c.post_selected),
               as_int(c.port1), as_int(c.port2), est.qber, est.sigma});
  };
  if (exp.channel_filter) {
    add_row(exp.channel_filter->alice.index, tally.total);
  } else {
    for (const auto& [index, c] : tally.per_channel) add_row(index, c);
  }

  CommandOutput out;
  out.table = render(table, format, ts);
  out.summary = fmt::format("pairs_generated={}\ndetected_coincidences={}\npost_selected={}\nqber={}\nsigma={}\n",
                            tally.pairs_generated, tally.total.detected_coincidences, tally.total.post_selected,
                            report::format_number(tally.qber_estimate), report::format_number(tally.qber_sigma));
  return out;
}

CommandOutput run_dispersion(const RunConfig& config, OutputFormat format, const std::optional<std::string>& ts) {
  const auto& a = config.analysis;
  Table table{{"lambda_nm", "n", "dn_dlambda_per_um", "d2n_dlambda2_per_um2", "group_index", "group_velocity_m_per_s"},
              {}};
  const auto n = static_cast<long>(std::floor((a.dispersion_max_nm - a.dispersion_min_nm) / a.dispersion_step_nm + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const auto d = dispersion_sample(config.fiber, a.dispersion_min_nm + static_cast<double>(i) * a.dispersion_step_nm);
    table.add({d.wavelength_nm, d.n, d.dn_dlambda_per_um, d.d2n_dlambda2_per_um2, d.group_index,
               d.group_velocity_m_per_s});
  }
  CommandOutput out;
  out.table = render(table, format, ts);
  out.summary = fmt::format("model={}\npoints={}\n", config.fiber.name(), table.rows.size());
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  f << text;
  if (!f) throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

}  // namespace

CommandOutput run_command(Command command, const RunConfig& config, OutputFormat format,
                          const std::optional<std::string>& timestamp, bool want_svg) {
  switch (command) {
    case Command::sweep: return run_sweep(config, format, timestamp, want_svg);
    case Command::plan: return run_plan(config, format, timestamp, want_svg);
    case Command::optimize: return run_optimize(config, format, timestamp);
    case Command::simulate: return run_simulate(config, format, timestamp);
    case Command::dispersion: return run_dispersion(config, format, timestamp);
  }
  throw std::logic_error("unhandled command");
}

int execute(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.svg_path && options.command != Command::sweep && options.command != Command::plan)
      throw ConfigError("--svg", "only available for sweep and plan");
    RunConfig config = load_config(options.config_path);
    if (options.seed) config.simulation.seed = *options.seed;
    const OutputFormat format = options.format.value_or(config.output.format);
    std::optional<std::string> timestamp;
    if (config.output.header_timestamp && !options.no_header_timestamp) timestamp = report::utc_timestamp();

    const auto result = run_command(options.command, config, format, timestamp, options.svg_path.has_value());

    if (options.out_path) {
      write_file(*options.out_path, result.table);
    } else {
      out << result.table;
    }
    if (options.svg_path && result.svg) write_file(*options.svg_path, *result.svg);
    out << result.summary;
    out.flush();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RangeError& e) {
    err << "range error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InsufficientStatistics& e) {
    err << "insufficient statistics: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace franson
