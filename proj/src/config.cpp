#include "franson/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "franson/errors.hpp"

namespace franson {

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw std::invalid_argument(fmt::format("unknown output format '{}' (expected csv or json)", text));
}

std::string_view to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

OptimizationProblem RunConfig::optimization_problem() const {
  OptimizationProblem p;
  p.source = source;
  p.grid = grid;
  p.fiber = fiber;
  p.path_diff_b_m = interferometers.path_diff_b_m;
  p.threshold_phase_rad = optimize.threshold_phase_rad;
  p.search = optimize.search;
  p.offset_mode = optimize.offset_mode;
  p.edge_rule = edge_rule;
  return p;
}

namespace {

using Sections = std::map<std::string, std::map<std::string, std::string>>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"source", {"pump_nm", "spectral_shape", "fwhm_nm", "band_min_nm", "band_max_nm"}},
      {"fiber", {"model", "name", "B", "C_um2", "valid_min_nm", "valid_max_nm"}},
      {"interferometers", {"path_diff_B_m", "detuning_um", "phase_offset", "calibration_nm"}},
      {"grid", {"anchor_THz", "spacing_GHz", "passband_GHz", "edge_rule"}},
      {"analysis",
       {"threshold_phase_rad", "sweep_step_nm", "dispersion_min_nm", "dispersion_max_nm", "dispersion_step_nm"}},
      {"optimize", {"delta_min_um", "delta_max_um", "delta_step_um", "phase_offset", "threshold_phase_rad"}},
      {"simulation",
       {"pairs", "seed", "eta_A", "eta_B", "dark_count_prob", "shards", "forced_phase_rad", "channel"}},
      {"output", {"format", "header_timestamp"}},
  };
  return s;
}

void check_known(const Sections& sections) {
  for (const auto& [section, keys] : sections) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError(section, "unknown section");
    for (const auto& [key, value] : keys)
      if (!it->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
  }
}

Sections read_ini(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("", fmt::format("line {}: {}", e.line(), e.message()));
  }
  Sections out;
  for (const auto& [name, node] : tree) {
    if (node.empty() && !node.data().empty()) throw ConfigError(name, "key outside of any section");
    auto& keys = out[name];
    for (const auto& [key, child] : node) {
      if (!child.empty()) throw ConfigError(name + "." + key, "nested values are not allowed");
      keys[key] = child.data();
    }
  }
  return out;
}

Sections read_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", fmt::format("invalid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw ConfigError("", "JSON config must be an object of sections");
  Sections out;
  for (const auto& [name, section] : doc.items()) {
    if (!section.is_object()) throw ConfigError(name, "section must be an object");
    auto& keys = out[name];
    for (const auto& [key, value] : section.items()) {
      if (value.is_string()) {
        keys[key] = value.get<std::string>();
      } else if (value.is_number() || value.is_boolean()) {
        keys[key] = value.dump();
      } else if (value.is_array()) {
        // Coefficient lists: "a, b, c".
        std::string joined;
        for (const auto& v : value) {
          if (!v.is_number()) throw ConfigError(name + "." + key, "array entries must be numbers");
          joined += (joined.empty() ? "" : ", ") + v.dump();
        }
        keys[key] = joined;
      } else {
        throw ConfigError(name + "." + key, "unsupported value type");
      }
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Typed access to one section; remembers the dotted key for messages.
class Section {
 public:
  Section(const Sections& all, std::string name) : name_(std::move(name)) {
    if (const auto it = all.find(name_); it != all.end()) keys_ = &it->second;
  }

  std::string key(std::string_view k) const { return fmt::format("{}.{}", name_, k); }

  std::optional<std::string> text(std::string_view k) const {
    if (keys_ == nullptr) return std::nullopt;
    const auto it = keys_->find(std::string(k));
    if (it == keys_->end()) return std::nullopt;
    return std::string(trim(it->second));
  }

  std::optional<double> number(std::string_view k) const {
    const auto t = text(k);
    if (!t) return std::nullopt;
    return parse_number(k, *t);
  }

  double parse_number(std::string_view k, std::string_view t) const {
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
      throw ConfigError(key(k), fmt::format("expected a finite number, got '{}'", t));
    return v;
  }

  template <class Int>
  std::optional<Int> integer(std::string_view k) const {
    const auto t = text(k);
    if (!t) return std::nullopt;
    Int v{};
    const auto* end = t->data() + t->size();
    const auto [ptr, ec] = std::from_chars(t->data(), end, v);
    if (t->empty() || ec != std::errc() || ptr != end)
      throw ConfigError(key(k), fmt::format("expected an integer, got '{}'", *t));
    return v;
  }

  std::optional<bool> boolean(std::string_view k) const {
    const auto t = text(k);
    if (!t) return std::nullopt;
    if (*t == "true" || *t == "1" || *t == "yes") return true;
    if (*t == "false" || *t == "0" || *t == "no") return false;
    throw ConfigError(key(k), fmt::format("expected true or false, got '{}'", *t));
  }

  std::optional<std::vector<double>> list(std::string_view k) const {
    const auto t = text(k);
    if (!t) return std::nullopt;
    std::vector<double> out;
    std::string_view rest = *t;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      out.push_back(parse_number(k, trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ConfigError(key(k), "empty list");
    return out;
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>* keys_ = nullptr;
};

void require(bool ok, const std::string& key, std::string_view what) {
  if (!ok) throw ConfigError(key, std::string(what));
}

// Runs a module-level validate(), reporting failures against `key`.
template <class F>
void validated(const std::string& key, F&& check) {
  try {
    check();
  } catch (const DomainError& e) {
    throw ConfigError(key, e.what());
  } catch (const RangeError& e) {
    throw ConfigError(key, e.what());
  }
}

void read_source(const Sections& all, RunConfig& cfg) {
  const Section s(all, "source");
  if (auto v = s.number("pump_nm")) cfg.source.pump_nm = *v;
  require(cfg.source.pump_nm > 0.0, s.key("pump_nm"), "must be positive");
  if (auto v = s.text("spectral_shape")) {
    try {
      cfg.source.shape = parse_spectral_shape(*v);
    } catch (const DomainError& e) {
      throw ConfigError(s.key("spectral_shape"), e.what());
    }
  }
  if (auto v = s.number("fwhm_nm")) cfg.source.fwhm_nm = *v;
  require(cfg.source.fwhm_nm >= 0.0, s.key("fwhm_nm"), "must be non-negative");

  const auto lo = s.number("band_min_nm");
  const auto hi = s.number("band_max_nm");
  if (lo.has_value() != hi.has_value())
    throw ConfigError(s.key(lo ? "band_max_nm" : "band_min_nm"), "band_min_nm and band_max_nm go together");
  if (lo) {
    require(*lo > cfg.source.pump_nm, s.key("band_min_nm"), "must lie above the pump wavelength");
    require(*hi >= *lo, s.key("band_max_nm"), "must not be below band_min_nm");
    cfg.source.usable_band = Band{*lo, *hi};
  }
  validated(s.key("pump_nm"), [&] {
    cfg.source.validate();
    (void)emission_band(cfg.source);
    if (cfg.source.fwhm_nm > 0.0) (void)SpectralDensity(cfg.source);
  });
}

void read_fiber(const Sections& all, RunConfig& cfg) {
  const Section s(all, "fiber");
  const std::string model = s.text("model").value_or("fused_silica");
  const auto b = s.list("B");
  const auto c = s.list("C_um2");
  if (model != "custom") {
    for (const char* k : {"B", "C_um2", "valid_min_nm", "valid_max_nm", "name"})
      if (s.text(k)) throw ConfigError(s.key(k), "only allowed with model = custom");
    try {
      cfg.fiber = builtin_model(model);
    } catch (const std::invalid_argument&) {
      std::string names;
      for (auto n : builtin_model_names()) names += fmt::format("{}, ", n);
      throw ConfigError(s.key("model"), fmt::format("unknown model '{}' (expected {}or custom)", model, names));
    }
    return;
  }
  require(b.has_value(), s.key("B"), "required for a custom model");
  require(c.has_value(), s.key("C_um2"), "required for a custom model");
  require(b->size() == c->size(), s.key("C_um2"), "must have as many entries as B");
  std::vector<SellmeierTerm> terms;
  for (std::size_t i = 0; i < b->size(); ++i) {
    require((*c)[i] >= 0.0, s.key("C_um2"), "resonance wavelengths squared must be non-negative");
    terms.push_back({(*b)[i], (*c)[i]});
  }
  const auto lo = s.number("valid_min_nm");
  const auto hi = s.number("valid_max_nm");
  require(lo.has_value(), s.key("valid_min_nm"), "required for a custom model");
  require(hi.has_value(), s.key("valid_max_nm"), "required for a custom model");
  require(*lo > 0.0, s.key("valid_min_nm"), "must be positive");
  require(*hi > *lo, s.key("valid_max_nm"), "must exceed valid_min_nm");
  // The index must stay real and above one across the range: no pole inside it.
  for (const auto& t : terms) {
    const double pole_nm = std::sqrt(t.resonance_wavelength_sq_um2) * 1000.0;
    require(!(pole_nm >= *lo && pole_nm <= *hi), s.key("C_um2"),
            fmt::format("resonance at {} nm lies inside the validity range", pole_nm));
  }
  validated(s.key("B"), [&] {
    cfg.fiber = SellmeierModel(s.text("name").value_or("custom"), std::move(terms), WavelengthRange{*lo, *hi});
  });
}

void read_interferometers(const Sections& all, RunConfig& cfg) {
  const Section s(all, "interferometers");
  auto& it = cfg.interferometers;
  if (auto v = s.number("path_diff_B_m")) it.path_diff_b_m = *v;
  require(it.path_diff_b_m > 0.0, s.key("path_diff_B_m"), "must be positive");
  if (auto v = s.number("detuning_um")) it.detuning_m = *v * 1e-6;
  require(it.path_diff_b_m + it.detuning_m > 0.0, s.key("detuning_um"),
          "Alice's path difference (path_diff_B_m + detuning) must stay positive");
  if (auto v = s.text("phase_offset")) {
    if (*v == "auto") {
      it.auto_offset = true;
    } else {
      it.phase_offset_rad = *s.number("phase_offset");
    }
  }
  if (auto v = s.number("calibration_nm")) {
    require(*v > cfg.source.pump_nm, s.key("calibration_nm"), "must lie above the pump wavelength");
    require(!it.auto_offset, s.key("calibration_nm"), "cannot be combined with phase_offset = auto");
    it.calibration_nm = *v;
  }
}

void read_grid(const Sections& all, RunConfig& cfg) {
  const Section s(all, "grid");
  if (auto v = s.number("anchor_THz")) cfg.grid.anchor_thz = *v;
  require(cfg.grid.anchor_thz > 0.0, s.key("anchor_THz"), "must be positive");
  if (auto v = s.number("spacing_GHz")) {
    cfg.grid.spacing_ghz = *v;
    if (!s.text("passband_GHz")) cfg.grid.passband_ghz = *v;  // flat-top filling the slot
  }
  require(cfg.grid.spacing_ghz > 0.0, s.key("spacing_GHz"), "must be positive");
  if (auto v = s.number("passband_GHz")) cfg.grid.passband_ghz = *v;
  require(cfg.grid.passband_ghz > 0.0 && cfg.grid.passband_ghz <= cfg.grid.spacing_ghz, s.key("passband_GHz"),
          "must be positive and not exceed spacing_GHz");
  if (auto v = s.text("edge_rule")) {
    try {
      cfg.edge_rule = parse_edge_rule(*v);
    } catch (const std::exception& e) {
      throw ConfigError(s.key("edge_rule"), e.what());
    }
  }
  validated(s.key("spacing_GHz"), [&] { cfg.grid.validate(); });
}

void read_analysis(const Sections& all, RunConfig& cfg) {
  const Section s(all, "analysis");
  auto& a = cfg.analysis;
  if (auto v = s.number("threshold_phase_rad")) a.threshold_phase_rad = *v;
  require(a.threshold_phase_rad >= 0.0, s.key("threshold_phase_rad"), "must be non-negative");
  if (auto v = s.number("sweep_step_nm")) a.sweep_step_nm = *v;
  require(a.sweep_step_nm > 0.0, s.key("sweep_step_nm"), "must be positive");
  if (auto v = s.number("dispersion_min_nm")) a.dispersion_min_nm = *v;
  if (auto v = s.number("dispersion_max_nm")) a.dispersion_max_nm = *v;
  if (auto v = s.number("dispersion_step_nm")) a.dispersion_step_nm = *v;
  require(a.dispersion_min_nm > 0.0, s.key("dispersion_min_nm"), "must be positive");
  require(a.dispersion_max_nm >= a.dispersion_min_nm, s.key("dispersion_max_nm"),
          "must not be below dispersion_min_nm");
  require(a.dispersion_step_nm > 0.0, s.key("dispersion_step_nm"), "must be positive");
}

void read_optimize(const Sections& all, RunConfig& cfg) {
  const Section s(all, "optimize");
  auto& o = cfg.optimize;
  o.threshold_phase_rad = cfg.analysis.threshold_phase_rad;
  if (auto v = s.number("threshold_phase_rad")) o.threshold_phase_rad = *v;
  require(o.threshold_phase_rad >= 0.0, s.key("threshold_phase_rad"), "must be non-negative");
  if (auto v = s.number("delta_min_um")) o.search.min_m = *v * 1e-6;
  if (auto v = s.number("delta_max_um")) o.search.max_m = *v * 1e-6;
  if (auto v = s.number("delta_step_um")) o.search.step_m = *v * 1e-6;
  require(o.search.step_m > 0.0, s.key("delta_step_um"), "must be positive");
  require(o.search.max_m >= o.search.min_m, s.key("delta_max_um"), "must not be below delta_min_um");
  require(cfg.interferometers.path_diff_b_m + o.search.min_m > 0.0, s.key("delta_min_um"),
          "would make Alice's path difference non-positive");
  if (auto v = s.text("phase_offset")) {
    o.offset_mode = *v == "auto" ? PhaseOffsetMode::autoselect() : PhaseOffsetMode::fixed(*s.number("phase_offset"));
  }
}

void read_simulation(const Sections& all, RunConfig& cfg) {
  const Section s(all, "simulation");
  auto& m = cfg.simulation;
  if (auto v = s.integer<std::uint64_t>("pairs")) m.pairs = *v;
  require(m.pairs > 0, s.key("pairs"), "must be positive");
  if (auto v = s.integer<std::uint64_t>("seed")) m.seed = *v;
  if (auto v = s.number("eta_A")) m.eta_a = *v;
  require(m.eta_a >= 0.0 && m.eta_a <= 1.0, s.key("eta_A"), "must lie in [0, 1]");
  if (auto v = s.number("eta_B")) m.eta_b = *v;
  require(m.eta_b >= 0.0 && m.eta_b <= 1.0, s.key("eta_B"), "must lie in [0, 1]");
  if (auto v = s.number("dark_count_prob")) m.dark_count_prob = *v;
  require(m.dark_count_prob >= 0.0 && m.dark_count_prob <= 1.0, s.key("dark_count_prob"), "must lie in [0, 1]");
  if (auto v = s.integer<unsigned>("shards")) m.shards = *v;
  require(m.shards > 0, s.key("shards"), "must be positive");
  if (auto v = s.number("forced_phase_rad")) m.forced_phase_rad = *v;
  if (auto v = s.integer<int>("channel")) m.channel = *v;
}

void read_output(const Sections& all, RunConfig& cfg) {
  const Section s(all, "output");
  if (auto v = s.text("format")) {
    try {
      cfg.output.format = parse_output_format(*v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(s.key("format"), e.what());
    }
  }
  if (auto v = s.boolean("header_timestamp")) cfg.output.header_timestamp = *v;
}

}  // namespace

RunConfig parse_config(std::string_view text, ConfigSyntax syntax) {
  const Sections sections = syntax == ConfigSyntax::json ? read_json(text) : read_ini(text);
  check_known(sections);
  RunConfig cfg;
  read_source(sections, cfg);
  read_fiber(sections, cfg);
  read_interferometers(sections, cfg);
  read_grid(sections, cfg);
  read_analysis(sections, cfg);
  read_optimize(sections, cfg);
  read_simulation(sections, cfg);
  read_output(sections, cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto syntax = path.extension() == ".json" ? ConfigSyntax::json : ConfigSyntax::ini;
  return parse_config(buffer.str(), syntax);
}

}  // namespace franson
