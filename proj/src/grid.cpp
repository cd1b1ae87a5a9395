#include "franson/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "franson/constants.hpp"
#include "franson/errors.hpp"

namespace franson {

EdgeRule parse_edge_rule(std::string_view text) {
  if (text == "center") return EdgeRule::center;
  if (text == "edges") return EdgeRule::edges;
  throw DomainError(fmt::format("unknown edge rule '{}' (expected center or edges)", text));
}

std::string_view to_string(EdgeRule rule) { return rule == EdgeRule::center ? "center" : "edges"; }

void GridSpec::validate() const {
  if (!(anchor_thz > 0.0)) throw DomainError(fmt::format("grid anchor must be positive, got {} THz", anchor_thz));
  if (!(spacing_ghz > 0.0)) throw DomainError(fmt::format("grid spacing must be positive, got {} GHz", spacing_ghz));
  if (!(passband_ghz > 0.0) || passband_ghz > spacing_ghz)
    throw DomainError(fmt::format("passband {} GHz must be positive and not exceed the spacing {} GHz",
                                  passband_ghz, spacing_ghz));
}

Channel make_channel(const GridSpec& grid, int index) {
  Channel ch;
  ch.index = index;
  ch.center_thz = grid.anchor_thz + index * grid.spacing_ghz / 1000.0;
  ch.center_nm = thz_to_nm(ch.center_thz);
  const double half_thz = 0.5 * grid.passband_ghz / 1000.0;
  ch.passband = {thz_to_nm(ch.center_thz + half_thz), thz_to_nm(ch.center_thz - half_thz)};
  return ch;
}

int nearest_channel_index(const GridSpec& grid, double frequency_thz) {
  return static_cast<int>(std::lround((frequency_thz - grid.anchor_thz) * 1000.0 / grid.spacing_ghz));
}

std::vector<Channel> channels_in_band(const GridSpec& grid, Band band) {
  grid.validate();
  std::vector<Channel> out;
  if (!(band.hi_nm > band.lo_nm) || !(band.lo_nm > 0.0)) return out;
  const double step_thz = grid.spacing_ghz / 1000.0;
  const int first = static_cast<int>(std::floor((nm_to_thz(band.hi_nm) - grid.anchor_thz) / step_thz)) - 1;
  const int last = static_cast<int>(std::ceil((nm_to_thz(band.lo_nm) - grid.anchor_thz) / step_thz)) + 1;
  for (int k = first; k <= last; ++k) {
    Channel ch = make_channel(grid, k);
    if (band.contains(ch.center_nm)) out.push_back(ch);
  }
  return out;
}

std::vector<ChannelPair> pair_channels(const GridSpec& grid, double pump_nm, Band alice_band) {
  const double pump_thz = nm_to_thz(pump_nm);
  const int degenerate = nearest_channel_index(grid, 0.5 * pump_thz);
  std::vector<ChannelPair> pairs;
  for (const Channel& alice : channels_in_band(grid, alice_band)) {
    if (alice.index > degenerate) continue;
    ChannelPair pair;
    pair.alice = alice;
    pair.bob = make_channel(grid, nearest_channel_index(grid, pump_thz - alice.center_thz));
    pair.frequency_sum_error_ghz = std::abs(alice.center_thz + pair.bob.center_thz - pump_thz) * 1000.0;
    pair.misaligned = pair.frequency_sum_error_ghz > 0.5 * grid.passband_ghz;
    pairs.push_back(pair);
  }
  return pairs;
}

std::vector<double> evaluation_points(const Channel& alice, EdgeRule rule) {
  if (rule == EdgeRule::center) return {alice.center_nm};
  return {alice.passband.lo_nm, alice.center_nm, alice.passband.hi_nm};
}

PairCount count_passing_pairs(std::span<const ChannelPair> pairs, const InterferometerPair& interf,
                              double pump_nm, double threshold_phase_rad, EdgeRule rule) {
  std::vector<double> points;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (double p : evaluation_points(pairs[i].alice, rule)) {
      points.push_back(p);
      owner.push_back(i);
    }
  }
  std::vector<double> phases(points.size());
  two_photon_phase_batch(interf, pump_nm, points, phases);

  PairCount result;
  result.pairs.assign(pairs.begin(), pairs.end());
  for (auto& pair : result.pairs) pair.worst_phase_rad = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    auto& pair = result.pairs[owner[j]];
    pair.worst_phase_rad = std::max(pair.worst_phase_rad, std::abs(phases[j]));
  }
  for (auto& pair : result.pairs) {
    pair.worst_qber = qber_from_phase(pair.worst_phase_rad);
    pair.passes = pair.worst_phase_rad <= threshold_phase_rad;
    result.count += pair.passes ? 1 : 0;
  }
  return result;
}

}  // namespace franson
