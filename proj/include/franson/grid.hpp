#pragma once

// ITU DWDM channelization. All grid arithmetic is done in frequency.

#include <span>
#include <string_view>
#include <vector>

#include "franson/phase.hpp"
#include "franson/source.hpp"

namespace franson {

enum class EdgeRule { center, edges };

EdgeRule parse_edge_rule(std::string_view text);
std::string_view to_string(EdgeRule rule);

struct GridSpec {
  double anchor_thz = 193.1;
  double spacing_ghz = 100.0;
  double passband_ghz = 100.0;  // flat-top width

  /// Throws DomainError unless spacing > 0 and 0 < passband ≤ spacing.
  void validate() const;
};

struct Channel {
  int index = 0;  // offset from the anchor in units of spacing
  double center_thz = 0.0;
  double center_nm = 0.0;
  Band passband;  // wavelength edges of the flat-top passband
};

/// Channel `index` of the grid.
Channel make_channel(const GridSpec& grid, int index);

/// Index of the channel nearest to `frequency_thz` (ties round away from the anchor).
int nearest_channel_index(const GridSpec& grid, double frequency_thz);

struct ChannelPair {
  Channel alice;  // lower frequency, longer wavelength
  Channel bob;
  double frequency_sum_error_ghz = 0.0;  // |ν_A + ν_B − ν_p|
  bool misaligned = false;               // error exceeds half the passband
  double worst_phase_rad = 0.0;          // max |φ| over the evaluation points
  double worst_qber = 0.0;
  bool passes = false;
};

/// Channels with center wavelength inside `band`, ordered by index.
std::vector<Channel> channels_in_band(const GridSpec& grid, Band band);

/// Pairs every Alice channel in `alice_band` (long-wavelength side of the
/// degenerate point) with the grid channel nearest ν_p − ν_A.
std::vector<ChannelPair> pair_channels(const GridSpec& grid, double pump_nm, Band alice_band);

/// λ_A points where a channel is evaluated: center, or center and both edges.
std::vector<double> evaluation_points(const Channel& alice, EdgeRule rule);

struct PairCount {
  int count = 0;
  std::vector<ChannelPair> pairs;
};

/// Annotates every pair with its worst-case phase and QBER and counts the
/// pairs whose worst |φ| is at most `threshold_phase_rad`.
PairCount count_passing_pairs(std::span<const ChannelPair> pairs, const InterferometerPair& interf,
                              double pump_nm, double threshold_phase_rad, EdgeRule rule);

}  // namespace franson
