#pragma once

// Event-level coincidence counting for the Franson analyzers.
//
// Per generated pair: wavelengths are drawn from the source, each photon is
// detected with its detector efficiency, a coincidence lands in the
// interfering short-short / long-long class with probability 1/2, and an
// interfering event exits port 1 with probability (1 + cos φ)/2. Optional
// dark counts make accidental coincidences that split evenly between ports.
//
// A run is split into shards, each with its own engine seeded from
// (seed, shard index). The shard layout, not the thread count, fixes the
// result.

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "franson/grid.hpp"
#include "franson/phase.hpp"
#include "franson/source.hpp"

namespace franson {

struct DetectorModel {
  double efficiency = 1.0;
  double dark_count_probability = 0.0;  // per coincidence window

  void validate() const;
};

struct ExperimentConfig {
  SourceSpec source;
  InterferometerPair interf{fused_silica(), 0.067};
  std::optional<ChannelPair> channel_filter;  // restrict λ_A to Alice's passband
  std::optional<GridSpec> breakdown_grid;     // per-channel tallies when unfiltered
  std::optional<double> forced_phase_rad;     // bypass the interferometer model
  std::uint64_t pairs_generated = 1'000'000;
  DetectorModel alice{0.20, 0.0};
  DetectorModel bob{0.25, 0.0};
  std::uint64_t seed = 1;
  unsigned shards = 1;

  void validate() const;
};

struct Counts {
  std::uint64_t detected_coincidences = 0;  // both photons detected
  std::uint64_t post_selected = 0;
  std::uint64_t port1 = 0;
  std::uint64_t port2 = 0;

  Counts& operator+=(const Counts& other);
  bool operator==(const Counts&) const = default;
};

struct TallyResult {
  std::uint64_t pairs_generated = 0;
  Counts total;
  double qber_estimate = 0.0;
  double qber_sigma = 0.0;
  // Keyed by Alice channel index. Wavelengths are only drawn for
  // post-selected events, so per-channel detected_coincidences counts the
  // true coincidences among those.
  std::map<int, Counts> per_channel;

  bool operator==(const TallyResult&) const = default;
};

struct QberEstimate {
  double qber;
  double sigma;
};

/// n₂/(n₁ + n₂) with binomial standard error; with n₂ = 0 the sigma is the
/// one-sided bound 1/(n₁ + 2). Throws InsufficientStatistics when empty.
QberEstimate estimate_qber(const Counts& counts);

/// Runs one shard of `config` (shard < config.shards).
Counts simulate_shard(const ExperimentConfig& config, unsigned shard, std::map<int, Counts>* per_channel);

/// All shards, executed on up to `threads` threads (0 = hardware concurrency).
TallyResult simulate(const ExperimentConfig& config, unsigned threads = 0);

}  // namespace franson
