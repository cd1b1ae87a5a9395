#include "franson/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "franson/constants.hpp"
#include "franson/errors.hpp"

namespace franson {

void DetectorModel::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw DomainError(fmt::format("detector efficiency {} outside [0, 1]", efficiency));
  if (!(dark_count_probability >= 0.0 && dark_count_probability <= 1.0))
    throw DomainError(fmt::format("dark count probability {} outside [0, 1]", dark_count_probability));
}

void ExperimentConfig::validate() const {
  source.validate();
  alice.validate();
  bob.validate();
  if (pairs_generated == 0) throw DomainError("pairs_generated must be positive");
  if (shards == 0) throw DomainError("shards must be positive");
  if (breakdown_grid) breakdown_grid->validate();
}

Counts& Counts::operator+=(const Counts& other) {
  detected_coincidences += other.detected_coincidences;
  post_selected += other.post_selected;
  port1 += other.port1;
  port2 += other.port2;
  return *this;
}

QberEstimate estimate_qber(const Counts& counts) {
  const std::uint64_t total = counts.port1 + counts.port2;
  if (total == 0) throw InsufficientStatistics("no post-selected coincidences");
  const double n = static_cast<double>(total);
  if (counts.port2 == 0) return {0.0, 1.0 / (static_cast<double>(counts.port1) + 2.0)};
  const double q = static_cast<double>(counts.port2) / n;
  return {q, std::sqrt(q * (1.0 - q) / n)};
}

namespace {

std::mt19937_64 shard_engine(std::uint64_t seed, unsigned shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard)};
  return std::mt19937_64(seq);
}

std::uint64_t shard_size(const ExperimentConfig& config, unsigned shard) {
  const std::uint64_t base = config.pairs_generated / config.shards;
  return base + (shard < config.pairs_generated % config.shards ? 1 : 0);
}

}  // namespace

Counts simulate_shard(const ExperimentConfig& config, unsigned shard, std::map<int, Counts>* per_channel) {
  config.validate();
  if (shard >= config.shards) throw DomainError(fmt::format("shard {} out of {}", shard, config.shards));

  auto rng = shard_engine(config.seed, shard);
  const PairSampler sampler(config.source);
  const double pump = config.source.pump_nm;
  const double eta_a = config.alice.efficiency;
  const double eta_b = config.bob.efficiency;
  const double dark_a = config.alice.dark_count_probability;
  const double dark_b = config.bob.dark_count_probability;
  const bool darks = dark_a > 0.0 || dark_b > 0.0;
  const bool need_wavelength = !config.forced_phase_rad || per_channel != nullptr;
  const std::optional<Band> alice_band =
      config.channel_filter ? std::optional<Band>(config.channel_filter->alice.passband) : std::nullopt;
  const double envelope = alice_band ? sampler.envelope(*alice_band) : 0.0;
  auto unit = [&rng] { return PairSampler::unit(rng); };

  Counts counts;
  const std::uint64_t events = shard_size(config, shard);
  for (std::uint64_t i = 0; i < events; ++i) {
    const bool photon_a = unit() < eta_a;
    const bool photon_b = unit() < eta_b;
    bool click_a = photon_a;
    bool click_b = photon_b;
    if (darks) {
      click_a = (unit() < dark_a) || click_a;
      click_b = (unit() < dark_b) || click_b;
    }
    const bool true_coincidence = photon_a && photon_b;
    if (!(click_a && click_b)) continue;
    if (true_coincidence) ++counts.detected_coincidences;
    if (!(unit() < 0.5)) continue;  // s-l / l-s class, or outside the post-selection window

    std::optional<PhotonPair> pair;
    if (need_wavelength) pair = alice_band ? sampler(rng, *alice_band, envelope) : sampler(rng);

    double p_port1 = 0.5;
    if (true_coincidence) {
      const double phi = config.forced_phase_rad ? *config.forced_phase_rad
                                                 : two_photon_phase(config.interf, pump, pair->alice_nm);
      p_port1 = coincidence_probabilities(phi).first;
    }
    const bool port1 = unit() < p_port1;

    Counts event;
    event.post_selected = 1;
    (port1 ? event.port1 : event.port2) = 1;
    counts += event;
    if (per_channel != nullptr && config.breakdown_grid) {
      const int index = nearest_channel_index(*config.breakdown_grid, nm_to_thz(pair->alice_nm));
      auto& slot = (*per_channel)[index];
      slot += event;
      if (true_coincidence) ++slot.detected_coincidences;
    }
  }
  return counts;
}

TallyResult simulate(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  const bool breakdown = config.breakdown_grid.has_value() && !config.channel_filter;
  const unsigned shards = config.shards;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, shards);

  std::vector<Counts> shard_counts(shards);
  std::vector<std::map<int, Counts>> shard_channels(shards);
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (unsigned s = t; s < shards; s += threads)
            shard_counts[s] = simulate_shard(config, s, breakdown ? &shard_channels[s] : nullptr);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  TallyResult result;
  result.pairs_generated = config.pairs_generated;
  for (unsigned s = 0; s < shards; ++s) {
    result.total += shard_counts[s];
    for (const auto& [index, c] : shard_channels[s]) result.per_channel[index] += c;
  }
  if (result.total.post_selected > 0) {
    const auto est = estimate_qber(result.total);
    result.qber_estimate = est.qber;
    result.qber_sigma = est.sigma;
  } else {
    result.qber_estimate = 0.0;
    result.qber_sigma = 0.5;  // the n₂ = 0 bound 1/(n₁ + 2) with n₁ = 0
  }
  return result;
}

}  // namespace franson
