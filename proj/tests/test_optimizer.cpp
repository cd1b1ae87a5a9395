#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "franson/constants.hpp"
#include "franson/errors.hpp"
#include "franson/optimizer.hpp"
#include "oracles.hpp"

using namespace franson;

namespace {

constexpr double kPump = 770.0;

OptimizationProblem reference_problem() {
  OptimizationProblem p;
  p.fiber = smf28();
  return p;
}

// Pair count at detuning δ computed without the library's phase or grid code:
// long-double phases at the 100 GHz channel centres, best 2·threshold window.
int oracle_count(const SellmeierModel& fiber, oracle::Real delta_m, oracle::Real threshold) {
  static const auto centres = oracle::grid_wavelengths(193.1L, 100.0L, 1541.0L, 1579.0L);
  std::vector<oracle::Real> phases;
  for (auto a : centres) phases.push_back(oracle::wrap(oracle::raw_phase(fiber, kPump, a, 0.067L + delta_m, 0.067L)));
  return oracle::best_window_count(phases, threshold);
}

}  // namespace

TEST_CASE("closed-form detuning") {
  CHECK(closed_form_detuning(fused_silica(), 1550.0, 1550.0, 0.067) == 0.0);
  const double d = closed_form_detuning(fused_silica(), 1560.0, 1520.5, 0.067);
  CHECK(d * 1e6 == doctest::Approx(-12.0).epsilon(3.0 / 12.0));
  const double ng_a = static_cast<double>(oracle::group_index(fused_silica(), 1560.0L));
  const double ng_b = static_cast<double>(oracle::group_index(fused_silica(), 1520.5L));
  CHECK(d == doctest::Approx(0.067 * (ng_b / ng_a - 1.0)).epsilon(1e-6));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> wl(1450.0, 1650.0);
  for (int i = 0; i < 200; ++i) {
    const double a = wl(rng), b = wl(rng);
    const double ab = closed_form_detuning(smf28(), a, b, 0.067);
    const double ba = closed_form_detuning(smf28(), b, a, 0.067);
    CHECK(std::abs((1.0 + ab / 0.067) * (1.0 + ba / 0.067) - 1.0) < 1e-10);
    const bool slower_a = dispersion_sample(smf28(), a).group_index > dispersion_sample(smf28(), b).group_index;
    if (a != b) CHECK((ab < 0.0) == slower_a);
  }
}

TEST_CASE("optimize_offset") {
  const std::vector<double> symmetric{-0.2, 0.1, 0.2, 0.0};
  CHECK(optimize_offset(symmetric) == 0.0);
  const std::vector<double> constant(5, 0.37);
  CHECK(optimize_offset(constant) == doctest::Approx(-0.37));
  // Vertex-calibrated quadratic dipping to −0.28 rad.
  std::vector<double> quad;
  for (double x = -1.0; x <= 1.0; x += 0.01) quad.push_back(-0.28 * x * x);
  CHECK(optimize_offset(quad) == doctest::Approx(0.14));
  CHECK_THROWS_AS(optimize_offset(std::vector<double>{}), std::invalid_argument);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 17);
    for (auto& x : v) x = u(rng);
    const double off = optimize_offset(v);
    auto worst = [&](double s) {
      double w = 0.0;
      for (double x : v) w = std::max(w, std::abs(x + s));
      return w;
    };
    for (int k = 0; k < 50; ++k) CHECK(worst(off) <= worst(u(rng) * 2.0) + 1e-15);
  }
}

TEST_CASE("automatic offset fits the largest window") {
  const auto pairs = pair_channels(GridSpec{}, kPump, Band{1541.0, 1579.0});
  for (double d : {0.0, -8.5e-6, -12e-6, 20e-6}) {
    const InterferometerPair interf(smf28(), 0.067, d);
    const auto choice = auto_phase_offset(pairs, interf, kPump, 0.14, EdgeRule::center);
    const auto counted = count_passing_pairs(pairs, interf.with_phase_offset(choice.phase_offset_rad), kPump, 0.14,
                                             EdgeRule::center);
    CHECK(counted.count == choice.count);
    CHECK(choice.count == oracle_count(smf28(), d, 0.14L));
  }
}

TEST_CASE("scan on the matched recipe") {
  const auto problem = reference_problem();
  const auto scan = scan_optimize(problem);
  const auto closed = closed_form_optimize(problem);
  MESSAGE("scan: delta = " << scan.best_detuning_m * 1e6 << " um, pairs = " << scan.pair_count
                           << "; closed form: delta = " << closed.best_detuning_m * 1e6 << " um, pairs = "
                           << closed.pair_count);
  CHECK(std::abs(scan.pair_count - 46) <= 4);
  CHECK(std::abs(scan.best_detuning_m - closed.best_detuning_m) <= problem.search.step_m + 1e-12);
  CHECK(scan.pair_count >= closed.pair_count);
  CHECK(scan.method == OptimizationMethod::scan);
  REQUIRE(scan.passing_band.has_value());

  // The reported count is what the reported interferometers give.
  const InterferometerPair at_best(problem.fiber, problem.path_diff_b_m, scan.best_detuning_m,
                                   scan.best_phase_offset_rad);
  CHECK(count_passing_pairs(scan.pairs, at_best, kPump, 0.14, EdgeRule::center).count == scan.pair_count);
  int passing = 0;
  for (const auto& p : scan.profile) passing += p.passes ? 1 : 0;
  CHECK(passing == scan.pair_count);

  const auto again = scan_optimize(problem);
  CHECK(again.best_detuning_m == scan.best_detuning_m);
  CHECK(again.best_phase_offset_rad == scan.best_phase_offset_rad);
  CHECK(again.pair_count == scan.pair_count);
}

TEST_CASE("coarse scan agrees with a fine brute-force oracle") {
  auto problem = reference_problem();
  problem.search.step_m = 1e-6;
  const auto coarse = scan_optimize(problem);
  int fine = 0;
  for (int i = -500; i <= 500; ++i) fine = std::max(fine, oracle_count(smf28(), i * 1e-7L, 0.14L));
  CHECK(coarse.pair_count == fine);

  auto refined = problem;
  refined.search.step_m = 0.5e-6;
  CHECK(scan_optimize(refined).pair_count == coarse.pair_count);
}

TEST_CASE("fixed offset mode is relative to degenerate calibration") {
  auto problem = reference_problem();
  problem.offset_mode = PhaseOffsetMode::fixed(0.0);
  const auto pairs = pair_channels(problem.grid, kPump, emission_band(problem.source));
  const auto interf = configure_interferometers(problem, pairs, -3e-6);
  CHECK(std::abs(two_photon_phase(interf, kPump, 1540.0)) < 1e-9);
  problem.offset_mode = PhaseOffsetMode::fixed(0.1);
  CHECK(two_photon_phase(configure_interferometers(problem, pairs, -3e-6), kPump, 1540.0) ==
        doctest::Approx(0.1).epsilon(1e-8));
}

TEST_CASE("scan errors") {
  auto problem = reference_problem();
  problem.search.step_m = 0.0;
  CHECK_THROWS_AS(scan_optimize(problem), DomainError);
  problem = reference_problem();
  problem.source.usable_band = Band{1541.0, 1541.1};
  CHECK_THROWS_AS(scan_optimize(problem), DomainError);
}

TEST_CASE("phase model fit") {
  SUBCASE("exact model data") {
    const double k = -0.9, v = 1541.3, c = 0.05;
    std::vector<PhaseSample> data;
    for (double l = 1530.0; l <= 1575.0; l += 1.5) data.push_back({l, k * (l - v) * (l - v) / (l - kPump) + c});
    const auto fit = fit_phase_model(data, kPump);
    CHECK(fit.curvature == doctest::Approx(k).epsilon(1e-3));
    CHECK(fit.vertex_nm == doctest::Approx(v).epsilon(1e-3));
    CHECK(fit.offset_rad == doctest::Approx(c).epsilon(1e-3));
    CHECK(fit.residual_rms < 1e-9);
  }
  SUBCASE("constant data") {
    std::vector<PhaseSample> data{{1540.0, 0.3}, {1545.0, 0.3}, {1550.0, 0.3}, {1555.0, 0.3}};
    const auto fit = fit_phase_model(data, kPump);
    CHECK(fit.curvature == 0.0);
    CHECK(fit.offset_rad == doctest::Approx(0.3));
    CHECK(fit.residual_rms == 0.0);
  }
  SUBCASE("exact Sellmeier phases give the dispersion curvature") {
    const auto interf = InterferometerPair(fused_silica(), 0.067).calibrated(kPump, 1540.0);
    std::vector<PhaseSample> data;
    for (double l = 1540.0; l <= 1555.0; l += 0.5) data.push_back({l, two_photon_phase(interf, kPump, l)});
    const auto fit = fit_phase_model(data, kPump);
    // n'' per µm² times π·ΔL in µm, rescaled to the nm form of the model.
    const double expected = dispersion_sample(fused_silica(), 1540.0).d2n_dlambda2_per_um2 * kPi * 0.067e6 * 1e-3;
    CHECK(fit.curvature == doctest::Approx(expected).epsilon(0.1));
    CHECK(fit.residual_rms >= 0.0);
  }
  SUBCASE("degenerate designs") {
    std::vector<PhaseSample> two{{1540.0, 0.1}, {1545.0, 0.2}, {1545.0, 0.25}};
    CHECK_THROWS_AS(fit_phase_model(two, kPump), FitError);
    std::vector<PhaseSample> below{{700.0, 0.1}, {1545.0, 0.2}, {1550.0, 0.25}};
    CHECK_THROWS_AS(fit_phase_model(below, kPump), FitError);
  }
}
