#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "franson/constants.hpp"
#include "franson/errors.hpp"
#include "franson/phase.hpp"
#include "oracles.hpp"

using namespace franson;

namespace {
constexpr double kPump = 770.0;
constexpr double kPath = 0.067;
}  // namespace

TEST_CASE("arm phase") {
  CHECK(arm_phase(fused_silica(), 1540.0, 0.0) == 0.0);
  CHECK(arm_phase(fused_silica(), 1550.0, 2 * kPath) == doctest::Approx(2 * arm_phase(fused_silica(), 1550.0, kPath)));
  const double expected = static_cast<double>(oracle::kTwoPi * 0.067L * oracle::index(fused_silica(), 1540.0L) / 1540e-9L);
  CHECK(arm_phase(fused_silica(), 1540.0, kPath) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(expected == doctest::Approx(3.95e5).epsilon(2e-3));
  CHECK_THROWS_AS(arm_phase(fused_silica(), 1540.0, -1.0), DomainError);
  CHECK_THROWS_AS(arm_phase(smf28(), 1000.0, kPath), RangeError);
}

TEST_CASE("balanced analyzers calibrated at degeneracy") {
  const auto balanced = InterferometerPair(smf28(), kPath).calibrated(kPump, 1540.0);
  CHECK(balanced.calibration_nm() == 1540.0);
  CHECK(std::abs(two_photon_phase(balanced, kPump, 1540.0)) < 1e-9);
  // Threshold crossing near 1553 nm with the fiber's effective dispersion.
  CHECK(two_photon_phase(balanced, kPump, 1553.0) == doctest::Approx(-0.14).epsilon(0.03 / 0.14));

  // Bulk silica disperses more strongly and crosses −0.14 rad earlier.
  const auto bulk = InterferometerPair(fused_silica(), kPath).calibrated(kPump, 1540.0);
  CHECK(two_photon_phase(bulk, kPump, 1553.0) < two_photon_phase(balanced, kPump, 1553.0));
}

TEST_CASE("two-photon phase matches the long-double oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> alice(1541.0, 1579.0);
  std::uniform_real_distribution<double> detune(-40e-6, 40e-6);
  for (int i = 0; i < 500; ++i) {
    const double a = alice(rng);
    const double d = detune(rng);
    const auto interf = InterferometerPair(smf28(), kPath, d).calibrated(kPump, 1560.0);
    const double lib = two_photon_phase(interf, kPump, a);
    const double ref = static_cast<double>(oracle::relative_phase(smf28(), kPump, a, 1560.0L, kPath + d, kPath));
    CHECK(std::abs(reduce_phase(lib - ref)) < 1e-8);
  }
}

TEST_CASE("batch phases equal pointwise phases") {
  const auto interf = InterferometerPair(fused_silica(), kPath, -12e-6, 0.3);
  std::vector<double> alice;
  for (double a = 1541.0; a <= 1579.0; a += 0.37) alice.push_back(a);
  std::vector<double> batch(alice.size());
  two_photon_phase_batch(interf, kPump, alice, batch);
  for (std::size_t i = 0; i < alice.size(); ++i) CHECK(batch[i] == two_photon_phase(interf, kPump, alice[i]));
}

TEST_CASE("phase is reduced to (-pi, pi]") {
  CHECK(reduce_phase(kPi) == kPi);
  CHECK(reduce_phase(-kPi) == kPi);
  CHECK(wrap_offset(kPi) == -kPi);
  CHECK(reduce_phase(3 * kTwoPi + 0.25) == doctest::Approx(0.25));
  const auto interf = InterferometerPair(fused_silica(), kPath, 5e-6, 1.0);
  for (double a = 1541.0; a <= 1579.0; a += 1.0) {
    const double p = two_photon_phase(interf, kPump, a);
    CHECK(p > -kPi);
    CHECK(p <= kPi);
  }
}

TEST_CASE("exchanging the arms leaves the balanced phase unchanged") {
  const auto interf = InterferometerPair(fused_silica(), kPath, 0.0, 0.4);
  for (double a = 1541.0; a <= 1579.0; a += 2.5) {
    const double b = conjugate_wavelength(kPump, a);
    CHECK(std::abs(reduce_phase(two_photon_phase(interf, kPump, a) - two_photon_phase(interf, kPump, b))) < 1e-9);
  }
}

TEST_CASE("calibration is idempotent") {
  for (double d : {0.0, -12e-6, 7e-6}) {
    const auto once = InterferometerPair(fused_silica(), kPath, d, 2.0).calibrated(kPump, 1555.0);
    const auto twice = once.calibrated(kPump, 1555.0);
    CHECK(std::abs(reduce_phase(twice.phase_offset() - once.phase_offset())) < 1e-9);
    CHECK(std::abs(two_photon_phase(once, kPump, 1555.0)) < 1e-9);
  }
}

TEST_CASE("quadratic balanced approximation") {
  CHECK(balanced_phase_approx(fused_silica(), kPump, 1540.0, kPath) == 0.0);
  for (double a : {1500.0, 1520.0, 1539.0, 1541.0, 1560.0, 1580.0})
    CHECK(balanced_phase_approx(fused_silica(), kPump, a, kPath) < 0.0);

  for (const auto* fiber : {&fused_silica(), &smf28()}) {
    const auto exact = InterferometerPair(*fiber, kPath).calibrated(kPump, 1540.0);
    double worst = 0.0;
    for (double a = 1527.0; a <= 1553.0; a += 0.05)
      worst = std::max(worst, std::abs(two_photon_phase(exact, kPump, a) - balanced_phase_approx(*fiber, kPump, a, kPath)));
    MESSAGE(fiber->name() << ": max |exact - quadratic| over 1527-1553 nm = " << worst << " rad");
    CHECK(worst < 0.02);
  }
  CHECK_THROWS_AS(balanced_phase_approx(fused_silica(), kPump, 700.0, kPath), DomainError);
}

TEST_CASE("QBER law") {
  CHECK(qber_from_phase(0.0) == 0.0);
  CHECK(qber_from_phase(kPi) == doctest::Approx(1.0).epsilon(1e-15));
  // sin²(0.07) = 0.0048920; (1 − cos φ)/2 is an independent form of the same law.
  CHECK(std::abs(qber_from_phase(0.14) - (1.0 - std::cos(0.14)) / 2.0) < 1e-15);
  CHECK(std::abs(qber_from_phase(0.14) - 0.0048920) < 1e-7);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> phi(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = phi(rng);
    CHECK(qber_from_phase(-p) == qber_from_phase(p));
  }
}

TEST_CASE("inverse QBER law") {
  CHECK(phase_from_qber(0.0, +1) == 0.0);
  CHECK(std::abs(phase_from_qber(0.005, -1) + 0.1415) < 1e-4);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> q(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = q(rng);
    CHECK(std::abs(qber_from_phase(phase_from_qber(v, +1)) - v) < 1e-12);
  }
  CHECK_THROWS_AS(phase_from_qber(-0.01, 1), DomainError);
  CHECK_THROWS_AS(phase_from_qber(1.01, 1), DomainError);
  CHECK_THROWS_AS(phase_from_qber(0.1, 0), DomainError);
}

TEST_CASE("coincidence port probabilities") {
  auto [a1, a2] = coincidence_probabilities(0.0);
  CHECK(a1 == 1.0);
  CHECK(a2 == 0.0);
  auto [b1, b2] = coincidence_probabilities(kPi);
  CHECK(b1 == doctest::Approx(0.0));
  CHECK(b2 == doctest::Approx(1.0));
  auto [c1, c2] = coincidence_probabilities(kPi / 2);
  CHECK(c1 == doctest::Approx(0.5));
  CHECK(c2 == doctest::Approx(0.5));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> phi(-20.0, 20.0);
  for (int i = 0; i < 5000; ++i) {
    const auto [p1, p2] = coincidence_probabilities(phi(rng));
    CHECK(p1 >= 0.0);
    CHECK(p1 <= 1.0);
    CHECK(p2 >= 0.0);
    CHECK(p2 <= 1.0);
    CHECK(p1 + p2 == 1.0);
  }
}

TEST_CASE("analysis bases") {
  CHECK(analysis_basis(BasisId::Z).target_sum_rad == 0.0);
  CHECK(analysis_basis(BasisId::X).target_sum_rad == kPi);
}

TEST_CASE("second analysis basis") {
  const InterferometerPair interf(fused_silica(), kPath);
  const auto basis = second_basis(interf, kPump, Band{1541.0, 1579.0});
  const double n0 = refractive_index(fused_silica(), 1540.0);
  CHECK(basis.increment_m == doctest::Approx(770e-9 / (2 * n0)));
  CHECK(basis.increment_m * 1e9 == doctest::Approx(266.6).epsilon(1e-3));
  CHECK(arm_phase(fused_silica(), 1540.0, basis.increment_m) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(basis.max_added_error_rad < kTwoPi / 300.0);
  CHECK(basis.max_added_error_rad > 0.0);

  // The added phase is the same whatever the reference lengths.
  const auto other = second_basis(InterferometerPair(fused_silica(), 0.2, -30e-6), kPump, Band{1541.0, 1579.0});
  CHECK(other.max_added_error_rad == basis.max_added_error_rad);

  const auto incremented = interf.with_path_increment(basis.increment_m);
  const double added = reduce_phase(raw_two_photon_phase(incremented, kPump, 1540.0) -
                                    raw_two_photon_phase(interf, kPump, 1540.0));
  CHECK(std::abs(added) == doctest::Approx(kPi).epsilon(1e-6));
}

TEST_CASE("interferometer invariants") {
  CHECK_THROWS_AS(InterferometerPair(fused_silica(), 0.0), DomainError);
  CHECK_THROWS_AS(InterferometerPair(fused_silica(), 1e-6, -2e-6), DomainError);
  const InterferometerPair p(fused_silica(), kPath, -12e-6, 4.0);
  CHECK(p.phase_offset() >= -kPi);
  CHECK(p.phase_offset() < kPi);
  CHECK(p.path_diff_a_m() == doctest::Approx(kPath - 12e-6));
  CHECK_FALSE(p.calibration_nm().has_value());
  CHECK_THROWS_AS(two_photon_phase(p, kPump, 760.0), DomainError);
}
