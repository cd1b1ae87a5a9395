#include "franson/phase.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "franson/constants.hpp"
#include "franson/errors.hpp"
#include "kernels_inline.hpp"

namespace franson {

InterferometerPair::InterferometerPair(SellmeierModel fiber, double path_diff_b_m, double detuning_m,
                                       double phase_offset_rad)
    : fiber_(std::move(fiber)),
      path_b_m_(path_diff_b_m),
      detuning_m_(detuning_m),
      phase_offset_(wrap_offset(phase_offset_rad)) {
  if (!(path_b_m_ > 0.0) || !(path_b_m_ + detuning_m_ > 0.0))
    throw DomainError(fmt::format("path length differences must be positive (dL_B = {} m, dL_A = {} m)",
                                  path_b_m_, path_b_m_ + detuning_m_));
}

InterferometerPair InterferometerPair::with_phase_offset(double phase_offset_rad) const {
  InterferometerPair copy = *this;
  copy.phase_offset_ = wrap_offset(phase_offset_rad);
  copy.calibration_nm_.reset();
  return copy;
}

InterferometerPair InterferometerPair::with_detuning(double detuning_m) const {
  InterferometerPair copy(fiber_, path_b_m_, detuning_m, phase_offset_);
  return copy;
}

InterferometerPair InterferometerPair::with_path_increment(double increment_m) const {
  InterferometerPair copy(fiber_, path_b_m_ + increment_m, detuning_m_, phase_offset_);
  return copy;
}

InterferometerPair InterferometerPair::calibrated(double pump_nm, double alice_nm) const {
  InterferometerPair copy = *this;
  copy.phase_offset_ = wrap_offset(phase_offset_ - two_photon_phase(*this, pump_nm, alice_nm));
  copy.calibration_nm_ = alice_nm;
  return copy;
}

AnalysisBasis analysis_basis(BasisId id) {
  return id == BasisId::Z ? AnalysisBasis{BasisId::Z, 0.0} : AnalysisBasis{BasisId::X, kPi};
}

double reduce_phase(double phase_rad) { return kernels::detail::reduce(0.0, phase_rad); }

double wrap_offset(double phase_rad) {
  const double r = reduce_phase(phase_rad);
  return r == kPi ? -kPi : r;
}

double arm_phase(const SellmeierModel& fiber, double lambda_nm, double path_diff_m) {
  if (path_diff_m < 0.0) throw DomainError(fmt::format("negative path difference {} m", path_diff_m));
  const double n = refractive_index(fiber, lambda_nm);
  return kTwoPi * ((path_diff_m * n) / (lambda_nm * 1e-9));
}

namespace {

double checked_conjugate(const SellmeierModel& fiber, double pump_nm, double alice_nm) {
  if (!(alice_nm > pump_nm))
    throw DomainError(fmt::format("no conjugate photon: lambda_A = {} nm is not above the pump ({} nm)",
                                  alice_nm, pump_nm));
  fiber.check_range(alice_nm);
  const double bob = kernels::detail::conjugate(pump_nm, alice_nm);
  fiber.check_range(bob);
  return bob;
}

}  // namespace

double raw_two_photon_phase(const InterferometerPair& interf, double pump_nm, double alice_nm) {
  const auto& fiber = interf.fiber();
  const double bob = checked_conjugate(fiber, pump_nm, alice_nm);
  const double n_a = kernels::detail::sellmeier_index(fiber.terms(), alice_nm);
  const double n_b = kernels::detail::sellmeier_index(fiber.terms(), bob);
  return kernels::detail::phase_sum(interf.path_diff_a_m(), interf.path_diff_b_m(), alice_nm, n_a, bob, n_b);
}

double two_photon_phase(const InterferometerPair& interf, double pump_nm, double alice_nm) {
  return kernels::detail::reduce(interf.phase_offset(), raw_two_photon_phase(interf, pump_nm, alice_nm));
}

void raw_two_photon_phase_batch(const InterferometerPair& interf, double pump_nm,
                                std::span<const double> alice_nm, std::span<double> phase_out) {
  if (phase_out.size() < alice_nm.size()) throw std::invalid_argument("two_photon_phase_batch: output too small");
  const auto& fiber = interf.fiber();
  const auto& k = kernels::active();
  const std::size_t count = alice_nm.size();
  std::vector<double> bob(count), n_a(count), n_b(count);
  for (double a : alice_nm) {
    if (!(a > pump_nm))
      throw DomainError(fmt::format("no conjugate photon: lambda_A = {} nm is not above the pump ({} nm)", a, pump_nm));
    fiber.check_range(a);
  }
  k.conjugate(pump_nm, alice_nm.data(), bob.data(), count);
  for (double b : bob) fiber.check_range(b);
  k.sellmeier_index(fiber.terms(), alice_nm.data(), n_a.data(), count);
  k.sellmeier_index(fiber.terms(), bob.data(), n_b.data(), count);
  k.phase_sum(interf.path_diff_a_m(), interf.path_diff_b_m(), alice_nm.data(), n_a.data(), bob.data(),
              n_b.data(), phase_out.data(), count);
}

void two_photon_phase_batch(const InterferometerPair& interf, double pump_nm,
                            std::span<const double> alice_nm, std::span<double> phase_out) {
  raw_two_photon_phase_batch(interf, pump_nm, alice_nm, phase_out);
  kernels::active().reduce(interf.phase_offset(), phase_out.data(), alice_nm.size());
}

double balanced_phase_approx(const SellmeierModel& fiber, double pump_nm, double alice_nm,
                             double path_diff_m) {
  if (!(alice_nm > pump_nm))
    throw DomainError(fmt::format("lambda_A = {} nm must exceed the pump ({} nm)", alice_nm, pump_nm));
  const DispersionPoint at_degenerate = dispersion_sample(fiber, 2.0 * pump_nm);
  const double offset_um = (alice_nm - 2.0 * pump_nm) / 1000.0;
  const double denom_um = (alice_nm - pump_nm) / 1000.0;
  const double path_um = path_diff_m * 1e6;
  return at_degenerate.d2n_dlambda2_per_um2 * kPi * offset_um * offset_um / denom_um * path_um;
}

double qber_from_phase(double phase_rad) {
  const double s = std::sin(0.5 * phase_rad);
  return s * s;
}

double phase_from_qber(double qber, int sign) {
  if (!(qber >= 0.0 && qber <= 1.0)) throw DomainError(fmt::format("QBER {} outside [0, 1]", qber));
  if (sign != 1 && sign != -1) throw DomainError(fmt::format("sign must be +1 or -1, got {}", sign));
  return sign * 2.0 * std::asin(std::sqrt(qber));
}

std::pair<double, double> coincidence_probabilities(double phase_rad) {
  const double p1 = 0.5 * (1.0 + std::cos(phase_rad));
  return {p1, 1.0 - p1};
}

SecondBasis second_basis(const InterferometerPair& interf, double pump_nm, Band alice_band) {
  const auto& fiber = interf.fiber();
  const double n0 = refractive_index(fiber, 2.0 * pump_nm);
  const double increment_m = pump_nm * 1e-9 / (2.0 * n0);

  // φ' − φ = 2π·ΔL'·(n_A/λ_A + n_B/λ_B) for the increment alone; both arms
  // receive it, so the result does not depend on ΔL_A, ΔL_B.
  constexpr int kSamples = 4000;
  double worst = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double alice = alice_band.lo_nm + alice_band.width() * i / kSamples;
    const double bob = checked_conjugate(fiber, pump_nm, alice);
    const double added = arm_phase(fiber, alice, increment_m) + arm_phase(fiber, bob, increment_m);
    worst = std::max(worst, std::abs(added - kPi));
  }
  return {increment_m, worst};
}

}  // namespace franson
