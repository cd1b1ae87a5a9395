#pragma once

// Two-photon phase of a pair of unbalanced analyzer interferometers, the
// QBER law and its inverse, port probabilities, and the second analysis basis.

#include <optional>
#include <span>
#include <utility>

#include "franson/dispersion.hpp"
#include "franson/source.hpp"

namespace franson {

/// Alice's and Bob's analyzers. Alice's path difference is ΔL_B + detuning.
///
/// The large absolute interferometric phase is never tracked: a single
/// offset φ₀ ∈ [−π, π) stands for everything the piezo stretchers absorb.
/// Values are immutable; calibration returns a new pair.
class InterferometerPair {
 public:
  /// Throws DomainError when either path difference is not positive.
  InterferometerPair(SellmeierModel fiber, double path_diff_b_m, double detuning_m = 0.0,
                     double phase_offset_rad = 0.0);

  const SellmeierModel& fiber() const { return fiber_; }
  double path_diff_a_m() const { return path_b_m_ + detuning_m_; }
  double path_diff_b_m() const { return path_b_m_; }
  double detuning_m() const { return detuning_m_; }
  double phase_offset() const { return phase_offset_; }
  std::optional<double> calibration_nm() const { return calibration_nm_; }

  InterferometerPair with_phase_offset(double phase_offset_rad) const;
  InterferometerPair with_detuning(double detuning_m) const;
  InterferometerPair with_path_increment(double increment_m) const;

  /// New pair whose two-photon phase vanishes at `alice_nm`.
  InterferometerPair calibrated(double pump_nm, double alice_nm) const;

 private:
  SellmeierModel fiber_;
  double path_b_m_;
  double detuning_m_;
  double phase_offset_;
  std::optional<double> calibration_nm_;
};

enum class BasisId { Z, X };

struct AnalysisBasis {
  BasisId id;
  double target_sum_rad;
};

/// Z: φ_A + φ_B = 0; X: φ'_A + φ'_B = π.
AnalysisBasis analysis_basis(BasisId id);

/// Offset wrapped to [−π, π).
double wrap_offset(double phase_rad);
/// Phase reduced to (−π, π].
double reduce_phase(double phase_rad);

/// 2π·ΔL·n(λ)/λ, not reduced.
double arm_phase(const SellmeierModel& fiber, double lambda_nm, double path_diff_m);

/// Unreduced arm-phase sum at λ_A and its conjugate (no offset applied).
double raw_two_photon_phase(const InterferometerPair& interf, double pump_nm, double alice_nm);

/// arm_phase(λ_A, ΔL_A) + arm_phase(λ_B, ΔL_B) + φ₀, reduced to (−π, π].
double two_photon_phase(const InterferometerPair& interf, double pump_nm, double alice_nm);

/// Batch form through the SIMD kernels; same values as the pointwise call.
void two_photon_phase_batch(const InterferometerPair& interf, double pump_nm,
                            std::span<const double> alice_nm, std::span<double> phase_out);

/// Unreduced batch phases without offset, relative to nothing.
void raw_two_photon_phase_batch(const InterferometerPair& interf, double pump_nm,
                                std::span<const double> alice_nm, std::span<double> phase_out);

/// Quadratic balanced-analyzer approximation (the wavelength-dependent part
/// only; the constant is dropped):
///   n''(2λ_p)·π·(λ_A − 2λ_p)²/(λ_A − λ_p)·ΔL
double balanced_phase_approx(const SellmeierModel& fiber, double pump_nm, double alice_nm,
                             double path_diff_m);

double qber_from_phase(double phase_rad);

/// sign·2·asin(√q). Throws DomainError when q ∉ [0, 1].
double phase_from_qber(double qber, int sign);

/// ((1 + cos φ)/2, (1 − cos φ)/2).
std::pair<double, double> coincidence_probabilities(double phase_rad);

struct SecondBasis {
  double increment_m;
  double max_added_error_rad;
};

/// Increment λ_p/(2n₀) added to both analyzers for the X basis, and the
/// largest deviation of the added two-photon phase from π over `alice_band`.
SecondBasis second_basis(const InterferometerPair& interf, double pump_nm, Band alice_band);

}  // namespace franson
