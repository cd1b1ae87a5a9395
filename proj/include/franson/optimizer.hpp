#pragma once

// Analyzer detuning search: closed-form group-delay matching, exhaustive
// detuning scan with phase-offset selection, and the balanced-phase fit.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "franson/dispersion.hpp"
#include "franson/grid.hpp"
#include "franson/phase.hpp"
#include "franson/source.hpp"

namespace franson {

/// ΔL_B·(n_g(λ*_B)/n_g(λ*_A) − 1): the detuning that equalizes the group
/// delays ΔL_A/v_A and ΔL_B/v_B at the two target wavelengths.
double closed_form_detuning(const SellmeierModel& fiber, double target_alice_nm, double target_bob_nm,
                            double path_diff_b_m);

/// Channel-count-weighted centers of the Alice and Bob sides of `pairs`.
std::pair<double, double> default_target_wavelengths(std::span<const ChannelPair> pairs);

/// −(max + min)/2 over `profile`: the offset minimizing max |φ + φ₀|.
/// Throws std::invalid_argument on an empty profile.
double optimize_offset(std::span<const double> profile);

struct OffsetChoice {
  double phase_offset_rad = 0.0;
  int count = 0;  // pairs fitting the corridor at this offset
};

/// Offset that lets the largest number of pairs fit inside ±threshold.
/// Phases are treated on the circle; the pairs kept are the largest set whose
/// phase arcs fit in a 2·threshold window, and the corridor is centered on
/// them with optimize_offset. `interf`'s own offset is ignored.
OffsetChoice auto_phase_offset(std::span<const ChannelPair> pairs, const InterferometerPair& interf,
                               double pump_nm, double threshold_phase_rad, EdgeRule rule);

struct DetuningSearch {
  double min_m = -50e-6;
  double max_m = 50e-6;
  double step_m = 0.5e-6;

  /// Subdivisions of the step used to refine around the coarse maxima.
  static constexpr int kRefine = 10;

  std::vector<double> values() const;
};

/// Fixed offsets are applied relative to a calibration at the degenerate
/// wavelength, so a fixed value means the same thing at every detuning.
struct PhaseOffsetMode {
  bool automatic = true;
  double value_rad = 0.0;

  static PhaseOffsetMode fixed(double v) { return {false, v}; }
  static PhaseOffsetMode autoselect() { return {true, 0.0}; }
};

struct OptimizationProblem {
  SourceSpec source;
  GridSpec grid;
  SellmeierModel fiber = fused_silica();
  double path_diff_b_m = 0.067;
  double threshold_phase_rad = 0.14;
  DetuningSearch search;
  PhaseOffsetMode offset_mode;
  EdgeRule edge_rule = EdgeRule::center;

  void validate() const;
};

enum class OptimizationMethod { closed_form, scan };

struct ProfilePoint {
  double alice_nm;
  double bob_nm;
  double phase_rad;
  double qber;
  bool passes;
};

struct OptimizationResult {
  double best_detuning_m = 0.0;
  double best_phase_offset_rad = 0.0;
  int pair_count = 0;
  std::optional<Band> passing_band;  // λ_A span of passing pairs
  std::vector<ProfilePoint> profile;
  std::vector<ChannelPair> pairs;
  OptimizationMethod method = OptimizationMethod::scan;
};

/// Interferometers for detuning δ with the problem's phase-offset policy applied.
InterferometerPair configure_interferometers(const OptimizationProblem& problem,
                                             std::span<const ChannelPair> pairs, double detuning_m);

/// Evaluates one detuning: offset selection, pair counting and profile.
OptimizationResult evaluate_detuning(const OptimizationProblem& problem, std::span<const ChannelPair> pairs,
                                     double detuning_m, OptimizationMethod method);

/// Exhaustive scan over the detuning grid, refined at step/kRefine around
/// every coarse maximum and including the closed-form detuning when it lies
/// in range. Maximizes the passing-pair count; ties go to the smaller |δ|,
/// then to the smaller δ. Throws DomainError if the source band holds no
/// channel pairs.
OptimizationResult scan_optimize(const OptimizationProblem& problem);

/// The problem evaluated at closed_form_detuning for the default target wavelengths.
OptimizationResult closed_form_optimize(const OptimizationProblem& problem);

struct PhaseFit {
  double curvature;       // k, rad/nm
  double vertex_nm;       // λ_v
  double offset_rad;      // c
  double residual_rms;    // rad
};

struct PhaseSample {
  double alice_nm;
  double phase_rad;
};

/// Least-squares fit of φ(λ) = k·(λ − λ_v)²/(λ − λ_p) + c. Constant data
/// gives k = 0, c = the constant and λ_v at the mid-wavelength of the data.
/// Throws FitError for fewer than three distinct wavelengths or a
/// rank-deficient design.
PhaseFit fit_phase_model(std::span<const PhaseSample> data, double pump_nm);

}  // namespace franson
