#pragma once

// Scalar element kernels shared by the reference batch table and the
// single-point public functions, so both produce the same bits.

#include <cmath>
#include <span>

#include "franson/constants.hpp"
#include "franson/kernels.hpp"

namespace franson::kernels::detail {

inline double sellmeier_n2(std::span<const SellmeierTerm> terms, double lambda_nm) {
  const double l_um = lambda_nm / 1000.0;
  const double s = l_um * l_um;
  double acc = 1.0;
  for (const auto& t : terms) acc = acc + (t.strength * s) / (s - t.resonance_wavelength_sq_um2);
  return acc;
}

inline double sellmeier_index(std::span<const SellmeierTerm> terms, double lambda_nm) {
  return std::sqrt(sellmeier_n2(terms, lambda_nm));
}

inline double conjugate(double pump_nm, double lambda_a_nm) {
  return 1.0 / (1.0 / pump_nm - 1.0 / lambda_a_nm);
}

inline double phase_sum(double path_a_m, double path_b_m, double lambda_a_nm, double n_a,
                        double lambda_b_nm, double n_b) {
  const double ta = (path_a_m * n_a) / (lambda_a_nm * 1e-9);
  const double tb = (path_b_m * n_b) / (lambda_b_nm * 1e-9);
  return kTwoPi * (ta + tb);
}

inline double reduce(double offset, double phase) {
  const double x = phase + offset;
  const double k = std::nearbyint(x / kTwoPi);
  double r = x - kTwoPi * k;
  if (r <= -kPi) r = r + kTwoPi;
  if (r > kPi) r = r - kTwoPi;
  return r;
}

}  // namespace franson::kernels::detail
