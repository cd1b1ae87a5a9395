#pragma once

// Batch kernels for the wavelength-parallel inner loops (index evaluation,
// conjugate wavelengths, two-arm phase sums, phase reduction).
//
// Every kernel exists as a scalar reference and, on x86-64, an AVX2 variant.
// The variants perform the same IEEE operations in the same order (no FMA),
// so their outputs are bit-identical; tests/test_kernels.cpp enforces this.
// The active table is chosen once at first use from CPU features; setting
// FRANSON_SIMD=scalar in the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace franson {

struct SellmeierTerm {
  double strength;                     // B_i, dimensionless
  double resonance_wavelength_sq_um2;  // C_i, µm²
};

namespace kernels {

struct KernelTable {
  std::string_view name;

  /// n(λ) for each wavelength in nm. No range checking.
  void (*sellmeier_index)(std::span<const SellmeierTerm> terms, const double* lambda_nm,
                          double* n_out, std::size_t count);

  /// λ_B = 1 / (1/λ_p − 1/λ_A), all in nm.
  void (*conjugate)(double pump_nm, const double* lambda_a_nm, double* lambda_b_nm,
                    std::size_t count);

  /// 2π·(ΔL_A·n_A/λ_A + ΔL_B·n_B/λ_B) with ΔL in m and λ in nm.
  void (*phase_sum)(double path_a_m, double path_b_m, const double* lambda_a_nm,
                    const double* n_a, const double* lambda_b_nm, const double* n_b,
                    double* phase_out, std::size_t count);

  /// Adds `offset` and reduces each phase to (−π, π].
  void (*reduce)(double offset, double* phase, std::size_t count);
};

const KernelTable& scalar_table();

/// Null when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// Table used by the library: AVX2 when available unless overridden.
const KernelTable& active();

}  // namespace kernels
}  // namespace franson
