#pragma once

// Fiber material dispersion from Sellmeier equations.
//
//   n²(λ) = 1 + Σᵢ Bᵢ λ² / (λ² − Cᵢ)
//
// Wavelengths are in nm at every interface; resonances Cᵢ are stored in µm²
// and the derivatives are reported per µm, matching how Sellmeier tables and
// dispersion coefficients are usually quoted.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "franson/kernels.hpp"

namespace franson {

struct WavelengthRange {
  double min_nm = 0.0;
  double max_nm = 0.0;

  bool contains(double lambda_nm) const { return lambda_nm >= min_nm && lambda_nm <= max_nm; }
};

class SellmeierModel {
 public:
  /// Throws DomainError if the range is empty or a term is not finite.
  SellmeierModel(std::string name, std::vector<SellmeierTerm> terms, WavelengthRange validity);

  const std::string& name() const { return name_; }
  std::span<const SellmeierTerm> terms() const { return terms_; }
  const WavelengthRange& validity() const { return validity_; }

  /// Throws RangeError naming the valid interval when λ is outside it.
  void check_range(double lambda_nm) const;

 private:
  std::string name_;
  std::vector<SellmeierTerm> terms_;
  WavelengthRange validity_;
};

struct DispersionPoint {
  double wavelength_nm;
  double n;
  double dn_dlambda_per_um;
  double d2n_dlambda2_per_um2;
  double group_index;            // n − λ·dn/dλ
  double group_velocity_m_per_s; // c / group_index
};

/// Room-temperature bulk fused silica (Malitson three-term set), 210–3710 nm.
const SellmeierModel& fused_silica();

/// Effective mode index of standard single-mode fiber (SMF-28 type) in the
/// same three-term form, fitted over 1400–1700 nm to the standard fiber
/// dispersion law D(λ) = S₀/4·(λ − λ₀⁴/λ³) with λ₀ = 1313 nm,
/// S₀ = 0.086 ps/(nm²·km), and group index 1.4682 at 1550 nm. See
/// tools/fit_smf28_sellmeier.py for the fit.
const SellmeierModel& smf28();

/// A model with no terms (n ≡ 1), valid for every positive wavelength.
SellmeierModel vacuum();

/// Built-in lookup: "fused_silica" (alias "silica"), "smf28", "vacuum".
/// Throws std::invalid_argument for unknown names.
const SellmeierModel& builtin_model(std::string_view name);
std::vector<std::string_view> builtin_model_names();

double refractive_index(const SellmeierModel& model, double lambda_nm);

/// n and its first two wavelength derivatives from the analytic Sellmeier form.
DispersionPoint dispersion_sample(const SellmeierModel& model, double lambda_nm);

/// Batch n(λ) through the active SIMD kernel; every wavelength is range-checked.
void refractive_index_batch(const SellmeierModel& model, std::span<const double> lambda_nm,
                            std::span<double> n_out);

}  // namespace franson
