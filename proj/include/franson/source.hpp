#pragma once

// SPDC photon-pair source: energy-conservation pairing, emission spectrum
// and pair sampling.

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <utility>

namespace franson {

enum class SpectralShape { sinc2, gaussian };

SpectralShape parse_spectral_shape(std::string_view text);
std::string_view to_string(SpectralShape shape);

struct Band {
  double lo_nm = 0.0;
  double hi_nm = 0.0;

  double width() const { return hi_nm - lo_nm; }
  bool contains(double lambda_nm) const { return lambda_nm >= lo_nm && lambda_nm <= hi_nm; }
};

struct SourceSpec {
  double pump_nm = 770.0;
  SpectralShape shape = SpectralShape::sinc2;
  double fwhm_nm = 55.0;
  /// Usable band for the long-wavelength (Alice) photon. Unset means the
  /// FWHM interval of the Alice-side marginal.
  std::optional<Band> usable_band = Band{1541.0, 1579.0};

  double degenerate_nm() const { return 2.0 * pump_nm; }

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

struct PhotonPair {
  double alice_nm;  // long-wavelength photon, ≥ 2λ_p
  double bob_nm;
};

/// λ_B = 1/(1/λ_p − 1/λ_A). Throws DomainError when λ_A ≤ λ_p.
double conjugate_wavelength(double pump_nm, double alice_nm);

/// Emission density per nm over the full spectrum (both photons), peaked at
/// the degenerate wavelength and normalized over its finite support. The
/// sinc² shape keeps only the main lobe between its first nulls.
class SpectralDensity {
 public:
  explicit SpectralDensity(const SourceSpec& spec);

  double operator()(double lambda_nm) const;
  double peak() const { return peak_; }
  Band support() const { return support_; }

  /// Density of the long-wavelength photon, obtained by folding the
  /// short-wavelength side through the conjugate map.
  double alice_marginal(double alice_nm) const;

 private:
  double unnormalized(double lambda_nm) const;

  SourceSpec spec_;
  double scale_ = 0.0;  // argument scale of the shape, 1/nm
  Band support_;
  double norm_ = 1.0;
  double peak_ = 0.0;
};

double spectral_density(const SourceSpec& spec, double lambda_nm);

/// Draws one pair. λ is drawn from the emission density and folded so that
/// the longer of (λ, conjugate(λ)) goes to Alice.
class PairSampler {
 public:
  explicit PairSampler(const SourceSpec& spec);

  template <class Rng>
  PhotonPair operator()(Rng& rng) const {
    if (degenerate_) return {center_, center_};
    for (;;) {
      const double lambda = support_.lo_nm + support_.width() * unit(rng);
      if (unit(rng) * peak_ <= density_(lambda)) return fold(lambda);
    }
  }

  /// Same, conditioned on λ_A lying in `alice_band`.
  template <class Rng>
  PhotonPair operator()(Rng& rng, Band alice_band) const {
    return (*this)(rng, alice_band, envelope(alice_band));
  }

  /// Conditioned draw with a precomputed envelope(alice_band).
  template <class Rng>
  PhotonPair operator()(Rng& rng, Band alice_band, double bound) const {
    if (degenerate_) return {center_, center_};
    for (;;) {
      const double alice = alice_band.lo_nm + alice_band.width() * unit(rng);
      if (unit(rng) * bound <= density_.alice_marginal(alice)) return {alice, conjugate(alice)};
    }
  }

  /// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine.
  template <class Rng>
  static double unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }

  const SpectralDensity& density() const { return density_; }

  /// Upper bound of the Alice-side marginal over `band`, for rejection
  /// sampling. Throws DomainError when the band holds no emission.
  double envelope(Band band) const;

 private:
  PhotonPair fold(double lambda_nm) const;
  double conjugate(double lambda_nm) const;

  SourceSpec spec_;
  SpectralDensity density_;
  Band support_;
  double peak_;
  double center_;
  bool degenerate_;
};

PhotonPair sample_pair(const SourceSpec& spec, std::mt19937_64& rng);

Band emission_band(const SourceSpec& spec);

}  // namespace franson
