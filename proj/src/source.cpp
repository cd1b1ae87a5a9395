#include "franson/source.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "franson/constants.hpp"
#include "franson/errors.hpp"

namespace franson {
namespace {

// sin(x)/x = 1/√2: the half-maximum point of sinc².
constexpr double kSinc2HalfWidth = 1.3915573782515103;
constexpr double kGaussianSupportFwhms = 3.0;
constexpr int kQuadratureIntervals = 20000;  // even

double sinc2(double x) {
  if (x == 0.0) return 1.0;
  const double s = std::sin(x) / x;
  return s * s;
}

}  // namespace

SpectralShape parse_spectral_shape(std::string_view text) {
  if (text == "sinc2") return SpectralShape::sinc2;
  if (text == "gaussian") return SpectralShape::gaussian;
  throw DomainError(fmt::format("unknown spectral shape '{}' (expected sinc2 or gaussian)", text));
}

std::string_view to_string(SpectralShape shape) {
  return shape == SpectralShape::sinc2 ? "sinc2" : "gaussian";
}

void SourceSpec::validate() const {
  if (!(pump_nm > 0.0) || !std::isfinite(pump_nm))
    throw DomainError(fmt::format("pump wavelength must be positive, got {}", pump_nm));
  if (!(fwhm_nm >= 0.0) || !std::isfinite(fwhm_nm))
    throw DomainError(fmt::format("fwhm bandwidth must be non-negative, got {}", fwhm_nm));
  if (usable_band) {
    if (!(usable_band->lo_nm > pump_nm) || !(usable_band->hi_nm >= usable_band->lo_nm))
      throw DomainError(fmt::format("usable band [{}, {}] nm must be non-empty and above the pump ({} nm)",
                                    usable_band->lo_nm, usable_band->hi_nm, pump_nm));
  }
}

double conjugate_wavelength(double pump_nm, double alice_nm) {
  if (!(alice_nm > pump_nm))
    throw DomainError(fmt::format("no conjugate photon: lambda_A = {} nm is not above the pump ({} nm)",
                                  alice_nm, pump_nm));
  return 1.0 / (1.0 / pump_nm - 1.0 / alice_nm);
}

SpectralDensity::SpectralDensity(const SourceSpec& spec) : spec_(spec) {
  spec_.validate();
  const double center = spec_.degenerate_nm();
  if (spec_.fwhm_nm == 0.0) {
    support_ = {center, center};
    return;
  }
  double half_support = 0.0;
  if (spec_.shape == SpectralShape::sinc2) {
    scale_ = 2.0 * kSinc2HalfWidth / spec_.fwhm_nm;
    half_support = kPi / scale_;
  } else {
    scale_ = 2.0 * std::sqrt(2.0 * std::log(2.0)) / spec_.fwhm_nm;  // 1/σ
    half_support = kGaussianSupportFwhms * spec_.fwhm_nm;
  }
  support_ = {center - half_support, center + half_support};
  if (!(support_.lo_nm > spec_.pump_nm))
    throw DomainError(fmt::format("emission support reaches below the pump wavelength (fwhm {} nm too wide)",
                                  spec_.fwhm_nm));

  // Composite Simpson over the support.
  const double h = support_.width() / kQuadratureIntervals;
  double sum = unnormalized(support_.lo_nm) + unnormalized(support_.hi_nm);
  for (int i = 1; i < kQuadratureIntervals; ++i)
    sum += (i % 2 == 1 ? 4.0 : 2.0) * unnormalized(support_.lo_nm + i * h);
  norm_ = sum * h / 3.0;
  peak_ = 1.0 / norm_;
}

double SpectralDensity::unnormalized(double lambda_nm) const {
  const double x = scale_ * (lambda_nm - spec_.degenerate_nm());
  if (spec_.shape == SpectralShape::sinc2) return sinc2(x);
  return std::exp(-0.5 * x * x);
}

double SpectralDensity::operator()(double lambda_nm) const {
  if (spec_.fwhm_nm == 0.0 || !support_.contains(lambda_nm)) return 0.0;
  return unnormalized(lambda_nm) / norm_;
}

double SpectralDensity::alice_marginal(double alice_nm) const {
  const double center = spec_.degenerate_nm();
  if (alice_nm < center) return 0.0;
  const double bob = 1.0 / (1.0 / spec_.pump_nm - 1.0 / alice_nm);
  const double jacobian = (bob * bob) / (alice_nm * alice_nm);
  return (*this)(alice_nm) + (*this)(bob) * jacobian;
}

double spectral_density(const SourceSpec& spec, double lambda_nm) {
  return SpectralDensity(spec)(lambda_nm);
}

PairSampler::PairSampler(const SourceSpec& spec)
    : spec_(spec),
      density_(spec),
      support_(density_.support()),
      peak_(density_.peak()),
      center_(spec.degenerate_nm()),
      degenerate_(spec.fwhm_nm == 0.0) {}

double PairSampler::conjugate(double lambda_nm) const {
  return 1.0 / (1.0 / spec_.pump_nm - 1.0 / lambda_nm);
}

PhotonPair PairSampler::fold(double lambda_nm) const {
  const double other = conjugate(lambda_nm);
  return lambda_nm >= other ? PhotonPair{lambda_nm, other} : PhotonPair{other, lambda_nm};
}

double PairSampler::envelope(Band band) const {
  if (degenerate_) return 1.0;
  constexpr int kProbes = 256;
  double best = 0.0;
  for (int i = 0; i <= kProbes; ++i)
    best = std::max(best, density_.alice_marginal(band.lo_nm + band.width() * i / kProbes));
  if (best <= 0.0)
    throw DomainError(fmt::format("no emission in alice band [{}, {}] nm", band.lo_nm, band.hi_nm));
  // Grid maximum of a smooth density; the margin keeps the envelope above the true peak.
  return best * 1.05;
}

PhotonPair sample_pair(const SourceSpec& spec, std::mt19937_64& rng) { return PairSampler(spec)(rng); }

Band emission_band(const SourceSpec& spec) {
  spec.validate();
  if (spec.usable_band) return *spec.usable_band;
  const double center = spec.degenerate_nm();
  if (spec.fwhm_nm == 0.0) return {center, center};

  const SpectralDensity density(spec);
  const double half = 0.5 * density.alice_marginal(center);
  double lo = center;
  double hi = density.support().hi_nm;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (density.alice_marginal(mid) > half ? lo : hi) = mid;
  }
  return {center, 0.5 * (lo + hi)};
}

}  // namespace franson
