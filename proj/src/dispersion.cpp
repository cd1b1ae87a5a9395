#include "franson/dispersion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "franson/constants.hpp"
#include "franson/errors.hpp"
#include "kernels_inline.hpp"

namespace franson {

SellmeierModel::SellmeierModel(std::string name, std::vector<SellmeierTerm> terms,
                               WavelengthRange validity)
    : name_(std::move(name)), terms_(std::move(terms)), validity_(validity) {
  if (!(validity_.min_nm > 0.0) || !(validity_.max_nm >= validity_.min_nm))
    throw DomainError(fmt::format("sellmeier model '{}': invalid validity range [{}, {}] nm",
                                  name_, validity_.min_nm, validity_.max_nm));
  for (const auto& t : terms_) {
    if (!std::isfinite(t.strength) || !std::isfinite(t.resonance_wavelength_sq_um2))
      throw DomainError(fmt::format("sellmeier model '{}': non-finite coefficient", name_));
  }
}

void SellmeierModel::check_range(double lambda_nm) const {
  if (!validity_.contains(lambda_nm))
    throw RangeError(fmt::format("wavelength {:.6g} nm outside validity range [{:.6g}, {:.6g}] nm of '{}'",
                                 lambda_nm, validity_.min_nm, validity_.max_nm, name_));
}

const SellmeierModel& fused_silica() {
  static const SellmeierModel model{
      "fused_silica",
      {{0.6961663, 0.0684043 * 0.0684043},
       {0.4079426, 0.1162414 * 0.1162414},
       {0.8974794, 9.896161 * 9.896161}},
      {210.0, 3710.0}};
  return model;
}

const SellmeierModel& smf28() {
  static const SellmeierModel model{
      "smf28",
      {{0.615998840149, 0.0684043 * 0.0684043},
       {0.504213457525, 0.1162414 * 0.1162414},
       {1053.60046008, 110793.252764}},
      {1400.0, 1700.0}};
  return model;
}

SellmeierModel vacuum() {
  return SellmeierModel{"vacuum", {}, {1e-3, std::numeric_limits<double>::max()}};
}

const SellmeierModel& builtin_model(std::string_view name) {
  static const SellmeierModel empty = vacuum();
  if (name == "fused_silica" || name == "silica") return fused_silica();
  if (name == "smf28") return smf28();
  if (name == "vacuum") return empty;
  throw std::invalid_argument(fmt::format("unknown fiber model '{}'", name));
}

std::vector<std::string_view> builtin_model_names() { return {"fused_silica", "smf28", "vacuum"}; }

double refractive_index(const SellmeierModel& model, double lambda_nm) {
  model.check_range(lambda_nm);
  return kernels::detail::sellmeier_index(model.terms(), lambda_nm);
}

DispersionPoint dispersion_sample(const SellmeierModel& model, double lambda_nm) {
  model.check_range(lambda_nm);
  const double l = lambda_nm / 1000.0;
  const double s = l * l;

  // Derivatives of n² term by term, then n' = (n²)'/2n, n'' = ((n²)'' − 2n'²)/2n.
  double n2 = 1.0;
  double dn2 = 0.0;
  double d2n2 = 0.0;
  for (const auto& t : model.terms()) {
    const double b = t.strength;
    const double c = t.resonance_wavelength_sq_um2;
    const double d = s - c;
    n2 += b * s / d;
    dn2 += -2.0 * b * c * l / (d * d);
    d2n2 += 2.0 * b * c * (3.0 * s + c) / (d * d * d);
  }
  const double n = std::sqrt(n2);
  const double dn = dn2 / (2.0 * n);
  const double d2n = (d2n2 - 2.0 * dn * dn) / (2.0 * n);
  const double ng = n - l * dn;
  return {lambda_nm, n, dn, d2n, ng, kSpeedOfLight / ng};
}

void refractive_index_batch(const SellmeierModel& model, std::span<const double> lambda_nm,
                            std::span<double> n_out) {
  if (n_out.size() < lambda_nm.size()) throw std::invalid_argument("refractive_index_batch: output too small");
  for (double l : lambda_nm) model.check_range(l);
  kernels::active().sellmeier_index(model.terms(), lambda_nm.data(), n_out.data(), lambda_nm.size());
}

}  // namespace franson
