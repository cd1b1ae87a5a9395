#include "franson/kernels.hpp"

#include "kernels_inline.hpp"

namespace franson::kernels {
namespace {

void sellmeier_index_scalar(std::span<const SellmeierTerm> terms, const double* lambda_nm,
                            double* n_out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) n_out[i] = detail::sellmeier_index(terms, lambda_nm[i]);
}

void conjugate_scalar(double pump_nm, const double* lambda_a_nm, double* lambda_b_nm,
                      std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) lambda_b_nm[i] = detail::conjugate(pump_nm, lambda_a_nm[i]);
}

void phase_sum_scalar(double path_a_m, double path_b_m, const double* lambda_a_nm,
                      const double* n_a, const double* lambda_b_nm, const double* n_b,
                      double* phase_out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    phase_out[i] = detail::phase_sum(path_a_m, path_b_m, lambda_a_nm[i], n_a[i], lambda_b_nm[i], n_b[i]);
}

void reduce_scalar(double offset, double* phase, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) phase[i] = detail::reduce(offset, phase[i]);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", sellmeier_index_scalar, conjugate_scalar,
                                 phase_sum_scalar, reduce_scalar};
  return table;
}

}  // namespace franson::kernels
