// Compiled with -mavx2 only; reached through the dispatch table after a CPU check.

#include <immintrin.h>

#include "franson/kernels.hpp"
#include "kernels_inline.hpp"

namespace franson::kernels {
namespace {

constexpr std::size_t kLanes = 4;

void sellmeier_index_avx2(std::span<const SellmeierTerm> terms, const double* lambda_nm,
                          double* n_out, std::size_t count) {
  const __m256d thousand = _mm256_set1_pd(1000.0);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256d l_um = _mm256_div_pd(_mm256_loadu_pd(lambda_nm + i), thousand);
    const __m256d s = _mm256_mul_pd(l_um, l_um);
    __m256d acc = one;
    for (const auto& t : terms) {
      const __m256d num = _mm256_mul_pd(_mm256_set1_pd(t.strength), s);
      const __m256d den = _mm256_sub_pd(s, _mm256_set1_pd(t.resonance_wavelength_sq_um2));
      acc = _mm256_add_pd(acc, _mm256_div_pd(num, den));
    }
    _mm256_storeu_pd(n_out + i, _mm256_sqrt_pd(acc));
  }
  for (; i < count; ++i) n_out[i] = detail::sellmeier_index(terms, lambda_nm[i]);
}

void conjugate_avx2(double pump_nm, const double* lambda_a_nm, double* lambda_b_nm,
                    std::size_t count) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d inv_pump = _mm256_div_pd(one, _mm256_set1_pd(pump_nm));
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256d inv_a = _mm256_div_pd(one, _mm256_loadu_pd(lambda_a_nm + i));
    _mm256_storeu_pd(lambda_b_nm + i, _mm256_div_pd(one, _mm256_sub_pd(inv_pump, inv_a)));
  }
  for (; i < count; ++i) lambda_b_nm[i] = detail::conjugate(pump_nm, lambda_a_nm[i]);
}

void phase_sum_avx2(double path_a_m, double path_b_m, const double* lambda_a_nm,
                    const double* n_a, const double* lambda_b_nm, const double* n_b,
                    double* phase_out, std::size_t count) {
  const __m256d la = _mm256_set1_pd(path_a_m);
  const __m256d lb = _mm256_set1_pd(path_b_m);
  const __m256d nano = _mm256_set1_pd(1e-9);
  const __m256d two_pi = _mm256_set1_pd(kTwoPi);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256d ta = _mm256_div_pd(_mm256_mul_pd(la, _mm256_loadu_pd(n_a + i)),
                                     _mm256_mul_pd(_mm256_loadu_pd(lambda_a_nm + i), nano));
    const __m256d tb = _mm256_div_pd(_mm256_mul_pd(lb, _mm256_loadu_pd(n_b + i)),
                                     _mm256_mul_pd(_mm256_loadu_pd(lambda_b_nm + i), nano));
    _mm256_storeu_pd(phase_out + i, _mm256_mul_pd(two_pi, _mm256_add_pd(ta, tb)));
  }
  for (; i < count; ++i)
    phase_out[i] = detail::phase_sum(path_a_m, path_b_m, lambda_a_nm[i], n_a[i], lambda_b_nm[i], n_b[i]);
}

void reduce_avx2(double offset, double* phase, std::size_t count) {
  const __m256d off = _mm256_set1_pd(offset);
  const __m256d two_pi = _mm256_set1_pd(kTwoPi);
  const __m256d pi = _mm256_set1_pd(kPi);
  const __m256d neg_pi = _mm256_set1_pd(-kPi);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256d x = _mm256_add_pd(_mm256_loadu_pd(phase + i), off);
    const __m256d k = _mm256_round_pd(_mm256_div_pd(x, two_pi),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(two_pi, k));
    const __m256d low = _mm256_cmp_pd(r, neg_pi, _CMP_LE_OQ);
    r = _mm256_blendv_pd(r, _mm256_add_pd(r, two_pi), low);
    const __m256d high = _mm256_cmp_pd(r, pi, _CMP_GT_OQ);
    r = _mm256_blendv_pd(r, _mm256_sub_pd(r, two_pi), high);
    _mm256_storeu_pd(phase + i, r);
  }
  for (; i < count; ++i) phase[i] = detail::reduce(offset, phase[i]);
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", sellmeier_index_avx2, conjugate_avx2, phase_sum_avx2,
                                 reduce_avx2};
  return table;
}

}  // namespace franson::kernels
