#include <immintrin.h>

#include <cmath>
#include <numbers>

#include "hfspec/kernels.hpp"

namespace hfspec::kernels::avx2 {

namespace {

// Cephes-style exp for x <= 0. Inputs below -700 return 0.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lower = _mm256_set1_pd(-700.0);
  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lower);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(std::numbers::log2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), x);
  x = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, x);
  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009e0));
  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_add_epi64(_mm256_cvtepi32_epi64(n32), _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, r);
}

}  // namespace

void lorentzian_accumulate(std::span<const double> centers, std::span<const double> weights,
                           double fwhm, std::span<const double> grid, std::span<double> out) {
  const double gamma = 0.5 * fwhm;
  const double g2 = gamma * gamma;
  const double norm = gamma / std::numbers::pi;
  const __m256d vg2 = _mm256_set1_pd(g2);
  const __m256d vnorm = _mm256_set1_pd(norm);
  const std::size_t n = grid.size();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d f = _mm256_loadu_pd(grid.data() + k);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const __m256d d = _mm256_sub_pd(f, _mm256_set1_pd(centers[j]));
      const __m256d den = _mm256_add_pd(_mm256_mul_pd(d, d), vg2);
      acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_set1_pd(weights[j]), den));
    }
    const __m256d o = _mm256_loadu_pd(out.data() + k);
    _mm256_storeu_pd(out.data() + k, _mm256_add_pd(o, _mm256_mul_pd(vnorm, acc)));
  }
  if (k < n) {
    scalar::lorentzian_accumulate(centers, weights, fwhm, grid.subspan(k), out.subspan(k));
  }
}

void gaussian_accumulate(std::span<const double> centers, std::span<const double> weights,
                         double sigma, std::span<const double> grid, std::span<double> out) {
  const __m256d vneg = _mm256_set1_pd(-0.5 / (sigma * sigma));
  const __m256d vnorm = _mm256_set1_pd(1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi)));
  const std::size_t n = grid.size();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d f = _mm256_loadu_pd(grid.data() + k);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const __m256d d = _mm256_sub_pd(f, _mm256_set1_pd(centers[j]));
      const __m256d e = exp_nonpositive(_mm256_mul_pd(_mm256_mul_pd(d, d), vneg));
      acc = _mm256_fmadd_pd(_mm256_set1_pd(weights[j]), e, acc);
    }
    const __m256d o = _mm256_loadu_pd(out.data() + k);
    _mm256_storeu_pd(out.data() + k, _mm256_add_pd(o, _mm256_mul_pd(vnorm, acc)));
  }
  if (k < n) {
    scalar::gaussian_accumulate(centers, weights, sigma, grid.subspan(k), out.subspan(k));
  }
}

}  // namespace hfspec::kernels::avx2
