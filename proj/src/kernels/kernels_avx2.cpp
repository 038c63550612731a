#include <immintrin.h>

#include <bit>
#include <cstdint>

#include "kernels_impl.hpp"

namespace capcov::kernels::detail {
namespace {

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scale_avx2(double a, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), va));
  }
  for (; i < n; ++i) y[i] *= a;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

// Lane k tracks the first maximum among indices congruent to k mod 4; the
// final reduction prefers the smallest index among equal lane maxima, which
// reproduces the scalar first-index rule exactly.
ArgmaxResult argmax_signed_avx2(const double* d, const double* s,
                                std::size_t n) {
  if (n < 8) {
    return kScalarTable.argmax_signed(d, s, n);
  }
  __m256d best = _mm256_mul_pd(_mm256_loadu_pd(d), _mm256_loadu_pd(s));
  __m256i best_idx = _mm256_setr_epi64x(0, 1, 2, 3);
  __m256i idx = best_idx;
  const __m256i step = _mm256_set1_epi64x(4);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    idx = _mm256_add_epi64(idx, step);
    const __m256d v = _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(s + i));
    const __m256d gt = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, v, gt);
    best_idx = _mm256_castpd_si256(_mm256_blendv_pd(
        _mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(idx), gt));
  }
  alignas(32) double vals[4];
  alignas(32) std::int64_t ids[4];
  _mm256_store_pd(vals, best);
  _mm256_store_si256(reinterpret_cast<__m256i*>(ids), best_idx);
  ArgmaxResult out{ids[0], vals[0]};
  for (int k = 1; k < 4; ++k) {
    if (vals[k] > out.value || (vals[k] == out.value && ids[k] < out.index)) {
      out = {ids[k], vals[k]};
    }
  }
  for (; i < n; ++i) {
    const double v = d[i] * s[i];
    if (v > out.value) out = {static_cast<std::ptrdiff_t>(i), v};
  }
  return out;
}

std::ptrdiff_t first_above_avx2(const double* d, const double* s, double tol,
                                std::size_t n) {
  const __m256d vt = _mm256_set1_pd(tol);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(s + i));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, vt, _CMP_GT_OQ));
    if (mask != 0) {
      return static_cast<std::ptrdiff_t>(i) +
             std::countr_zero(static_cast<unsigned>(mask));
    }
  }
  for (; i < n; ++i) {
    if (d[i] * s[i] > tol) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

}  // namespace

const KernelTable kAvx2Table{"avx2",          axpy_avx2,
                             scale_avx2,      dot_avx2,
                             argmax_signed_avx2, first_above_avx2};

}  // namespace capcov::kernels::detail
