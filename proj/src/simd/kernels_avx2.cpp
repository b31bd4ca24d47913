// Compiled with -mavx2 (and deliberately without -mfma). Only reached after
// the dispatcher has confirmed AVX2 support at runtime.

#include <immintrin.h>

#include "brirsim/simd/kernel_table.hpp"

namespace brirsim::simd::detail {
namespace {

constexpr std::size_t kFirBlock = 1024;

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    __m256d y1 = _mm256_loadu_pd(y + i + 4);
    y0 = _mm256_add_pd(y0, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    y1 = _mm256_add_pd(y1, _mm256_mul_pd(va, _mm256_loadu_pd(x + i + 4)));
    _mm256_storeu_pd(y + i, y0);
    _mm256_storeu_pd(y + i + 4, y1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    y0 = _mm256_add_pd(y0, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, y0);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void fir_avx2(const double* x, const double* h, std::size_t taps, double* y, std::size_t n) {
  for (std::size_t base = 0; base < n; base += kFirBlock) {
    const std::size_t len = n - base < kFirBlock ? n - base : kFirBlock;
    double* ys = y + base;
    std::size_t i = 0;
    // Register-blocked: 16 outputs stay in registers across all taps.
    for (; i + 16 <= len; i += 16) {
      __m256d a0 = _mm256_loadu_pd(ys + i);
      __m256d a1 = _mm256_loadu_pd(ys + i + 4);
      __m256d a2 = _mm256_loadu_pd(ys + i + 8);
      __m256d a3 = _mm256_loadu_pd(ys + i + 12);
      const double* xs = x + base + i + (taps - 1);
      for (std::size_t k = 0; k < taps; ++k) {
        const __m256d c = _mm256_set1_pd(h[k]);
        const double* xk = xs - k;
        a0 = _mm256_add_pd(a0, _mm256_mul_pd(c, _mm256_loadu_pd(xk)));
        a1 = _mm256_add_pd(a1, _mm256_mul_pd(c, _mm256_loadu_pd(xk + 4)));
        a2 = _mm256_add_pd(a2, _mm256_mul_pd(c, _mm256_loadu_pd(xk + 8)));
        a3 = _mm256_add_pd(a3, _mm256_mul_pd(c, _mm256_loadu_pd(xk + 12)));
      }
      _mm256_storeu_pd(ys + i, a0);
      _mm256_storeu_pd(ys + i + 4, a1);
      _mm256_storeu_pd(ys + i + 8, a2);
      _mm256_storeu_pd(ys + i + 12, a3);
    }
    for (; i + 4 <= len; i += 4) {
      __m256d a0 = _mm256_loadu_pd(ys + i);
      const double* xs = x + base + i + (taps - 1);
      for (std::size_t k = 0; k < taps; ++k) {
        a0 = _mm256_add_pd(a0, _mm256_mul_pd(_mm256_set1_pd(h[k]), _mm256_loadu_pd(xs - k)));
      }
      _mm256_storeu_pd(ys + i, a0);
    }
    for (; i < len; ++i) {
      double acc = ys[i];
      const double* xs = x + base + i + (taps - 1);
      for (std::size_t k = 0; k < taps; ++k) acc += h[k] * xs[-static_cast<std::ptrdiff_t>(k)];
      ys[i] = acc;
    }
  }
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_add_pd(s0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    s1 = _mm256_add_pd(s1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  double acc = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

double max_abs_avx2(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = lanes[0];
  for (int k = 1; k < 4; ++k) r = lanes[k] > r ? lanes[k] : r;
  for (; i < n; ++i) {
    const double v = x[i] < 0 ? -x[i] : x[i];
    r = v > r ? v : r;
  }
  return r;
}

void scale_avx2(double s, double* x, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= s;
}

}  // namespace

const KernelTable kAvx2Kernels{Isa::avx2,  axpy_avx2,    fir_avx2,  sum_squares_avx2,
                               dot_avx2,   max_abs_avx2, scale_avx2};

}  // namespace brirsim::simd::detail
