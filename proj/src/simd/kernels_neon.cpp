// AArch64 NEON variants. Built only on aarch64 targets, where Advanced SIMD
// is architecturally guaranteed. vmulq/vaddq are kept separate (no vfmaq)
// to stay bit-identical with the scalar reference.

#include <arm_neon.h>

#include "brirsim/simd/kernel_table.hpp"

namespace brirsim::simd::detail {
namespace {

constexpr std::size_t kFirBlock = 1024;

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    vst1q_f64(y + i + 2, vaddq_f64(vld1q_f64(y + i + 2), vmulq_f64(va, vld1q_f64(x + i + 2))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void fir_neon(const double* x, const double* h, std::size_t taps, double* y, std::size_t n) {
  for (std::size_t base = 0; base < n; base += kFirBlock) {
    const std::size_t len = n - base < kFirBlock ? n - base : kFirBlock;
    double* ys = y + base;
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
      float64x2_t a0 = vld1q_f64(ys + i);
      float64x2_t a1 = vld1q_f64(ys + i + 2);
      float64x2_t a2 = vld1q_f64(ys + i + 4);
      float64x2_t a3 = vld1q_f64(ys + i + 6);
      const double* xs = x + base + i + (taps - 1);
      for (std::size_t k = 0; k < taps; ++k) {
        const float64x2_t c = vdupq_n_f64(h[k]);
        const double* xk = xs - k;
        a0 = vaddq_f64(a0, vmulq_f64(c, vld1q_f64(xk)));
        a1 = vaddq_f64(a1, vmulq_f64(c, vld1q_f64(xk + 2)));
        a2 = vaddq_f64(a2, vmulq_f64(c, vld1q_f64(xk + 4)));
        a3 = vaddq_f64(a3, vmulq_f64(c, vld1q_f64(xk + 6)));
      }
      vst1q_f64(ys + i, a0);
      vst1q_f64(ys + i + 2, a1);
      vst1q_f64(ys + i + 4, a2);
      vst1q_f64(ys + i + 6, a3);
    }
    for (; i < len; ++i) {
      double acc = ys[i];
      const double* xs = x + base + i + (taps - 1);
      for (std::size_t k = 0; k < taps; ++k) acc += h[k] * xs[-static_cast<std::ptrdiff_t>(k)];
      ys[i] = acc;
    }
  }
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0);
  float64x2_t s1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = vaddq_f64(s0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    s1 = vaddq_f64(s1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double acc = vaddvq_f64(vaddq_f64(s0, s1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares_neon(const double* x, std::size_t n) { return dot_neon(x, x, n); }

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) {
    const double v = x[i] < 0 ? -x[i] : x[i];
    r = v > r ? v : r;
  }
  return r;
}

void scale_neon(double s, double* x, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vs, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= s;
}

}  // namespace

const KernelTable kNeonKernels{Isa::neon, axpy_neon,    fir_neon,  sum_squares_neon,
                               dot_neon,  max_abs_neon, scale_neon};

}  // namespace brirsim::simd::detail
