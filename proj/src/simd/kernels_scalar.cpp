#include <cmath>

#include "brirsim/simd/kernel_table.hpp"

namespace brirsim::simd::detail {
namespace {

constexpr std::size_t kFirBlock = 1024;

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void fir_scalar(const double* x, const double* h, std::size_t taps, double* y, std::size_t n) {
  for (std::size_t base = 0; base < n; base += kFirBlock) {
    const std::size_t len = n - base < kFirBlock ? n - base : kFirBlock;
    for (std::size_t k = 0; k < taps; ++k) {
      const double c = h[k];
      const double* xs = x + base + (taps - 1 - k);
      double* ys = y + base;
      for (std::size_t i = 0; i < len; ++i) ys[i] += c * xs[i];
    }
  }
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fabs(x[i]) > m ? std::fabs(x[i]) : m;
  return m;
}

void scale_scalar(double s, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

}  // namespace

const KernelTable kScalarKernels{Isa::scalar,       axpy_scalar, fir_scalar,  sum_squares_scalar,
                                 dot_scalar,        max_abs_scalar, scale_scalar};

}  // namespace brirsim::simd::detail
