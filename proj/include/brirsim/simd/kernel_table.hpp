#pragma once

// Kernel function table shared by the ISA-specific translation units. Kept
// free of standard-library templates so the AVX2/NEON objects, which are
// compiled with extra target flags, cannot emit mis-targeted inline code.

#include <cstddef>

namespace brirsim::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y[i] += sum_{k<taps} h[k] * x[i + taps - 1 - k], accumulated in k order.
  // x holds n + taps - 1 samples.
  void (*fir_accumulate)(const double* x, const double* h, std::size_t taps, double* y,
                         std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  // x[i] *= s
  void (*scale)(double s, double* x, std::size_t n);
};

namespace detail {
extern const KernelTable kScalarKernels;
#if defined(BRIRSIM_HAVE_AVX2)
extern const KernelTable kAvx2Kernels;
#endif
#if defined(BRIRSIM_HAVE_NEON)
extern const KernelTable kNeonKernels;
#endif
}  // namespace detail

}  // namespace brirsim::simd
