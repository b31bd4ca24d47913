#pragma once

// Data-parallel inner loops used by the renderer and the analysis code.
//
// Every kernel has a portable scalar reference and, where the target allows,
// an AVX2 (x86-64) or NEON (aarch64) variant. The variant is picked once at
// runtime from the CPU features; BRIRSIM_SIMD=scalar|avx2|neon overrides it.
//
// axpy, fir_accumulate and scale update every output element with the same
// sequence of IEEE operations as the scalar reference (no FMA contraction,
// no reassociation), so all variants are bit-identical. sum_squares and dot
// reassociate and agree only to rounding.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "brirsim/simd/kernel_table.hpp"

namespace brirsim::simd {

/// Kernels for a specific ISA, or nullptr when not compiled in or not
/// supported by the running CPU.
const KernelTable* kernels_for(Isa isa);

/// The kernels selected for this process.
const KernelTable& active_kernels();

std::string_view isa_name(Isa isa);

/// Every ISA usable on this machine, scalar first.
std::vector<Isa> available_isas();

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active_kernels().axpy(a, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline double sum_squares(std::span<const double> x) {
  return active_kernels().sum_squares(x.data(), x.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline double max_abs(std::span<const double> x) {
  return active_kernels().max_abs(x.data(), x.size());
}

inline void scale(double s, std::span<double> x) { active_kernels().scale(s, x.data(), x.size()); }

/// Full linear convolution of a and b (length a.size() + b.size() - 1).
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

}  // namespace brirsim::simd
