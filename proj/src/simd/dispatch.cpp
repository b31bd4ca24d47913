#include <cstdlib>
#include <iostream>
#include <string>

#include "brirsim/simd/kernels.hpp"

namespace brirsim::simd {
namespace {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(BRIRSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(BRIRSIM_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& select_kernels() {
  if (const char* env = std::getenv("BRIRSIM_SIMD"); env != nullptr && *env != '\0') {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa)) {
        if (const KernelTable* table = kernels_for(isa)) return *table;
        std::cerr << "warning: BRIRSIM_SIMD=" << want << " not available, using auto-detection\n";
      }
    }
  }
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (const KernelTable* table = kernels_for(isa)) return *table;
  }
  return detail::kScalarKernels;
}

}  // namespace

const KernelTable* kernels_for(Isa isa) {
  if (!cpu_supports(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar:
      return &detail::kScalarKernels;
    case Isa::avx2:
#if defined(BRIRSIM_HAVE_AVX2)
      return &detail::kAvx2Kernels;
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(BRIRSIM_HAVE_NEON)
      return &detail::kNeonKernels;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = select_kernels();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (kernels_for(isa) != nullptr) out.push_back(isa);
  }
  return out;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::span<const double> longer = a.size() >= b.size() ? a : b;
  const std::span<const double> shorter = a.size() >= b.size() ? b : a;
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t k = 0; k < shorter.size(); ++k) {
    active_kernels().axpy(shorter[k], longer.data(), out.data() + k, longer.size());
  }
  return out;
}

}  // namespace brirsim::simd
