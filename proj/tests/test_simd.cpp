#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "brirsim/simd/kernels.hpp"

using namespace brirsim::simd;

namespace {
std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}
}  // namespace

TEST_CASE("scalar kernels are always available and listed first") {
  const auto isas = available_isas();
  REQUIRE(!isas.empty());
  CHECK(isas.front() == Isa::scalar);
  CHECK(kernels_for(Isa::scalar) != nullptr);
  CHECK(!isa_name(active_kernels().isa).empty());
}

TEST_CASE("every ISA variant agrees with the scalar reference") {
  const KernelTable& ref = *kernels_for(Isa::scalar);
  std::mt19937_64 rng(1);
  for (Isa isa : available_isas()) {
    const KernelTable& k = *kernels_for(isa);
    INFO(isa_name(isa));
    for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 63, 100, 1027}) {
      const auto x = random_vector(n, rng);
      const auto y0 = random_vector(n, rng);

      auto ya = y0, yb = y0;
      ref.axpy(0.37, x.data(), ya.data(), n);
      k.axpy(0.37, x.data(), yb.data(), n);
      CHECK(ya == yb);

      ya = y0;
      yb = y0;
      ref.scale(-1.7, ya.data(), n);
      k.scale(-1.7, yb.data(), n);
      CHECK(ya == yb);

      for (std::size_t taps : {1, 2, 5, 33}) {
        const auto h = random_vector(taps, rng);
        const auto in = random_vector(n + taps - 1, rng);
        ya = y0;
        yb = y0;
        ref.fir_accumulate(in.data(), h.data(), taps, ya.data(), n);
        k.fir_accumulate(in.data(), h.data(), taps, yb.data(), n);
        CHECK(ya == yb);
      }

      const double scale = 1e-12 * static_cast<double>(n + 1);
      CHECK(k.sum_squares(x.data(), n) ==
            doctest::Approx(ref.sum_squares(x.data(), n)).epsilon(scale).scale(1.0));
      CHECK(k.dot(x.data(), y0.data(), n) == doctest::Approx(ref.dot(x.data(), y0.data(), n)).epsilon(scale).scale(1.0));
      CHECK(k.max_abs(x.data(), n) == ref.max_abs(x.data(), n));
    }
  }
}

TEST_CASE("scalar reference matches naive loops") {
  const KernelTable& ref = *kernels_for(Isa::scalar);
  const std::vector<double> x{1, -2, 3, -4, 5};
  CHECK(ref.sum_squares(x.data(), x.size()) == 55.0);
  CHECK(ref.max_abs(x.data(), x.size()) == 5.0);
  // fir_accumulate is a valid-mode convolution.
  const std::vector<double> h{1, 10, 100};
  std::vector<double> y(3, 0.0);
  ref.fir_accumulate(x.data(), h.data(), 3, y.data(), 3);
  CHECK(y == std::vector<double>{3 * 1 + -2 * 10 + 1 * 100, -4 + 30 - 200, 5 - 40 + 300});
  const auto c = convolve(std::vector<double>{1, 2}, std::vector<double>{1, 1, 1});
  CHECK(c == std::vector<double>{1, 3, 3, 2});
}
