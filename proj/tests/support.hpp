#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "brirsim/hrtf.hpp"
#include "brirsim/scene.hpp"

namespace testing {

using namespace brirsim;

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("brirsim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline SimulationSpec shoebox(Vec3 dims, double absorption, double scattering, Vec3 src, Vec3 rcv) {
  SimulationSpec s;
  s.room.dimensions = dims;
  s.room.surfaces = uniform_surfaces(s.options.band_count(), absorption, scattering);
  s.sources.push_back({src, {}, Directivity::omnidirectional});
  s.receivers.push_back({rcv, {}, std::nullopt});
  return s;
}

/// Directions on a Fibonacci sphere; HRIR k-th sample of the left ear is
/// `left(d, k)`, right ear is its negation scaled by 0.5.
template <class F>
HrtfSet synthetic_hrtf(std::size_t m, std::size_t n, double fs, F left) {
  std::vector<HrtfPosition> pos;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < m; ++i) {
    const double z = m == 1 ? 0.0 : 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    const double az = std::fmod(rad2deg(golden * static_cast<double>(i)), 360.0);
    pos.push_back({az, rad2deg(std::asin(z)), 1.5});
  }
  std::vector<float> data(m * 2 * n);
  for (std::size_t d = 0; d < m; ++d) {
    for (std::size_t k = 0; k < n; ++k) {
      data[(2 * d) * n + k] = static_cast<float>(left(d, k));
      data[(2 * d + 1) * n + k] = static_cast<float>(-0.5 * left(d, k));
    }
  }
  return HrtfSet(fs, n, std::move(pos), std::move(data));
}

inline HrtfSet random_hrtf(std::size_t m, std::size_t n, double fs, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<double> values(m * n);
  for (double& v : values) v = g(rng);
  return synthetic_hrtf(m, n, fs, [&](std::size_t d, std::size_t k) { return values[d * n + k]; });
}

}  // namespace testing
