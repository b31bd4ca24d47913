#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "brirsim/geometry.hpp"

namespace brirsim {

/// SOFA spherical coordinates: azimuth counterclockwise from the front,
/// elevation up from the horizontal plane, both in degrees.
struct HrtfPosition {
  double azimuth = 0.0;
  double elevation = 0.0;
  double radius = 1.0;  // stored, not used for lookup

  friend bool operator==(const HrtfPosition&, const HrtfPosition&) = default;
};

/// Receiver-local query direction; azimuth is wrapped to [0, 360).
struct Direction {
  double azimuth = 0.0;
  double elevation = 0.0;

  Direction() = default;
  Direction(double az, double el);
  static Direction from_vector(const Vec3& v);
};

/// Immutable set of head-related impulse responses. Data layout is
/// direction-major, then left/right, then time.
class HrtfSet {
 public:
  HrtfSet(double fs, std::size_t ir_length, std::vector<HrtfPosition> positions,
          std::vector<float> data, std::string metadata_json = "{}");

  double fs() const noexcept { return fs_; }
  std::size_t size() const noexcept { return positions_.size(); }
  std::size_t ir_length() const noexcept { return ir_length_; }
  const std::vector<HrtfPosition>& positions() const noexcept { return positions_; }
  const std::vector<Vec3>& unit_vectors() const noexcept { return unit_; }
  std::span<const float> data() const noexcept { return data_; }
  /// Extra header keys as a JSON object string.
  const std::string& metadata() const noexcept { return metadata_; }

  std::span<const float> ir(std::size_t direction, int channel) const {
    return {data_.data() + (2 * direction + static_cast<std::size_t>(channel)) * ir_length_,
            ir_length_};
  }

  friend bool operator==(const HrtfSet&, const HrtfSet&) = default;

 private:
  double fs_;
  std::size_t ir_length_;
  std::vector<HrtfPosition> positions_;
  std::vector<Vec3> unit_;
  std::vector<float> data_;
  std::string metadata_;
};

/// Container codec ("HRTFSET1" + JSON header + float32 block + CRC32).
std::vector<std::uint8_t> encode_hrtf(const HrtfSet& set);
HrtfSet decode_hrtf(std::span<const std::uint8_t> bytes);
HrtfSet load_hrtf(const std::filesystem::path& path);
void save_hrtf(const HrtfSet& set, const std::filesystem::path& path);

struct NearestMatch {
  std::size_t index = 0;
  double angle = 0.0;  // rad
};

/// Smallest great-circle angle; ties within 1e-12 rad go to the lowest index.
NearestMatch nearest_index(const HrtfSet& set, const Direction& dir);

/// Up to three measurements and their weights (summing to 1).
struct HrirBlend {
  std::array<std::size_t, 3> index{};
  std::array<double, 3> weight{};
  int count = 0;
  bool fallback = false;  // set had fewer than 3 directions; nearest used
};

HrirBlend nearest_blend(const HrtfSet& set, const Direction& dir);

/// Inverse-angle weighting over the three nearest measurements that do not
/// lie on one great circle. Exact at stored directions.
HrirBlend interpolation_blend(const HrtfSet& set, const Direction& dir);

struct HrirPair {
  std::vector<float> left;
  std::vector<float> right;
  std::size_t index = 0;  // nearest measurement
  bool fallback = false;
};

HrirPair nearest(const HrtfSet& set, const Direction& dir);
HrirPair interpolate(const HrtfSet& set, const Direction& dir);
HrirPair mix(const HrtfSet& set, const HrirBlend& blend);

/// Polyphase Kaiser-windowed sinc resampling of every HRIR. The reduced
/// rate ratio must have a denominator of at most 1000.
HrtfSet resample(const HrtfSet& set, double target_fs);

/// Scales the whole data block so that the largest magnitude is 0.99.
HrtfSet normalize(const HrtfSet& set);

/// Rational resampling of one signal; output length ceil(n * up / down).
std::vector<double> resample_signal(std::span<const double> x, std::int64_t up, std::int64_t down);

}  // namespace brirsim
