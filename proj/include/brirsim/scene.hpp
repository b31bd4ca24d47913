#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brirsim/geometry.hpp"

namespace brirsim {

/// Upper bound on the number of frequency bands carried per path.
inline constexpr std::size_t kMaxBands = 10;

/// Wall index order: x = 0, x = Lx, y = 0, y = Ly, z = 0, z = Lz.
enum class Wall : int { x0 = 0, x1, y0, y1, z0, z1 };
inline constexpr int kWallCount = 6;

struct SurfaceSpec {
  std::vector<double> absorption;  // energy absorption per band, [0, 1]
  std::vector<double> scattering;  // scattered fraction of reflected energy, [0, 1]

  friend bool operator==(const SurfaceSpec&, const SurfaceSpec&) = default;
};

struct RoomSpec {
  Vec3 dimensions;
  std::array<SurfaceSpec, kWallCount> surfaces;
  double temperature = 20.0;  // degrees Celsius
  double humidity = 50.0;     // percent relative humidity
  double pressure = 101.325;  // kPa

  double volume() const { return dimensions.x * dimensions.y * dimensions.z; }
  double wall_area(int wall) const;
  double total_area() const;
  bool contains_strictly(const Vec3& p) const;

  friend bool operator==(const RoomSpec&, const RoomSpec&) = default;
};

enum class Directivity { omnidirectional, cardioid, subcardioid, hypercardioid, dipole };

std::string_view to_string(Directivity d);
std::optional<Directivity> directivity_from_string(std::string_view name);

/// First-order pressure pattern a + (1 - a) cos(theta); 1 on axis for every
/// pattern. Negative in the rear lobe of hypercardioid and dipole.
double directivity_gain(Directivity d, double cos_theta);

struct SourceSpec {
  Vec3 position;
  Orientation orientation;
  Directivity directivity = Directivity::omnidirectional;

  friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

enum class HrtfInterpolation { nearest, interpolate };

struct HrtfReceiver {
  std::string path;
  HrtfInterpolation interpolation = HrtfInterpolation::nearest;
  bool normalize = false;

  friend bool operator==(const HrtfReceiver&, const HrtfReceiver&) = default;
};

struct ReceiverSpec {
  Vec3 position;
  Orientation orientation;
  std::optional<HrtfReceiver> hrtf;  // empty: omnidirectional pressure receiver

  bool is_binaural() const { return hrtf.has_value(); }

  friend bool operator==(const ReceiverSpec&, const ReceiverSpec&) = default;
};

struct SimOptions {
  double fs = 48000.0;
  double ir_duration = 1.0;
  std::vector<double> band_centers{125, 250, 500, 1000, 2000, 4000};
  bool ism_enabled = true;
  int ism_max_order = 10;
  bool diffuse_enabled = true;
  std::int64_t n_rays = 10000;
  double detection_radius = 0.5;
  std::uint64_t seed = 1;
  double energy_threshold = 1e-6;

  std::size_t band_count() const { return band_centers.size(); }

  friend bool operator==(const SimOptions&, const SimOptions&) = default;
};

enum class OutputFormat { wav, f64raw };

struct OutputOptions {
  std::string path = ".";
  OutputFormat format = OutputFormat::wav;

  friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

struct SimulationSpec {
  RoomSpec room;
  SimOptions options;
  std::vector<SourceSpec> sources;
  std::vector<ReceiverSpec> receivers;
  OutputOptions output;

  friend bool operator==(const SimulationSpec&, const SimulationSpec&) = default;
};

/// A SimulationSpec whose invariants have been checked. Only validate()
/// constructs one.
class ValidatedSpec {
 public:
  const SimulationSpec& spec() const noexcept { return spec_; }
  const SimulationSpec* operator->() const noexcept { return &spec_; }

  friend bool operator==(const ValidatedSpec&, const ValidatedSpec&) = default;

 private:
  explicit ValidatedSpec(SimulationSpec spec) : spec_(std::move(spec)) {}
  friend ValidatedSpec validate(SimulationSpec spec);

  SimulationSpec spec_;
};

/// Checks every scene invariant; throws ValidationError naming the first
/// violation.
ValidatedSpec validate(SimulationSpec spec);

/// c = 331.4 + 0.6 T  (m/s, T in degrees Celsius).
constexpr double speed_of_sound(double temperature_c) { return 331.4 + 0.6 * temperature_c; }

/// Uniform surfaces: every wall gets the same per-band coefficients.
std::array<SurfaceSpec, kWallCount> uniform_surfaces(std::size_t bands, double absorption,
                                                     double scattering);

/// Inward unit normal of a wall.
Vec3 wall_normal(int wall);

}  // namespace brirsim
