#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "brirsim/scene.hpp"
#include "brirsim/wave.hpp"

namespace brirsim {

enum class SourceLayout { sphere, hrtf_grid, explicit_positions };

struct HrtfEntrySpec {
  std::string id;
  std::filesystem::path path;  // resolved
  HrtfInterpolation interpolation = HrtfInterpolation::nearest;
  bool normalize = true;
};

struct DatasetSpec {
  RoomSpec room;
  SimOptions options;
  std::vector<Vec3> receiver_positions;
  Orientation receiver_orientation;
  std::vector<HrtfEntrySpec> hrtfs;  // empty: one omnidirectional receiver per position
  SourceLayout layout = SourceLayout::sphere;
  double sphere_radius = 1.0;
  double azimuth_step = 10.0;
  double elevation_step = 10.0;
  double elevation_min = -90.0;
  double elevation_max = 90.0;
  std::vector<Vec3> source_positions;  // explicit layout, room coordinates
  Directivity directivity = Directivity::omnidirectional;
  std::filesystem::path output_dir;  // resolved
  SampleFormat sample_format = SampleFormat::float32;
};

/// Parses the JSON dataset description. Relative paths are resolved against
/// `base_dir`. Throws FormatError for malformed JSON and ValidationError for
/// inconsistent content, including missing HRTF files.
DatasetSpec parse_dataset_spec(const std::string& json_text, const std::filesystem::path& base_dir);
DatasetSpec load_dataset_spec(const std::filesystem::path& path);

/// Directions (azimuth, elevation in degrees, receiver frame) of a sphere
/// layout: elevation rows from min to max, azimuth steps from 0, one point
/// at each pole.
std::vector<std::pair<double, double>> sphere_directions(double azimuth_step, double elevation_step,
                                                         double elevation_min, double elevation_max);

struct DatasetOptions {
  unsigned jobs = 1;
  bool resume = false;
  std::optional<std::uint64_t> seed;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct DatasetResult {
  std::size_t entries = 0;
  std::size_t rendered = 0;
  std::size_t skipped = 0;
  std::filesystem::path manifest;
};

/// Renders every receiver x source x HRTF combination to
/// output_dir/r{i}_s{j}_h{k}.wav and writes output_dir/manifest.json.
DatasetResult generate_dataset(const DatasetSpec& spec, const DatasetOptions& opts = {});

inline constexpr int kManifestSchema = 1;

}  // namespace brirsim
