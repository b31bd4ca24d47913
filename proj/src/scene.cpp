#include "brirsim/scene.hpp"

#include <cmath>
#include <sstream>

#include "brirsim/error.hpp"

namespace brirsim {

double RoomSpec::wall_area(int wall) const {
  switch (wall / 2) {
    case 0:
      return dimensions.y * dimensions.z;
    case 1:
      return dimensions.x * dimensions.z;
    default:
      return dimensions.x * dimensions.y;
  }
}

double RoomSpec::total_area() const {
  double s = 0.0;
  for (int w = 0; w < kWallCount; ++w) s += wall_area(w);
  return s;
}

bool RoomSpec::contains_strictly(const Vec3& p) const {
  for (int a = 0; a < 3; ++a) {
    if (!(p[a] > 0.0 && p[a] < dimensions[a])) return false;
  }
  return true;
}

std::string_view to_string(Directivity d) {
  switch (d) {
    case Directivity::omnidirectional:
      return "omnidirectional";
    case Directivity::cardioid:
      return "cardioid";
    case Directivity::subcardioid:
      return "subcardioid";
    case Directivity::hypercardioid:
      return "hypercardioid";
    case Directivity::dipole:
      return "dipole";
  }
  return "omnidirectional";
}

std::optional<Directivity> directivity_from_string(std::string_view name) {
  for (Directivity d : {Directivity::omnidirectional, Directivity::cardioid,
                        Directivity::subcardioid, Directivity::hypercardioid,
                        Directivity::dipole}) {
    if (name == to_string(d)) return d;
  }
  return std::nullopt;
}

double directivity_gain(Directivity d, double cos_theta) {
  switch (d) {
    case Directivity::omnidirectional:
      return 1.0;
    case Directivity::cardioid:
      return 0.5 + 0.5 * cos_theta;
    case Directivity::subcardioid:
      return 0.75 + 0.25 * cos_theta;
    case Directivity::hypercardioid:
      return 0.25 + 0.75 * cos_theta;
    case Directivity::dipole:
      return cos_theta;
  }
  return 1.0;
}

std::array<SurfaceSpec, kWallCount> uniform_surfaces(std::size_t bands, double absorption,
                                                     double scattering) {
  std::array<SurfaceSpec, kWallCount> out;
  for (auto& s : out) {
    s.absorption.assign(bands, absorption);
    s.scattering.assign(bands, scattering);
  }
  return out;
}

Vec3 wall_normal(int wall) {
  Vec3 n;
  n[wall / 2] = (wall % 2 == 0) ? 1.0 : -1.0;
  return n;
}

namespace {

[[noreturn]] void fail(const std::string& message) { throw ValidationError(message); }

bool finite3(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

void check_coefficients(const std::vector<double>& values, std::size_t bands, const char* what) {
  if (values.size() != bands) fail("band list inconsistent with surface arrays");
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) fail(std::string(what) + " out of range");
  }
}

}  // namespace

ValidatedSpec validate(SimulationSpec spec) {
  const RoomSpec& room = spec.room;
  const SimOptions& opt = spec.options;

  if (!finite3(room.dimensions) || room.dimensions.x <= 0.0 || room.dimensions.y <= 0.0 ||
      room.dimensions.z <= 0.0) {
    fail("room dimensions must be strictly positive");
  }
  if (!(room.temperature >= -20.0 && room.temperature <= 50.0)) {
    fail("temperature out of range [-20, 50] C");
  }
  if (!(room.humidity >= 0.0 && room.humidity <= 100.0)) fail("humidity out of range [0, 100] %");
  if (!(room.pressure > 0.0 && std::isfinite(room.pressure))) fail("pressure must be positive");

  if (!(opt.fs >= 8000.0 && opt.fs <= 192000.0) || opt.fs != std::round(opt.fs)) {
    fail("sampling frequency must be an integer in [8000, 192000] Hz");
  }
  if (!(opt.ir_duration > 0.0 && std::isfinite(opt.ir_duration))) {
    fail("impulse response duration must be positive");
  }
  if (opt.band_centers.empty()) fail("at least one frequency band is required");
  if (opt.band_centers.size() > kMaxBands) {
    fail("at most " + std::to_string(kMaxBands) + " frequency bands are supported");
  }
  for (std::size_t b = 0; b < opt.band_centers.size(); ++b) {
    const double f = opt.band_centers[b];
    if (!(f > 0.0 && f < opt.fs / 2.0)) fail("band centers must lie in (0, fs/2)");
    if (b > 0 && !(f > opt.band_centers[b - 1])) fail("band centers must be strictly increasing");
  }
  if (opt.ism_max_order < 0) fail("image-source order must be >= 0");
  if (opt.n_rays < 0) fail("ray count must be >= 0");
  if (!(opt.detection_radius > 0.0 && std::isfinite(opt.detection_radius))) {
    fail("detection radius must be positive");
  }
  if (!(opt.energy_threshold > 0.0 && opt.energy_threshold < 1.0)) {
    fail("energy threshold must lie in (0, 1)");
  }

  const std::size_t bands = opt.band_count();
  for (const SurfaceSpec& s : room.surfaces) {
    check_coefficients(s.absorption, bands, "absorption");
    check_coefficients(s.scattering, bands, "scattering");
  }

  if (spec.sources.empty()) fail("at least one source is required");
  if (spec.receivers.empty()) fail("at least one receiver is required");
  for (std::size_t i = 0; i < spec.sources.size(); ++i) {
    if (!finite3(spec.sources[i].position) || !room.contains_strictly(spec.sources[i].position)) {
      fail("source outside room (source " + std::to_string(i + 1) + ")");
    }
  }
  for (std::size_t j = 0; j < spec.receivers.size(); ++j) {
    const ReceiverSpec& r = spec.receivers[j];
    if (!finite3(r.position) || !room.contains_strictly(r.position)) {
      fail("receiver outside room (receiver " + std::to_string(j + 1) + ")");
    }
    if (r.hrtf && r.hrtf->path.empty()) fail("receiver " + std::to_string(j + 1) + ": empty HRTF path");
    for (std::size_t i = 0; i < spec.sources.size(); ++i) {
      if (norm(spec.sources[i].position - r.position) <= opt.detection_radius) {
        std::ostringstream msg;
        msg << "source " << i + 1 << " lies within the detection sphere of receiver " << j + 1;
        fail(msg.str());
      }
    }
  }
  return ValidatedSpec(std::move(spec));
}

}  // namespace brirsim
