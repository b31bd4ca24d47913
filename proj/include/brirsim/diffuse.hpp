#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "brirsim/arrival.hpp"
#include "brirsim/parallel.hpp"
#include "brirsim/random.hpp"
#include "brirsim/scene.hpp"

namespace brirsim {

struct Ray {
  Vec3 origin;
  Vec3 direction;
  std::array<double, kMaxBands> energy{};
  double path_time = 0.0;  // s
};

Vec3 sample_direction_uniform(RandomStream& stream);

/// Cosine-weighted direction in the hemisphere around `normal`.
Vec3 sample_direction_lambert(const Vec3& normal, RandomStream& stream);

/// Solid angle of the detection sphere seen from distance d, 2 pi when the
/// point lies inside it.
double detection_solid_angle(double distance, double radius);

/// Converts rained energy (fraction of the emitted energy crossing the
/// detection sphere) into squared pressure at the sphere centre, in the same
/// units as a specular arrival whose direct-path gain is 1/d.
constexpr double detection_energy_scale(double radius) { return 4.0 / (radius * radius); }

struct RainContext {
  Vec3 receiver;
  Rotation receiver_frame;
  std::span<const double> air_db_per_m;
  double speed_of_sound = 343.4;
  double detection_radius = 0.5;
};

/// Energy scattered from a surface hit onto the detection sphere. `ray` is
/// the incident ray with energy and path time at the hit point. The returned
/// record has kind == diffuse, `band` holding energies; id and sign are left
/// for the caller.
Arrival rain_contribution(const Vec3& hit, const Vec3& normal, const SurfaceSpec& surface,
                          const Ray& ray, const RainContext& ctx);

/// Traces rays for one source/receiver pair. Each ray draws from its own
/// RandomStream(seed, ray index), so results do not depend on scheduling.
class DiffuseTracer {
 public:
  DiffuseTracer(const ValidatedSpec& spec, std::size_t source_index, std::size_t receiver_index);

  std::int64_t ray_count() const { return ray_count_; }

  /// Appends the contributions of one ray, in emission order.
  void trace(std::int64_t ray_index, std::vector<Arrival>& out) const;

  /// Contributions of rays [first, last), sorted by (time, id).
  std::vector<Arrival> trace_range(std::int64_t first, std::int64_t last) const;

 private:
  Vec3 launch_direction(RandomStream& stream) const;

  const SimulationSpec& spec_;
  const SourceSpec& source_;
  std::vector<double> air_;
  RainContext ctx_;
  Vec3 source_axis_;
  std::array<double, kWallCount> mean_scattering_{};  // branch probability per wall
  std::int64_t ray_count_ = 0;
  double energy_floor_ = 0.0;
};

/// All diffuse contributions for one pair, sorted by (time, id). Empty when
/// the diffuse engine is disabled or n_rays is 0.
std::vector<Arrival> trace_rays(const ValidatedSpec& spec, std::size_t source_index,
                                std::size_t receiver_index, const ExecutionOptions& exec = {});

}  // namespace brirsim
