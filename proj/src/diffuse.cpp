#include "brirsim/diffuse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "brirsim/air_absorption.hpp"

namespace brirsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::int64_t kRaysPerChunk = 256;
constexpr std::uint64_t kMaxBounceId = (std::uint64_t{1} << 24) - 1;

// Energy factor 10^(-a d / 10) for an attenuation of a dB/m over d metres.
double air_energy_factor(double db_per_m, double distance) {
  return std::exp(-db_per_m * distance * (std::numbers::ln10 / 10.0));
}

struct WallHit {
  int wall = 0;
  double distance = 0.0;
  Vec3 point;
};

WallHit intersect_box(const Vec3& origin, const Vec3& dir, const Vec3& dims) {
  WallHit hit;
  hit.distance = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 0.0) {
      const double t = (dims[a] - origin[a]) / dir[a];
      if (t < hit.distance) hit = {2 * a + 1, t, {}};
    } else if (dir[a] < 0.0) {
      const double t = -origin[a] / dir[a];
      if (t < hit.distance) hit = {2 * a, t, {}};
    }
  }
  hit.distance = std::max(hit.distance, 0.0);
  hit.point = origin + hit.distance * dir;
  // Snap onto the wall and keep the point inside the box despite rounding.
  for (int a = 0; a < 3; ++a) hit.point[a] = std::clamp(hit.point[a], 0.0, dims[a]);
  const int axis = hit.wall / 2;
  hit.point[axis] = (hit.wall % 2 == 0) ? 0.0 : dims[axis];
  return hit;
}

// Orthonormal tangent pair for a unit normal (Duff et al. branchless basis).
void tangent_basis(const Vec3& n, Vec3& t1, Vec3& t2) {
  const double sign = std::copysign(1.0, n.z);
  const double a = -1.0 / (sign + n.z);
  const double b = n.x * n.y * a;
  t1 = {1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x};
  t2 = {b, sign + n.y * n.y * a, -n.y};
}

}  // namespace

Vec3 sample_direction_uniform(RandomStream& stream) {
  const double z = 1.0 - 2.0 * stream.uniform();
  const double phi = kTwoPi * stream.uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Vec3 sample_direction_lambert(const Vec3& normal, RandomStream& stream) {
  // 1 - u keeps cos(theta) in (0, 1] so the sample never lies in the plane.
  const double cos_t = std::sqrt(1.0 - stream.uniform());
  const double phi = kTwoPi * stream.uniform();
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  Vec3 t1, t2;
  tangent_basis(normal, t1, t2);
  return normalized((sin_t * std::cos(phi)) * t1 + (sin_t * std::sin(phi)) * t2 + cos_t * normal);
}

double detection_solid_angle(double distance, double radius) {
  if (distance <= radius) return kTwoPi;
  const double q = radius / distance;
  // 1 - sqrt(1 - q^2) written to avoid cancellation at large distances.
  return kTwoPi * (q * q) / (1.0 + std::sqrt(1.0 - q * q));
}

Arrival rain_contribution(const Vec3& hit, const Vec3& normal, const SurfaceSpec& surface,
                          const Ray& ray, const RainContext& ctx) {
  const Vec3 to_receiver = ctx.receiver - hit;
  const double d = norm(to_receiver);

  Arrival arr;
  arr.kind = ArrivalKind::diffuse;
  arr.time = ray.path_time + d / ctx.speed_of_sound;
  arr.distance = ray.path_time * ctx.speed_of_sound + d;
  arr.direction = d > 0.0 ? ctx.receiver_frame.to_local((-1.0 / d) * to_receiver) : Vec3{1, 0, 0};

  const double cos_t = d > 0.0 ? dot(normal, to_receiver) / d : 1.0;
  if (cos_t <= 0.0) return arr;
  const double kernel = cos_t / std::numbers::pi * detection_solid_angle(d, ctx.detection_radius);
  for (std::size_t b = 0; b < ctx.air_db_per_m.size(); ++b) {
    const double e = ray.energy[b] * (1.0 - surface.absorption[b]) * surface.scattering[b] * kernel *
                     air_energy_factor(ctx.air_db_per_m[b], d);
    arr.band[b] = static_cast<float>(e);
  }
  return arr;
}

DiffuseTracer::DiffuseTracer(const ValidatedSpec& vspec, std::size_t source_index,
                             std::size_t receiver_index)
    : spec_(vspec.spec()), source_(spec_.sources.at(source_index)) {
  const ReceiverSpec& rcv = spec_.receivers.at(receiver_index);
  air_ = air_absorption_db_per_m(spec_.options.band_centers, spec_.room.temperature,
                                 spec_.room.humidity, spec_.room.pressure);
  ctx_.receiver = rcv.position;
  ctx_.receiver_frame = Rotation(rcv.orientation);
  ctx_.air_db_per_m = air_;
  ctx_.speed_of_sound = speed_of_sound(spec_.room.temperature);
  ctx_.detection_radius = spec_.options.detection_radius;
  source_axis_ = Rotation(source_.orientation).forward();
  const std::size_t bands = spec_.options.band_count();
  for (int w = 0; w < kWallCount; ++w) {
    double sum = 0.0;
    for (std::size_t b = 0; b < bands; ++b) sum += spec_.room.surfaces[w].scattering[b];
    mean_scattering_[w] = sum / static_cast<double>(bands);
  }
  ray_count_ = spec_.options.diffuse_enabled ? spec_.options.n_rays : 0;
  energy_floor_ = ray_count_ > 0 ? spec_.options.energy_threshold / static_cast<double>(ray_count_)
                                 : 0.0;
}

Vec3 DiffuseTracer::launch_direction(RandomStream& stream) const {
  if (source_.directivity == Directivity::omnidirectional) return sample_direction_uniform(stream);
  // Rejection against the energy pattern g^2, whose maximum is 1 on axis.
  for (;;) {
    const Vec3 v = sample_direction_uniform(stream);
    const double g = directivity_gain(source_.directivity, dot(source_axis_, v));
    if (stream.uniform() < g * g) return v;
  }
}

void DiffuseTracer::trace(std::int64_t ray_index, std::vector<Arrival>& out) const {
  const std::size_t bands = spec_.options.band_count();
  const double duration = spec_.options.ir_duration;
  const double c = ctx_.speed_of_sound;
  const Vec3& dims = spec_.room.dimensions;

  RandomStream stream(spec_.options.seed, static_cast<std::uint64_t>(ray_index));
  Ray ray;
  ray.origin = source_.position;
  ray.direction = launch_direction(stream);
  for (std::size_t b = 0; b < bands; ++b) ray.energy[b] = 1.0 / static_cast<double>(ray_count_);

  const std::uint64_t id_base = kDiffuseIdBit | (static_cast<std::uint64_t>(ray_index) << 24);
  for (std::uint64_t bounce = 0; bounce <= kMaxBounceId; ++bounce) {
    const WallHit hit = intersect_box(ray.origin, ray.direction, dims);
    ray.path_time += hit.distance / c;
    if (ray.path_time > duration) break;
    for (std::size_t b = 0; b < bands; ++b) ray.energy[b] *= air_energy_factor(air_[b], hit.distance);

    const SurfaceSpec& surface = spec_.room.surfaces[hit.wall];
    const Vec3 normal = wall_normal(hit.wall);
    Arrival arr = rain_contribution(hit.point, normal, surface, ray, ctx_);
    arr.id = id_base | bounce;
    arr.sign = static_cast<std::int8_t>(stream.sign());
    if (arr.time <= duration) out.push_back(arr);

    double peak = 0.0;
    for (std::size_t b = 0; b < bands; ++b) {
      ray.energy[b] *= 1.0 - surface.absorption[b];
      peak = std::max(peak, ray.energy[b]);
    }
    if (peak < energy_floor_) break;

    ray.origin = hit.point;
    if (stream.uniform() < mean_scattering_[hit.wall]) {
      ray.direction = sample_direction_lambert(normal, stream);
    } else {
      const int axis = hit.wall / 2;
      ray.direction[axis] = -ray.direction[axis];
    }
  }
}

std::vector<Arrival> DiffuseTracer::trace_range(std::int64_t first, std::int64_t last) const {
  std::vector<Arrival> out;
  for (std::int64_t r = first; r < last; ++r) trace(r, out);
  std::sort(out.begin(), out.end(), arrival_before);
  return out;
}

std::vector<Arrival> trace_rays(const ValidatedSpec& spec, std::size_t source_index,
                                std::size_t receiver_index, const ExecutionOptions& exec) {
  const DiffuseTracer tracer(spec, source_index, receiver_index);
  const std::int64_t n = tracer.ray_count();
  if (n <= 0) return {};

  const auto chunks = static_cast<std::size_t>((n + kRaysPerChunk - 1) / kRaysPerChunk);
  std::vector<std::vector<Arrival>> parts(chunks);
  parallel_for(chunks, exec.workers, [&](std::size_t k) {
    const std::int64_t first = static_cast<std::int64_t>(k) * kRaysPerChunk;
    for (std::int64_t r = first; r < std::min(n, first + kRaysPerChunk); ++r) tracer.trace(r, parts[k]);
  });

  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<Arrival> out;
  out.reserve(total);
  for (auto& p : parts) {
    out.insert(out.end(), p.begin(), p.end());
    std::vector<Arrival>().swap(p);
  }
  // (time, id) is a total order on unique ids, so the result is independent
  // of how rays were split across workers.
  std::sort(out.begin(), out.end(), arrival_before);
  return out;
}

}  // namespace brirsim
