#include "brirsim/ism.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <tuple>

#include "brirsim/air_absorption.hpp"
#include "brirsim/error.hpp"

namespace brirsim {

Vec3 image_position(const Vec3& source, const Vec3& room_dims, const ImageIndex& index) {
  Vec3 p;
  for (int a = 0; a < 3; ++a) {
    p[a] = (1 - 2 * index.parity[a]) * source[a] + 2.0 * index.cell[a] * room_dims[a];
  }
  return p;
}

WallCounts reflection_counts(const ImageIndex& index) {
  WallCounts counts{};
  for (int a = 0; a < 3; ++a) {
    counts[2 * a] = std::abs(index.cell[a] - index.parity[a]);
    counts[2 * a + 1] = std::abs(index.cell[a]);
  }
  return counts;
}

int reflection_order(const ImageIndex& index) {
  int order = 0;
  for (int c : reflection_counts(index)) order += c;
  return order;
}

std::vector<ImageSource> enumerate_images(const RoomSpec& room, const SourceSpec& source,
                                          const Vec3& receiver, const SimOptions& opts,
                                          double speed_of_sound) {
  std::vector<ImageSource> images;
  if (!opts.ism_enabled) return images;

  const int max_order = opts.ism_max_order;
  const double max_distance = speed_of_sound * opts.ir_duration;
  std::array<int, 3> bound{};
  for (int a = 0; a < 3; ++a) {
    const int by_time =
        static_cast<int>(std::ceil(max_distance / (2.0 * room.dimensions[a]))) + 1;
    const int by_order = max_order / 2 + 1;
    bound[a] = std::min(by_time, by_order);
  }

  ImageIndex idx;
  for (int l = -bound[0]; l <= bound[0]; ++l) {
    for (int u = 0; u <= 1; ++u) {
      const int ox = std::abs(l - u) + std::abs(l);
      if (ox > max_order) continue;
      for (int m = -bound[1]; m <= bound[1]; ++m) {
        for (int v = 0; v <= 1; ++v) {
          const int oy = std::abs(m - v) + std::abs(m);
          if (ox + oy > max_order) continue;
          for (int n = -bound[2]; n <= bound[2]; ++n) {
            for (int w = 0; w <= 1; ++w) {
              const int oz = std::abs(n - w) + std::abs(n);
              const int order = ox + oy + oz;
              if (order > max_order) continue;
              idx.cell = {l, m, n};
              idx.parity = {u, v, w};
              const Vec3 pos = image_position(source.position, room.dimensions, idx);
              if (norm(pos - receiver) > max_distance) continue;
              images.push_back({idx, pos, order});
            }
          }
        }
      }
    }
  }
  std::sort(images.begin(), images.end(), [](const ImageSource& a, const ImageSource& b) {
    return std::tie(a.order, a.index.cell[0], a.index.cell[1], a.index.cell[2], a.index.parity[0],
                    a.index.parity[1], a.index.parity[2]) <
           std::tie(b.order, b.index.cell[0], b.index.cell[1], b.index.cell[2], b.index.parity[0],
                    b.index.parity[1], b.index.parity[2]);
  });
  return images;
}

Arrival image_arrival(const ImageSource& image, const RoomSpec& room, const SourceSpec& source,
                      const ReceiverSpec& receiver, std::span<const double> air_db_per_m,
                      double speed_of_sound, std::uint64_t id) {
  const Vec3 delta = image.position - receiver.position;
  const double d = norm(delta);
  if (d < 1e-6) throw ValidationError("coincident source and receiver");

  const WallCounts counts = reflection_counts(image.index);

  // Directivity is evaluated on the source axis mirrored once per reflection.
  Vec3 axis = Rotation(source.orientation).forward();
  for (int a = 0; a < 3; ++a) {
    if ((counts[2 * a] + counts[2 * a + 1]) % 2 != 0) axis[a] = -axis[a];
  }
  const Vec3 emission = (-1.0 / d) * delta;
  const double directivity = directivity_gain(source.directivity, dot(axis, emission));

  Arrival arr;
  arr.time = d / speed_of_sound;
  arr.distance = d;
  arr.direction = Rotation(receiver.orientation).to_local((1.0 / d) * delta);
  arr.id = id;
  arr.kind = ArrivalKind::specular;
  for (std::size_t b = 0; b < air_db_per_m.size(); ++b) {
    double g = directivity / d * std::pow(10.0, -air_db_per_m[b] * d / 20.0);
    for (int w = 0; w < kWallCount; ++w) {
      if (counts[w] == 0) continue;
      const double factor = std::sqrt(1.0 - room.surfaces[w].absorption[b]) *
                            std::sqrt(1.0 - room.surfaces[w].scattering[b]);
      g *= std::pow(factor, counts[w]);
    }
    arr.band[b] = static_cast<float>(g);
  }
  return arr;
}

std::vector<Arrival> specular_arrivals(const ValidatedSpec& vspec, std::size_t source_index,
                                       std::size_t receiver_index) {
  const SimulationSpec& spec = vspec.spec();
  const SourceSpec& src = spec.sources.at(source_index);
  const ReceiverSpec& rcv = spec.receivers.at(receiver_index);
  const double c = speed_of_sound(spec.room.temperature);
  const auto air = air_absorption_db_per_m(spec.options.band_centers, spec.room.temperature,
                                           spec.room.humidity, spec.room.pressure);

  const auto images = enumerate_images(spec.room, src, rcv.position, spec.options, c);
  std::vector<Arrival> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.push_back(image_arrival(images[i], spec.room, src, rcv, air, c, i));
  }
  std::sort(out.begin(), out.end(), arrival_before);
  return out;
}

}  // namespace brirsim
