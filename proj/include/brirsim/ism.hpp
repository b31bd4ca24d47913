#pragma once

#include <array>
#include <span>
#include <vector>

#include "brirsim/arrival.hpp"
#include "brirsim/scene.hpp"

namespace brirsim {

/// Lattice address of a shoebox image: per axis a cell index (l, m, n) and a
/// mirror parity (u, v, w). Coordinate on an axis is (1 - 2u) p + 2 l L.
struct ImageIndex {
  std::array<int, 3> cell{0, 0, 0};
  std::array<int, 3> parity{0, 0, 0};

  friend constexpr bool operator==(const ImageIndex&, const ImageIndex&) = default;
};

struct ImageSource {
  ImageIndex index;
  Vec3 position;
  int order = 0;
};

/// Reflection counts per wall, ordered x0 x1 y0 y1 z0 z1.
using WallCounts = std::array<int, kWallCount>;

Vec3 image_position(const Vec3& source, const Vec3& room_dims, const ImageIndex& index);

/// Lower-wall count |l - u|, upper-wall count |l| on each axis.
WallCounts reflection_counts(const ImageIndex& index);

int reflection_order(const ImageIndex& index);

/// Every image up to opts.ism_max_order whose path to `receiver` fits in
/// opts.ir_duration, sorted by (order, l, m, n, u, v, w). Empty when the
/// image-source method is disabled.
std::vector<ImageSource> enumerate_images(const RoomSpec& room, const SourceSpec& source,
                                          const Vec3& receiver, const SimOptions& opts,
                                          double speed_of_sound);

/// Converts an image into a specular arrival (time, distance, receiver-frame
/// direction and per-band pressure gains). Throws ValidationError when the
/// image coincides with the receiver.
Arrival image_arrival(const ImageSource& image, const RoomSpec& room, const SourceSpec& source,
                      const ReceiverSpec& receiver, std::span<const double> air_db_per_m,
                      double speed_of_sound, std::uint64_t id);

/// All specular arrivals for one source/receiver pair, sorted by (time, id).
std::vector<Arrival> specular_arrivals(const ValidatedSpec& spec, std::size_t source_index,
                                       std::size_t receiver_index);

}  // namespace brirsim
