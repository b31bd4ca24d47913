#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "brirsim/geometry.hpp"
#include "brirsim/scene.hpp"

namespace brirsim {

enum class ArrivalKind : std::uint8_t { specular, diffuse };

using BandValues = std::array<float, kMaxBands>;

/// One acoustic path reaching the receiver.
///
/// For specular arrivals `band` holds signed pressure gains. The diffuse
/// tracer emits the same record with kind == diffuse, `band` holding
/// rained energies and `sign` the random polarity (see
/// diffuse_contribution_to_arrival for the conversion to pressure gains).
/// Kept compact: a reverberant render can carry tens of millions of them.
struct Arrival {
  double time = 0.0;      // s
  double distance = 0.0;  // m, total path length
  Vec3 direction;         // unit vector towards the incoming sound, receiver frame
  std::uint64_t id = 0;   // stable ordering key, unique within a render
  BandValues band{};
  ArrivalKind kind = ArrivalKind::specular;
  std::int8_t sign = 1;

  std::span<const float> bands(std::size_t count) const { return {band.data(), count}; }
};

/// Canonical ordering used everywhere arrivals are merged or rendered.
constexpr bool arrival_before(const Arrival& a, const Arrival& b) {
  return a.time < b.time || (a.time == b.time && a.id < b.id);
}

/// Specular ids occupy the low half of the key space, diffuse the high half.
inline constexpr std::uint64_t kDiffuseIdBit = std::uint64_t{1} << 63;

}  // namespace brirsim
