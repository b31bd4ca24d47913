#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace brirsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
constexpr Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

/// Great-circle angle between two unit vectors, accurate near 0 and pi.
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Yaw/pitch/roll in degrees. Yaw turns counterclockwise seen from above
/// (+x towards +y), positive pitch raises the forward (+x) axis, roll turns
/// about the forward axis. Applied intrinsically in Z, Y', X'' order.
struct Orientation {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  friend constexpr bool operator==(const Orientation&, const Orientation&) = default;
};

/// Row-major 3x3 rotation taking local coordinates to room coordinates.
class Rotation {
 public:
  Rotation() = default;
  explicit Rotation(const Orientation& o) {
    const double cy = std::cos(deg2rad(o.yaw)), sy = std::sin(deg2rad(o.yaw));
    // Pitch rotates about +y by -pitch so that positive pitch lifts +x.
    const double cp = std::cos(deg2rad(o.pitch)), sp = std::sin(deg2rad(o.pitch));
    const double cr = std::cos(deg2rad(o.roll)), sr = std::sin(deg2rad(o.roll));
    // Rz(yaw) * Ry(-pitch) * Rx(roll)
    m_ = {cy * cp, -sy * cr - cy * sp * sr, sy * sr - cy * sp * cr,
          sy * cp, cy * cr - sy * sp * sr, -cy * sr - sy * sp * cr,
          sp,      cp * sr,                cp * cr};
  }

  Vec3 to_world(const Vec3& v) const {
    return {m_[0] * v.x + m_[1] * v.y + m_[2] * v.z, m_[3] * v.x + m_[4] * v.y + m_[5] * v.z,
            m_[6] * v.x + m_[7] * v.y + m_[8] * v.z};
  }

  Vec3 to_local(const Vec3& v) const {
    return {m_[0] * v.x + m_[3] * v.y + m_[6] * v.z, m_[1] * v.x + m_[4] * v.y + m_[7] * v.z,
            m_[2] * v.x + m_[5] * v.y + m_[8] * v.z};
  }

  Vec3 forward() const { return {m_[0], m_[3], m_[6]}; }

 private:
  std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

/// Unit vector for a SOFA-style spherical direction (degrees): azimuth
/// counterclockwise from +x, elevation up from the horizontal plane.
inline Vec3 direction_vector(double azimuth_deg, double elevation_deg) {
  const double az = deg2rad(azimuth_deg), el = deg2rad(elevation_deg);
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

}  // namespace brirsim
