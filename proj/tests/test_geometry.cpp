#include <doctest.h>

#include <random>

#include "brirsim/geometry.hpp"

using namespace brirsim;

namespace {
void check_close(const Vec3& a, const Vec3& b, double tol = 1e-12) {
  CHECK(std::abs(a.x - b.x) <= tol);
  CHECK(std::abs(a.y - b.y) <= tol);
  CHECK(std::abs(a.z - b.z) <= tol);
}
}  // namespace

TEST_CASE("identity orientation keeps the frame") {
  const Rotation r(Orientation{});
  check_close(r.forward(), {1, 0, 0});
  check_close(r.to_world({0, 1, 0}), {0, 1, 0});
}

TEST_CASE("yaw turns forward towards +y, pitch lifts it") {
  check_close(Rotation({90, 0, 0}).forward(), {0, 1, 0});
  check_close(Rotation({0, 90, 0}).forward(), {0, 0, 1});
  check_close(Rotation({180, 0, 0}).forward(), {-1, 0, 0});
  // Roll about the forward axis leaves it in place and turns +y towards +z.
  const Rotation roll({0, 0, 90});
  check_close(roll.forward(), {1, 0, 0});
  check_close(roll.to_world({0, 1, 0}), {0, 0, 1});
}

TEST_CASE("rotation is orthonormal and to_local inverts to_world") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> deg(-180.0, 180.0), unit(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Rotation r({deg(rng), deg(rng) / 2, deg(rng)});
    const Vec3 v{unit(rng), unit(rng), unit(rng)};
    check_close(r.to_local(r.to_world(v)), v, 1e-12);
    CHECK(norm(r.to_world(v)) == doctest::Approx(norm(v)).epsilon(1e-12));
  }
}

TEST_CASE("direction_vector follows the spherical convention") {
  check_close(direction_vector(0, 0), {1, 0, 0});
  check_close(direction_vector(90, 0), {0, 1, 0});
  check_close(direction_vector(270, 0), {0, -1, 0});
  check_close(direction_vector(123, 90), {0, 0, 1});
}

TEST_CASE("angle_between stays accurate for tiny angles") {
  const double a = 1e-9;
  CHECK(angle_between({1, 0, 0}, {std::cos(a), std::sin(a), 0}) == doctest::Approx(a).epsilon(1e-6));
  CHECK(angle_between({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(M_PI));
}
