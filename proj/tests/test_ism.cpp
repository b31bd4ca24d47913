#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "brirsim/air_absorption.hpp"
#include "brirsim/ism.hpp"
#include "support.hpp"

using namespace brirsim;

namespace {

// Images reachable by mirroring the source across wall planes at most
// `depth` times, keyed by rounded position; value is the fewest mirrors used.
std::map<std::tuple<long, long, long>, int> mirror_closure(const Vec3& src, const Vec3& dims, int depth) {
  auto key = [](const Vec3& p) {
    return std::make_tuple(std::lround(p.x * 1e6), std::lround(p.y * 1e6), std::lround(p.z * 1e6));
  };
  std::map<std::tuple<long, long, long>, int> seen{{key(src), 0}};
  std::vector<Vec3> frontier{src};
  for (int k = 1; k <= depth; ++k) {
    std::vector<Vec3> next;
    for (const Vec3& p : frontier) {
      for (int a = 0; a < 3; ++a) {
        for (double plane : {0.0, dims[a]}) {
          Vec3 q = p;
          q[a] = 2.0 * plane - p[a];
          if (seen.emplace(key(q), k).second) next.push_back(q);
        }
      }
    }
    frontier = std::move(next);
  }
  return seen;
}

SimOptions unlimited(int order) {
  SimOptions o;
  o.ism_max_order = order;
  o.ir_duration = 100.0;
  return o;
}

}  // namespace

TEST_CASE("image counts for the first orders") {
  RoomSpec room;
  room.dimensions = {4, 5, 3};
  const SourceSpec src{{1, 2, 1}, {}, Directivity::omnidirectional};
  const Vec3 rcv{3, 3, 2};
  const int expected[] = {1, 7, 25};
  for (int order = 0; order <= 2; ++order) {
    CHECK(enumerate_images(room, src, rcv, unlimited(order), 343.0).size() == expected[order]);
  }
}

TEST_CASE("lattice enumeration matches repeated mirroring") {
  RoomSpec room;
  room.dimensions = {3.7, 5.1, 2.9};
  const SourceSpec src{{1.1, 3.3, 0.7}, {}, Directivity::omnidirectional};
  for (int order = 0; order <= 5; ++order) {
    const auto images = enumerate_images(room, src, {2, 2, 2}, unlimited(order), 343.0);
    const auto oracle = mirror_closure(src.position, room.dimensions, order);
    REQUIRE(images.size() == oracle.size());
    for (const auto& im : images) {
      const auto k = std::make_tuple(std::lround(im.position.x * 1e6), std::lround(im.position.y * 1e6),
                                     std::lround(im.position.z * 1e6));
      REQUIRE(oracle.count(k) == 1);
      CHECK(oracle.at(k) == im.order);
      CHECK(reflection_order(im.index) == im.order);
    }
  }
}

TEST_CASE("wall counts equal the wall planes crossed by the unfolded path") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  std::uniform_int_distribution<int> cell(-6, 6), bit(0, 1);
  const Vec3 dims{3.0, 4.5, 2.5};
  for (int trial = 0; trial < 2000; ++trial) {
    ImageIndex idx;
    for (int a = 0; a < 3; ++a) {
      idx.cell[a] = cell(rng);
      idx.parity[a] = bit(rng);
    }
    const Vec3 src{frac(rng) * dims.x, frac(rng) * dims.y, frac(rng) * dims.z};
    const Vec3 rcv{frac(rng) * dims.x, frac(rng) * dims.y, frac(rng) * dims.z};
    const Vec3 img = image_position(src, dims, idx);
    const WallCounts counts = reflection_counts(idx);
    for (int a = 0; a < 3; ++a) {
      // Planes x = m L with m even are copies of the lower wall, m odd of the upper.
      const double lo = std::min(img[a], rcv[a]) / dims[a];
      const double hi = std::max(img[a], rcv[a]) / dims[a];
      int lower = 0, upper = 0;
      for (int m = static_cast<int>(std::ceil(lo)); m < hi; ++m) (m % 2 == 0 ? lower : upper)++;
      CHECK(counts[2 * a] == lower);
      CHECK(counts[2 * a + 1] == upper);
    }
  }
}

TEST_CASE("single reflection off the lower x wall counts once there") {
  ImageIndex idx;
  idx.cell = {0, 0, 0};
  idx.parity = {1, 0, 0};
  CHECK(reflection_counts(idx) == WallCounts{1, 0, 0, 0, 0, 0});
  idx.cell = {1, 0, 0};
  CHECK(reflection_counts(idx) == WallCounts{0, 1, 0, 0, 0, 0});
  idx.parity = {0, 0, 0};
  CHECK(reflection_counts(idx) == WallCounts{1, 1, 0, 0, 0, 0});
}

TEST_CASE("duration limits images by path length") {
  RoomSpec room;
  room.dimensions = {4, 4, 4};
  const SourceSpec src{{1, 1, 1}, {}, Directivity::omnidirectional};
  SimOptions o = unlimited(8);
  o.ir_duration = 0.05;
  const double c = 343.0;
  for (const auto& im : enumerate_images(room, src, {3, 3, 3}, o, c)) {
    CHECK(norm(im.position - Vec3{3, 3, 3}) <= c * o.ir_duration);
  }
  auto all = enumerate_images(room, src, {3, 3, 3}, unlimited(8), c);
  const auto kept = std::count_if(all.begin(), all.end(), [&](const ImageSource& im) {
    return norm(im.position - Vec3{3, 3, 3}) <= c * o.ir_duration;
  });
  CHECK(enumerate_images(room, src, {3, 3, 3}, o, c).size() == static_cast<std::size_t>(kept));
}

TEST_CASE("arrival gains follow distance, walls and air") {
  auto spec = testing::shoebox({6, 5, 4}, 0.36, 0.19, {2, 2, 1}, {4, 3, 1.5});
  spec.options.diffuse_enabled = false;
  spec.options.ism_max_order = 1;
  const auto v = validate(spec);
  const auto arrivals = specular_arrivals(v, 0, 0);
  REQUIRE(arrivals.size() == 7);
  const double c = speed_of_sound(spec.room.temperature);
  const auto air = air_absorption_db_per_m(spec.options.band_centers, spec.room.temperature,
                                           spec.room.humidity, spec.room.pressure);

  const Arrival& direct = arrivals.front();
  const double d0 = norm(Vec3{2, 1, 0.5});
  CHECK(direct.time == doctest::Approx(d0 / c).epsilon(1e-12));
  for (std::size_t b = 0; b < 6; ++b) {
    CHECK(direct.band[b] == doctest::Approx(std::pow(10.0, -air[b] * d0 / 20.0) / d0).epsilon(1e-6));
  }
  // Floor image at z = -1.
  const double d1 = norm(Vec3{2, 1, 2.5});
  const auto floor = std::find_if(arrivals.begin(), arrivals.end(),
                                  [&](const Arrival& a) { return std::abs(a.distance - d1) < 1e-9; });
  REQUIRE(floor != arrivals.end());
  for (std::size_t b = 0; b < 6; ++b) {
    const double expect = 0.8 * 0.9 * std::pow(10.0, -air[b] * d1 / 20.0) / d1;
    CHECK(floor->band[b] == doctest::Approx(expect).epsilon(1e-6));
  }
  CHECK(floor->direction.z < 0.0);
  CHECK(std::is_sorted(arrivals.begin(), arrivals.end(), arrival_before));
}

TEST_CASE("mirroring the scene and swapping opposite walls preserves the response") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(0.05, 0.6), frac(0.1, 0.9);
  for (int trial = 0; trial < 10; ++trial) {
    auto spec = testing::shoebox({5, 4, 3}, 0.2, 0.1, {frac(rng) * 5, frac(rng) * 4, frac(rng) * 3},
                                 {frac(rng) * 5, frac(rng) * 4, frac(rng) * 3});
    if (norm(spec.sources[0].position - spec.receivers[0].position) < 0.6) continue;
    for (auto& s : spec.room.surfaces) {
      for (auto& a : s.absorption) a = coef(rng);
    }
    spec.options.diffuse_enabled = false;
    spec.options.ism_max_order = 6;
    spec.options.ir_duration = 0.2;
    auto mirrored = spec;
    mirrored.sources[0].position.x = 5 - spec.sources[0].position.x;
    mirrored.receivers[0].position.x = 5 - spec.receivers[0].position.x;
    std::swap(mirrored.room.surfaces[0], mirrored.room.surfaces[1]);

    auto key = [](const std::vector<Arrival>& arr) {
      std::vector<std::pair<double, double>> k;
      for (const auto& a : arr) k.emplace_back(a.distance, a.band[2]);
      std::sort(k.begin(), k.end());
      return k;
    };
    const auto a = key(specular_arrivals(validate(spec), 0, 0));
    const auto b = key(specular_arrivals(validate(mirrored), 0, 0));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].first == doctest::Approx(b[i].first).epsilon(1e-12));
      CHECK(a[i].second == doctest::Approx(b[i].second).epsilon(1e-5));
    }
  }
}

TEST_CASE("directivity follows the mirrored source axis") {
  auto spec = testing::shoebox({6, 5, 4}, 0.0, 0.0, {2, 2.5, 2}, {3.5, 2.5, 2});
  spec.sources[0].directivity = Directivity::cardioid;
  spec.options.diffuse_enabled = false;
  spec.options.ism_max_order = 1;
  const auto arrivals = specular_arrivals(validate(spec), 0, 0);
  auto at = [&](double d) {
    const auto it = std::find_if(arrivals.begin(), arrivals.end(),
                                 [&](const Arrival& a) { return std::abs(a.distance - d) < 1e-9; });
    REQUIRE(it != arrivals.end());
    return *it;
  };
  // The source faces +x. Its reflection off x = 6 leaves on axis; the one off
  // x = 0 leaves from the rear, where a cardioid has its null.
  const Arrival direct = at(1.5), upper = at(6.5), lower = at(5.5);
  CHECK(direct.band[0] * 1.5 == doctest::Approx(upper.band[0] * 6.5).epsilon(1e-3));
  CHECK(std::abs(lower.band[0]) < 1e-9);
}

TEST_CASE("disabled image sources produce no arrivals") {
  auto spec = testing::shoebox({4, 4, 4}, 0.3, 0.1, {1, 1, 1}, {3, 3, 3});
  spec.options.ism_enabled = false;
  CHECK(specular_arrivals(validate(spec), 0, 0).empty());
}
