#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <set>

#include "brirsim/dataset.hpp"
#include "brirsim/error.hpp"
#include "support.hpp"

using namespace brirsim;
using nlohmann::json;

namespace {

json small_spec() {
  return json::parse(R"({
    "room": {"dimensions": [6, 5, 3], "absorption": 0.3, "scattering": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]},
    "options": {"duration": 0.06, "rays": 200, "ism_order": 3, "seed": 11},
    "receivers": {"positions": [[3, 2.5, 1.5]]},
    "sources": {"layout": "sphere", "radius": 1.0, "azimuth_step": 90, "elevation_step": 90},
    "output_dir": "out"
  })");
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& p) { return read_file(p); }

}  // namespace

TEST_CASE("sphere layout directions") {
  const auto dirs = sphere_directions(90, 90, -90, 90);
  // One point at each pole plus four on the equator.
  CHECK(dirs.size() == 6);
  CHECK(sphere_directions(10, 10, -90, 90).size() == 2 + 17 * 36);
  const auto ring = sphere_directions(30, 10, 0, 0);
  CHECK(ring.size() == 12);
  for (const auto& [az, el] : ring) CHECK(el == 0.0);
}

TEST_CASE("spec parsing resolves paths and rejects bad content") {
  testing::TempDir dir;
  save_hrtf(testing::random_hrtf(12, 16, 48000, 1), dir / "a.hrtf");
  json j = small_spec();
  j["hrtfs"] = json::array({"a.hrtf", {{"path", "a.hrtf"}, {"id", "second"}, {"interpolation", "interpolate"}}});
  const DatasetSpec spec = parse_dataset_spec(j.dump(), dir.path());
  REQUIRE(spec.hrtfs.size() == 2);
  CHECK(spec.hrtfs[0].path == dir / "a.hrtf");
  CHECK(spec.hrtfs[0].id == "a");
  CHECK(spec.hrtfs[1].interpolation == HrtfInterpolation::interpolate);
  CHECK(spec.output_dir == dir / "out");
  CHECK(spec.room.surfaces[2].scattering[3] == 0.4);

  auto message = [&](const json& bad) -> std::string {
    try {
      parse_dataset_spec(bad.dump(), dir.path());
    } catch (const Error& e) {
      return e.what();
    }
    return {};
  };
  json missing = small_spec();
  missing["hrtfs"] = {"nowhere.hrtf"};
  CHECK(message(missing).find("nowhere.hrtf") != std::string::npos);
  CHECK_THROWS_AS(parse_dataset_spec(missing.dump(), dir.path()), ValidationError);

  json unknown = small_spec();
  unknown["rooom"] = 1;
  CHECK(message(unknown).find("rooom") != std::string::npos);

  json wide = small_spec();
  wide["sources"]["radius"] = 2.0;  // receiver is 1.5 m from the floor
  CHECK(message(wide).find("radius") != std::string::npos);

  CHECK_THROWS_AS(parse_dataset_spec("{not json", dir.path()), FormatError);
}

TEST_CASE("omnidirectional dataset, manifest and resume") {
  testing::TempDir dir;
  const DatasetSpec spec = parse_dataset_spec(small_spec().dump(), dir.path());
  std::vector<std::size_t> progress;
  DatasetOptions opts;
  opts.progress = [&](std::size_t done, std::size_t) { progress.push_back(done); };
  const auto result = generate_dataset(spec, opts);
  CHECK(result.entries == 6);
  CHECK(result.rendered == 6);
  CHECK(progress.size() == 6);

  std::ifstream in(result.manifest);
  const json m = json::parse(in);
  CHECK(m["schema"] == kManifestSchema);
  REQUIRE(m["entries"].size() == 6);
  std::set<std::uint64_t> seeds;
  for (const auto& e : m["entries"]) {
    const auto ir = read_wave(dir / "out" / e["file"].get<std::string>());
    CHECK(ir.channel_count() == 1);
    CHECK(ir.length() == 2880);
    seeds.insert(e["seed"].get<std::uint64_t>());
    // Source sits on the sphere around the receiver, in the stated direction.
    const auto sp = e["source_position"];
    const Vec3 rel = Vec3{sp[0], sp[1], sp[2]} - Vec3{3, 2.5, 1.5};
    CHECK(norm(rel) == doctest::Approx(1.0));
    const Vec3 expect = direction_vector(e["source_direction"]["azimuth"], e["source_direction"]["elevation"]);
    CHECK(norm(rel - expect) < 1e-9);
  }
  CHECK(seeds.size() == 6);
  CHECK(m["hrtfs"][0]["id"] == "omnidirectional");

  const auto first = slurp(dir / "out" / "r0_s2_h0.wav");
  const auto manifest = slurp(result.manifest);

  // Resume regenerates only what is missing or damaged.
  std::filesystem::remove(dir / "out" / "r0_s2_h0.wav");
  {
    std::ofstream broken(dir / "out" / "r0_s3_h0.wav", std::ios::binary | std::ios::trunc);
    broken << "RIFF";
  }
  opts.resume = true;
  const auto again = generate_dataset(spec, opts);
  CHECK(again.rendered == 2);
  CHECK(again.skipped == 4);
  CHECK(slurp(dir / "out" / "r0_s2_h0.wav") == first);
  CHECK(slurp(again.manifest) == manifest);
}

TEST_CASE("binaural dataset is independent of the job count") {
  testing::TempDir dir;
  save_hrtf(testing::random_hrtf(12, 16, 48000, 2), dir / "a.hrtf");
  save_hrtf(testing::random_hrtf(8, 24, 44100, 3), dir / "b.hrtf");
  json j = small_spec();
  j["hrtfs"] = {"a.hrtf", "b.hrtf"};
  j["receivers"]["positions"] = {{3, 2.5, 1.5}, {2.5, 2, 1.4}};
  j["output_dir"] = "one";
  const DatasetSpec one = parse_dataset_spec(j.dump(), dir.path());
  j["output_dir"] = "four";
  const DatasetSpec four = parse_dataset_spec(j.dump(), dir.path());

  DatasetOptions o1, o4;
  o4.jobs = 4;
  const auto r1 = generate_dataset(one, o1);
  const auto r4 = generate_dataset(four, o4);
  CHECK(r1.entries == 2 * 6 * 2);
  CHECK(r4.entries == r1.entries);
  for (const auto& entry : std::filesystem::directory_iterator(dir / "one")) {
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;
    CHECK(slurp(entry.path()) == slurp(dir / "four" / name));
    CHECK(read_wave(entry.path()).channel_count() == 2);
  }
  std::ifstream in(r1.manifest);
  const json m = json::parse(in);
  CHECK(m["hrtfs"][1]["resampled"] == true);
  CHECK(m["hrtfs"][0]["resampled"] == false);
}

TEST_CASE("hrtf-grid layout uses each set's own directions") {
  testing::TempDir dir;
  save_hrtf(testing::random_hrtf(5, 16, 48000, 4), dir / "a.hrtf");
  save_hrtf(testing::random_hrtf(3, 16, 48000, 5), dir / "b.hrtf");
  json j = small_spec();
  j["hrtfs"] = {"a.hrtf", "b.hrtf"};
  j["sources"] = {{"layout", "hrtf-grid"}, {"radius", 0.8}};
  const auto result = generate_dataset(parse_dataset_spec(j.dump(), dir.path()));
  CHECK(result.entries == 5 + 3);
}

TEST_CASE("an override seed changes the renders") {
  testing::TempDir dir;
  json j = small_spec();
  j["sources"] = {{"layout", "explicit"}, {"positions", {{1, 1, 1}}}};
  const auto spec = parse_dataset_spec(j.dump(), dir.path());
  generate_dataset(spec);
  const auto a = slurp(dir / "out" / "r0_s0_h0.wav");
  DatasetOptions o;
  o.seed = 99;
  generate_dataset(spec, o);
  CHECK(slurp(dir / "out" / "r0_s0_h0.wav") != a);
}
