#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli.hpp"
#include "brirsim/wave.hpp"
#include "support.hpp"

using namespace brirsim;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "brirsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

const char* kSetup = R"(room.dimension = [6 5 3]
room.surface.absorption = [0.3 0.3 0.3 0.3 0.3 0.3]
options.duration = 0.08
options.rays = 300
options.ismorder = 4
source(1).location = [1.5 1.5 1.5]
receiver(1).location = [4 3 1.6]
receiver(2).location = [3 4 1.2]
receiver(2).description = 'SOFA sets/ears.hrtf interpolate normalize'
output.path = 'renders'
)";

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"simulate"}).code == 1);
  const Run r = cli({"simulate", "/definitely/not/here.m"});
  CHECK(r.code == 1);
  CHECK(r.err.find("setup file not found") != std::string::npos);
  CHECK(r.err.rfind("error: ", 0) == 0);
}

TEST_CASE("version and help") {
  const Run v = cli({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.rfind("brirsim ", 0) == 0);
  const Run h = cli({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("simulate") != std::string::npos);
}

TEST_CASE("simulate writes one file per source and receiver pair") {
  testing::TempDir dir;
  std::filesystem::create_directories(dir / "sets");
  save_hrtf(testing::random_hrtf(20, 32, 48000, 1), dir / "sets" / "ears.hrtf");
  write_text(dir / "room.m", kSetup);
  const Run r = cli({"simulate", (dir / "room.m").string()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto omni = read_wave(dir / "renders" / "s1_r1.wav");
  const auto bin = read_wave(dir / "renders" / "s1_r2.wav");
  CHECK(omni.channel_count() == 1);
  CHECK(bin.channel_count() == 2);
  CHECK(omni.length() == 3840);
  CHECK(r.out.find("source 1 receiver 2") != std::string::npos);

  // Same output with more workers; a different seed changes it.
  const auto first = read_file(dir / "renders" / "s1_r2.wav");
  REQUIRE(cli({"simulate", (dir / "room.m").string(), "--jobs", "3"}).code == 0);
  CHECK(read_file(dir / "renders" / "s1_r2.wav") == first);
  REQUIRE(cli({"--seed", "5", "simulate", (dir / "room.m").string()}).code == 0);
  CHECK(read_file(dir / "renders" / "s1_r2.wav") != first);
}

TEST_CASE("raw output format") {
  testing::TempDir dir;
  write_text(dir / "room.m", "room.dimension = [4 4 3]\noptions.duration = 0.01\noptions.diffuse = off\n"
                             "source(1).location = [1 1 1]\nreceiver(1).location = [3 3 2]\n"
                             "output.format = f64raw\n");
  REQUIRE(cli({"simulate", (dir / "room.m").string()}).code == 0);
  CHECK(std::filesystem::file_size(dir / "s1_r1.f64") == 480 * 8);
}

TEST_CASE("invalid input exits with 2 and one error line") {
  testing::TempDir dir;
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"room.dimension = [4 4 3]\nroom.surface.absorption = [2 2 2 2 2 2]\n"
       "source(1).location = [1 1 1]\nreceiver(1).location = [3 3 2]\n",
       "absorption"},
      {"room.dimension = [4 4 3]\nroom.size = 3\n", "room.size"},
      {"room.dimension = [4 4 3]\nsource(1).location = [1 1 1]\nreceiver(1).location = [5 3 2]\n",
       "receiver outside room"},
      {"room.dimension = [4 4 3]\nsource(1).location = [1 1 1]\nreceiver(1).location = [3 3 2]\n"
       "receiver(1).description = 'SOFA missing.hrtf nearest raw'\n",
       "missing.hrtf"},
  };
  for (const auto& [text, needle] : cases) {
    write_text(dir / "bad.m", text);
    const Run r = cli({"simulate", (dir / "bad.m").string()});
    INFO(text);
    INFO(r.err);
    CHECK(r.err.find(needle) != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    CHECK(r.code == 2);
  }
}

TEST_CASE("corrupt HRTF container exits with 2") {
  testing::TempDir dir;
  write_text(dir / "bad.hrtf", "HRTFSET1garbage");
  write_text(dir / "room.m", "room.dimension = [4 4 3]\nsource(1).location = [1 1 1]\n"
                             "receiver(1).location = [3 3 2]\n"
                             "receiver(1).description = 'SOFA bad.hrtf nearest raw'\n");
  const Run r = cli({"simulate", (dir / "room.m").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.hrtf") != std::string::npos);
  CHECK(cli({"hrtf-info", (dir / "bad.hrtf").string()}).code == 2);
}

TEST_CASE("unwritable output exits with 3") {
  testing::TempDir dir;
  write_text(dir / "blocker", "");
  write_text(dir / "room.m", "room.dimension = [4 4 3]\noptions.duration = 0.01\n"
                             "source(1).location = [1 1 1]\nreceiver(1).location = [3 3 2]\n"
                             "output.path = 'blocker/sub'\n");
  CHECK(cli({"simulate", (dir / "room.m").string()}).code == 3);
}

TEST_CASE("rt60 and hrtf-info report key/value lines") {
  testing::TempDir dir;
  write_text(dir / "room.m", "room.dimension = [5 4 3]\nroom.surface.absorption = [0.2 0.2 0.2 0.2 0.2 0.2]\n"
                             "options.duration = 0.8\noptions.rays = 3000\n"
                             "source(1).location = [1 1 1.2]\nreceiver(1).location = [3.5 2.5 1.6]\n");
  REQUIRE(cli({"simulate", (dir / "room.m").string()}).code == 0);
  const Run r = cli({"rt60", (dir / "s1_r1.wav").string()});
  INFO(r.err);
  CHECK(r.code == 0);
  CHECK(r.out.find("\nrt60 ") != std::string::npos);

  ImpulseResponse click;
  click.channels = {std::vector<double>(1000, 0.0)};
  click.channels[0][5] = 0.5;
  write_wave(click, dir / "click.wav");
  const Run bad = cli({"rt60", (dir / "click.wav").string()});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("insufficient dynamic range") != std::string::npos);

  save_hrtf(testing::random_hrtf(7, 12, 44100, 2), dir / "x.hrtf");
  const Run info = cli({"hrtf-info", (dir / "x.hrtf").string()});
  CHECK(info.code == 0);
  CHECK(info.out.find("directions 7\n") != std::string::npos);
  CHECK(info.out.find("fs 44100\n") != std::string::npos);
}

TEST_CASE("dataset subcommand") {
  testing::TempDir dir;
  save_hrtf(testing::random_hrtf(6, 16, 48000, 3), dir / "h.hrtf");
  write_text(dir / "spec.json", R"({
    "room": {"dimensions": [5, 4, 3], "absorption": 0.4},
    "options": {"duration": 0.04, "rays": 100, "ism_order": 2},
    "receivers": {"positions": [[2.5, 2, 1.5]]},
    "hrtfs": ["h.hrtf"],
    "sources": {"layout": "sphere", "radius": 0.9, "azimuth_step": 120, "elevation_step": 90,
                "elevation_min": 0, "elevation_max": 0}
  })");
  const Run r = cli({"dataset", (dir / "spec.json").string(), "--jobs", "2"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("entries 3\n") != std::string::npos);
  CHECK(r.out.find("progress 3/3\n") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "dataset" / "manifest.json"));
  const Run again = cli({"dataset", (dir / "spec.json").string(), "--resume"});
  CHECK(again.out.find("skipped 3\n") != std::string::npos);

  write_text(dir / "bad.json", R"({"room": {"dimensions": [5, 4, 3]}, "receivers": {"positions": [[2, 2, 1]]},
                                  "hrtfs": ["gone/missing.hrtf"]})");
  const Run bad = cli({"dataset", (dir / "bad.json").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("missing.hrtf") != std::string::npos);
  CHECK(cli({"dataset", (dir / "nope.json").string()}).code == 1);
}
