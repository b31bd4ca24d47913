#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "brirsim/error.hpp"
#include "brirsim/wave.hpp"
#include "support.hpp"

using namespace brirsim;

namespace {
ImpulseResponse noise(std::size_t channels, std::size_t frames, double scale, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  ImpulseResponse ir;
  ir.channels.assign(channels, std::vector<double>(frames));
  for (auto& ch : ir.channels) {
    for (double& v : ch) v = u(rng);
  }
  return ir;
}
}  // namespace

TEST_CASE("float WAVE layout and round trip") {
  const auto ir = noise(2, 480, 3.0, 1);
  const auto bytes = encode_wave(ir, SampleFormat::float32);
  CHECK(bytes.size() == 44 + 480 * 2 * 4);
  CHECK(std::memcmp(bytes.data(), "RIFF", 4) == 0);
  CHECK(bytes[20] == 3);  // IEEE float
  CHECK(bytes[22] == 2);
  const auto back = decode_wave(bytes);
  CHECK(back.fs == 48000);
  REQUIRE(back.channel_count() == 2);
  for (int c = 0; c < 2; ++c) {
    for (std::size_t n = 0; n < 480; ++n) CHECK(back.channels[c][n] == static_cast<float>(ir.channels[c][n]));
  }
  // Float data survives a second pass bit for bit.
  CHECK(encode_wave(back, SampleFormat::float32) == bytes);
}

TEST_CASE("int16 WAVE scaling and clipping") {
  ImpulseResponse ir;
  ir.channels = {{1.0, -1.0, 0.5, 0.0}};
  const auto bytes = encode_wave(ir, SampleFormat::int16);
  CHECK(bytes.size() == 44 + 4 * 2);
  CHECK(bytes[20] == 1);
  const auto sample = [&](int i) { return static_cast<std::int16_t>(bytes[44 + 2 * i] | (bytes[45 + 2 * i] << 8)); };
  CHECK(sample(0) == 32767);
  CHECK(sample(1) == -32767);
  CHECK(sample(2) == 16384);
  const auto back = decode_wave(bytes);
  CHECK(back.channels[0][0] == 32767.0 / 32768.0);
  CHECK(back.channels[0][2] == 0.5);

  ir.channels[0][1] = -1.0001;
  CHECK_THROWS_AS(encode_wave(ir, SampleFormat::int16), ValidationError);
}

TEST_CASE("decoder skips unknown chunks and rejects foreign formats") {
  const auto ir = noise(1, 10, 0.5, 2);
  auto bytes = encode_wave(ir, SampleFormat::float32);
  // Insert an odd-sized LIST chunk (with pad byte) between fmt and data.
  const std::vector<std::uint8_t> list{'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
  bytes.insert(bytes.begin() + 36, list.begin(), list.end());
  CHECK(decode_wave(bytes).channels[0][3] == static_cast<float>(ir.channels[0][3]));

  auto alaw = encode_wave(ir, SampleFormat::float32);
  alaw[20] = 6;
  try {
    decode_wave(alaw);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("unknown format tag 6") != std::string::npos);
  }
  CHECK_THROWS_AS(decode_wave(std::vector<std::uint8_t>(20, 0)), FormatError);
  auto truncated = encode_wave(ir, SampleFormat::float32);
  truncated.resize(truncated.size() - 3);
  CHECK_THROWS_AS(decode_wave(truncated), FormatError);
}

TEST_CASE("files are written atomically and raw doubles are interleaved") {
  testing::TempDir dir;
  const auto ir = noise(2, 100, 1.0, 3);
  write_wave(ir, dir / "x.wav");
  CHECK_FALSE(std::filesystem::exists(dir / "x.wav.part"));
  CHECK(read_wave(dir / "x.wav").length() == 100);

  write_f64raw(ir, dir / "x.f64");
  const auto raw = read_file(dir / "x.f64");
  REQUIRE(raw.size() == 100 * 2 * 8);
  double v;
  std::memcpy(&v, raw.data() + 8 * 3, 8);  // frame 1, right channel
  CHECK(v == ir.channels[1][1]);

  CHECK_THROWS_AS(write_wave(ir, dir / "no" / "such" / "dir.wav"), IoError);
  CHECK_THROWS_AS(read_wave(dir / "missing.wav"), IoError);
  ImpulseResponse odd = ir;
  odd.fs = 44100.5;
  CHECK_THROWS_AS(encode_wave(odd, SampleFormat::float32), ValidationError);
}
