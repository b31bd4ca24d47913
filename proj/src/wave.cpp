#include "brirsim/wave.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "brirsim/error.hpp"

namespace brirsim {

static_assert(std::endian::native == std::endian::little, "WAVE I/O assumes a little-endian host");

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

std::vector<std::uint8_t> encode_wave(const ImpulseResponse& ir, SampleFormat format) {
  const std::size_t channels = ir.channel_count();
  const std::size_t frames = ir.length();
  if (channels == 0 || channels > 0xFFFF) throw ValidationError("WAVE output needs 1..65535 channels");
  for (const auto& ch : ir.channels) {
    if (ch.size() != frames) throw ValidationError("channels differ in length");
  }
  const double rate = std::round(ir.fs);
  if (rate <= 0.0 || rate > 4294967295.0 || rate != ir.fs) {
    throw ValidationError("WAVE sample rate must be a positive integer");
  }

  const std::uint16_t bits = format == SampleFormat::float32 ? 32 : 16;
  const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint64_t data_bytes = static_cast<std::uint64_t>(frames) * block;
  if (data_bytes > 0xFFFFFFFFull - 36) throw ValidationError("WAVE data exceeds 4 GiB");

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, static_cast<std::uint32_t>(36 + data_bytes));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format == SampleFormat::float32 ? 3 : 1);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(rate));
  put_u32(out, static_cast<std::uint32_t>(rate) * block);
  put_u16(out, block);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, static_cast<std::uint32_t>(data_bytes));

  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double x = ir.channels[c][n];
      if (!std::isfinite(x)) throw ValidationError("non-finite sample in impulse response");
      if (format == SampleFormat::float32) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
      } else {
        if (std::abs(x) > 1.0) {
          throw ValidationError("sample exceeds full scale for int16 output; normalize first");
        }
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(x * 32767.0))));
      }
    }
  }
  return out;
}

ImpulseResponse decode_wave(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || !tag_is(b, 0, "RIFF") || !tag_is(b, 8, "WAVE")) {
    throw FormatError("not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    const std::uint32_t size = get_u32(b, at + 4);
    const std::size_t body = at + 8;
    if (size > b.size() - body) throw FormatError("chunk extends past end of file");
    if (tag_is(b, at, "fmt ")) {
      if (size < 16) throw FormatError("fmt chunk too short");
      format = get_u16(b, body);
      channels = get_u16(b, body + 2);
      rate = get_u32(b, body + 4);
      bits = get_u16(b, body + 14);
      have_fmt = true;
      if (format != 1 && format != 3) throw FormatError("unknown format tag " + std::to_string(format));
      if ((format == 1 && bits != 16) || (format == 3 && bits != 32)) {
        throw FormatError("unsupported bit depth " + std::to_string(bits));
      }
      if (channels == 0 || rate == 0) throw FormatError("fmt chunk has zero channels or rate");
    } else if (tag_is(b, at, "data")) {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk");
      const std::size_t width = bits / 8;
      const std::size_t frame = width * channels;
      if (size % frame != 0) throw FormatError("data chunk is not a whole number of frames");
      const std::size_t frames = size / frame;
      ImpulseResponse ir;
      ir.fs = rate;
      ir.channels.assign(channels, std::vector<double>(frames));
      for (std::size_t n = 0; n < frames; ++n) {
        for (std::size_t c = 0; c < channels; ++c) {
          const std::size_t p = body + n * frame + c * width;
          if (format == 3) {
            ir.channels[c][n] = std::bit_cast<float>(get_u32(b, p));
          } else {
            ir.channels[c][n] = static_cast<std::int16_t>(get_u16(b, p)) / 32768.0;
          }
        }
      }
      return ir;
    }
    at = body + size + (size & 1u);
  }
  throw FormatError(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot write " + path.string() + ": " + ec.message());
}

void write_wave(const ImpulseResponse& ir, const std::filesystem::path& path, SampleFormat format) {
  write_file_atomic(path, encode_wave(ir, format));
}

ImpulseResponse read_wave(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_wave(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_f64raw(const ImpulseResponse& ir, const std::filesystem::path& path) {
  std::vector<std::uint8_t> out;
  out.reserve(ir.length() * ir.channel_count() * 8);
  for (std::size_t n = 0; n < ir.length(); ++n) {
    for (const auto& ch : ir.channels) {
      const auto v = std::bit_cast<std::uint64_t>(ch[n]);
      for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  write_file_atomic(path, out);
}

}  // namespace brirsim
