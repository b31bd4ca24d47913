#include "brirsim/hrtf.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "brirsim/error.hpp"

namespace brirsim {

static_assert(std::endian::native == std::endian::little,
              "HRTF container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'H', 'R', 'T', 'F', 'S', 'E', 'T', '1'};
constexpr double kTieTolerance = 1e-12;    // rad
constexpr double kExactTolerance = 1e-6;   // rad
constexpr double kDuplicateDeg = 1e-6;     // deg
constexpr std::size_t kCandidateCount = 16;

double wrap_azimuth(double az) {
  double w = std::fmod(az, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w -= 360.0;
  return w;
}

std::uint32_t crc_of(std::span<const float> data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* bytes = reinterpret_cast<const Bytef*>(data.data());
  std::size_t left = data.size_bytes();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = crc32(crc, bytes, chunk);
    bytes += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

// Measurements ordered by (angle, index), where angles closer than the tie
// tolerance count as equal.
struct Ranked {
  std::size_t index;
  double angle;
};

bool ranked_before(const Ranked& a, const Ranked& b) {
  if (std::abs(a.angle - b.angle) <= kTieTolerance) return a.index < b.index;
  return a.angle < b.angle;
}

std::vector<Ranked> rank_all(const HrtfSet& set, const Vec3& q) {
  const auto& u = set.unit_vectors();
  std::vector<Ranked> r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = {i, angle_between(u[i], q)};
  std::sort(r.begin(), r.end(), ranked_before);
  return r;
}

// The closest `count` measurements, preselected by dot product.
std::vector<Ranked> rank_nearest(const HrtfSet& set, const Vec3& q, std::size_t count) {
  const auto& u = set.unit_vectors();
  if (u.size() <= count) return rank_all(set, q);
  std::vector<std::pair<double, std::size_t>> by_dot(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) by_dot[i] = {-dot(u[i], q), i};
  // Keep a margin so near-ties at the cut survive the exact re-ranking.
  std::nth_element(by_dot.begin(), by_dot.begin() + static_cast<std::ptrdiff_t>(count),
                   by_dot.end());
  const double cut = by_dot[count].first + 1e-9;
  std::vector<Ranked> r;
  for (const auto& [neg, i] : by_dot) {
    if (neg <= cut) r.push_back({i, angle_between(u[i], q)});
  }
  std::sort(r.begin(), r.end(), ranked_before);
  return r;
}

bool spans_plane(const Vec3& a, const Vec3& b, const Vec3& c) {
  return std::abs(dot(a, cross(b, c))) > 1e-10;
}

HrirBlend single(std::size_t index) {
  HrirBlend blend;
  blend.index[0] = index;
  blend.weight[0] = 1.0;
  blend.count = 1;
  return blend;
}

std::int64_t integral_rate(double fs) {
  const double r = std::round(fs);
  if (!(fs > 0.0) || std::abs(fs - r) > 1e-9 || r > 1e9) {
    throw ValidationError("sampling rate must be a positive integer, got " + std::to_string(fs));
  }
  return static_cast<std::int64_t>(r);
}

}  // namespace

Direction::Direction(double az, double el) : azimuth(wrap_azimuth(az)), elevation(el) {}

Direction Direction::from_vector(const Vec3& v) {
  const Vec3 n = normalized(v);
  return {rad2deg(std::atan2(n.y, n.x)), rad2deg(std::asin(std::clamp(n.z, -1.0, 1.0)))};
}

HrtfSet::HrtfSet(double fs, std::size_t ir_length, std::vector<HrtfPosition> positions,
                 std::vector<float> data, std::string metadata_json)
    : fs_(fs),
      ir_length_(ir_length),
      positions_(std::move(positions)),
      data_(std::move(data)),
      metadata_(std::move(metadata_json)) {
  if (!(std::isfinite(fs_) && fs_ > 0.0)) throw ValidationError("HRTF sampling rate must be positive");
  if (positions_.empty()) throw ValidationError("HRTF set has no directions");
  if (ir_length_ == 0) throw ValidationError("HRTF ir_length must be at least 1");
  if (data_.size() != positions_.size() * 2 * ir_length_) {
    throw ValidationError("HRTF data size does not match M*2*N");
  }
  unit_.reserve(positions_.size());
  for (const auto& p : positions_) {
    if (!std::isfinite(p.azimuth) || !std::isfinite(p.elevation) || !std::isfinite(p.radius)) {
      throw ValidationError("HRTF position is not finite");
    }
    if (p.elevation < -90.0 || p.elevation > 90.0) {
      throw ValidationError("HRTF elevation out of [-90, 90]: " + std::to_string(p.elevation));
    }
    unit_.push_back(direction_vector(p.azimuth, p.elevation));
  }
  const double min_sep = deg2rad(kDuplicateDeg);
  for (std::size_t i = 0; i < unit_.size(); ++i) {
    for (std::size_t j = i + 1; j < unit_.size(); ++j) {
      if (angle_between(unit_[i], unit_[j]) < min_sep) {
        throw ValidationError("duplicate HRTF directions " + std::to_string(i) + " and " +
                              std::to_string(j));
      }
    }
  }
  for (float v : data_) {
    if (!std::isfinite(v)) throw ValidationError("HRTF data contains non-finite samples");
  }
  const auto meta = nlohmann::json::parse(metadata_, nullptr, false);
  if (meta.is_discarded() || !meta.is_object()) {
    throw ValidationError("HRTF metadata must be a JSON object");
  }
}

std::vector<std::uint8_t> encode_hrtf(const HrtfSet& set) {
  nlohmann::ordered_json header;
  header["fs"] = set.fs();
  header["num_directions"] = set.size();
  header["ir_length"] = set.ir_length();
  header["channels"] = 2;
  auto positions = nlohmann::ordered_json::array();
  for (const auto& p : set.positions()) positions.push_back({p.azimuth, p.elevation, p.radius});
  header["positions"] = std::move(positions);
  const auto metadata = nlohmann::ordered_json::parse(set.metadata());
  for (const auto& [key, value] : metadata.items()) {
    if (!header.contains(key)) header[key] = value;
  }
  const std::string text = header.dump();

  const auto data = set.data();
  const auto h = static_cast<std::uint32_t>(text.size());
  const std::uint32_t crc = crc_of(data);
  std::vector<std::uint8_t> out(12 + text.size() + data.size_bytes() + 4);
  std::uint8_t* p = out.data();
  std::memcpy(p, kMagic, 8);
  for (int i = 0; i < 4; ++i) p[8 + i] = static_cast<std::uint8_t>(h >> (8 * i));
  p += 12;
  std::memcpy(p, text.data(), text.size());
  p += text.size();
  std::memcpy(p, data.data(), data.size_bytes());
  p += data.size_bytes();
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(crc >> (8 * i));
  return out;
}

HrtfSet decode_hrtf(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw FormatError("bad magic: not an HRTFSET1 container");
  }
  std::uint32_t h = 0;
  for (int i = 0; i < 4; ++i) h |= static_cast<std::uint32_t>(bytes[8 + i]) << (8 * i);
  if (bytes.size() - 12 < h) throw FormatError("header length exceeds file size");

  const std::string_view text(reinterpret_cast<const char*>(bytes.data() + 12), h);
  const auto header = nlohmann::json::parse(text, nullptr, false);
  if (header.is_discarded() || !header.is_object()) throw FormatError("malformed JSON header");

  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!header.contains(key)) throw FormatError(std::string("header missing key \"") + key + "\"");
    return header[key];
  };
  const auto& fs_j = require("fs");
  const auto& m_j = require("num_directions");
  const auto& n_j = require("ir_length");
  const auto& ch_j = require("channels");
  const auto& pos_j = require("positions");
  if (!fs_j.is_number()) throw FormatError("header key \"fs\" must be a number");
  if (!m_j.is_number_unsigned()) throw FormatError("header key \"num_directions\" must be a non-negative integer");
  if (!n_j.is_number_unsigned()) throw FormatError("header key \"ir_length\" must be a non-negative integer");
  if (!ch_j.is_number_integer() || ch_j.get<int>() != 2) throw FormatError("header key \"channels\" must be 2");
  if (!pos_j.is_array()) throw FormatError("header key \"positions\" must be an array");

  const auto m = m_j.get<std::uint64_t>();
  const auto n = n_j.get<std::uint64_t>();
  if (pos_j.size() != m) throw FormatError("positions count does not match num_directions");
  std::vector<HrtfPosition> positions;
  positions.reserve(m);
  for (const auto& p : pos_j) {
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
        !p[2].is_number()) {
      throw FormatError("each position must be [azimuth, elevation, radius]");
    }
    positions.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }

  const std::size_t offset = 12 + h;
  const std::size_t available = bytes.size() - offset;
  if (n != 0 && m > std::numeric_limits<std::size_t>::max() / 8 / n) {
    throw FormatError("data block shorter than M·2·N");
  }
  const std::size_t count = static_cast<std::size_t>(m * 2 * n);
  const std::size_t data_bytes = count * sizeof(float);
  if (available < data_bytes) throw FormatError("data block shorter than M·2·N");
  if (available < data_bytes + 4) throw FormatError("missing CRC32 after data block");
  if (available > data_bytes + 4) throw FormatError("trailing bytes after CRC32");

  std::vector<float> data(count);
  std::memcpy(data.data(), bytes.data() + offset, data_bytes);
  std::uint32_t crc = 0;
  for (int i = 0; i < 4; ++i) crc |= static_cast<std::uint32_t>(bytes[offset + data_bytes + i]) << (8 * i);
  if (crc != crc_of(data)) throw FormatError("checksum mismatch");

  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  const auto ordered = nlohmann::ordered_json::parse(text);
  for (const auto& [key, value] : ordered.items()) {
    if (key != "fs" && key != "num_directions" && key != "ir_length" && key != "channels" &&
        key != "positions") {
      meta[key] = value;
    }
  }
  try {
    return HrtfSet(fs_j.get<double>(), static_cast<std::size_t>(n), std::move(positions),
                   std::move(data), meta.dump());
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
}

HrtfSet load_hrtf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open HRTF file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read HRTF file " + path.string());
  try {
    return decode_hrtf(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_hrtf(const HrtfSet& set, const std::filesystem::path& path) {
  const auto bytes = encode_hrtf(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write HRTF file " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write HRTF file " + path.string());
}

NearestMatch nearest_index(const HrtfSet& set, const Direction& dir) {
  const auto r = rank_nearest(set, direction_vector(dir.azimuth, dir.elevation), 1);
  return {r.front().index, r.front().angle};
}

HrirBlend nearest_blend(const HrtfSet& set, const Direction& dir) {
  return single(nearest_index(set, dir).index);
}

HrirBlend interpolation_blend(const HrtfSet& set, const Direction& dir) {
  if (set.size() < 3) {
    HrirBlend blend = nearest_blend(set, dir);
    blend.fallback = true;
    return blend;
  }
  const Vec3 q = direction_vector(dir.azimuth, dir.elevation);
  const auto& u = set.unit_vectors();

  auto ranked = rank_nearest(set, q, kCandidateCount);
  if (ranked[0].angle < kExactTolerance) return single(ranked[0].index);

  auto pick_third = [&](const std::vector<Ranked>& r) -> const Ranked* {
    for (std::size_t k = 2; k < r.size(); ++k) {
      if (spans_plane(u[r[0].index], u[r[1].index], u[r[k].index])) return &r[k];
    }
    return nullptr;
  };
  const Ranked* third = pick_third(ranked);
  if (third == nullptr && ranked.size() < set.size()) {
    ranked = rank_all(set, q);
    third = pick_third(ranked);
  }
  // All measurements on one great circle: plain three nearest.
  if (third == nullptr) third = &ranked[2];

  const std::array<Ranked, 3> chosen{ranked[0], ranked[1], *third};
  HrirBlend blend;
  blend.count = 3;
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    blend.index[i] = chosen[i].index;
    blend.weight[i] = 1.0 / chosen[i].angle;
    total += blend.weight[i];
  }
  for (double& w : blend.weight) w /= total;
  return blend;
}

HrirPair mix(const HrtfSet& set, const HrirBlend& blend) {
  HrirPair pair;
  pair.index = blend.index[0];
  pair.fallback = blend.fallback;
  const std::size_t n = set.ir_length();
  if (blend.count == 1) {
    const auto l = set.ir(blend.index[0], 0), r = set.ir(blend.index[0], 1);
    pair.left.assign(l.begin(), l.end());
    pair.right.assign(r.begin(), r.end());
    return pair;
  }
  std::vector<double> acc_l(n, 0.0), acc_r(n, 0.0);
  for (int i = 0; i < blend.count; ++i) {
    const auto l = set.ir(blend.index[i], 0), r = set.ir(blend.index[i], 1);
    for (std::size_t k = 0; k < n; ++k) {
      acc_l[k] += blend.weight[i] * l[k];
      acc_r[k] += blend.weight[i] * r[k];
    }
  }
  pair.left.assign(acc_l.begin(), acc_l.end());
  pair.right.assign(acc_r.begin(), acc_r.end());
  return pair;
}

HrirPair nearest(const HrtfSet& set, const Direction& dir) { return mix(set, nearest_blend(set, dir)); }

HrirPair interpolate(const HrtfSet& set, const Direction& dir) {
  return mix(set, interpolation_blend(set, dir));
}

std::vector<double> resample_signal(std::span<const double> x, std::int64_t up, std::int64_t down) {
  const std::int64_t g = std::gcd(up, down);
  up /= g;
  down /= g;
  const auto n_in = static_cast<std::int64_t>(x.size());
  const std::int64_t n_out = (n_in * up + down - 1) / down;
  if (up == down) return {x.begin(), x.end()};

  // Cutoff relative to the input Nyquist frequency.
  const double rho = std::min(1.0, static_cast<double>(up) / static_cast<double>(down));
  constexpr double kZeroCrossings = 32.0;
  constexpr double kBeta = 8.6;
  const auto half = static_cast<std::int64_t>(std::ceil(kZeroCrossings / rho));
  const double extent = static_cast<double>(half) + 1.0;
  const double i0_beta = std::cyl_bessel_i(0.0, kBeta);

  // table[p][j] weights input sample (center - half + 1 + j) for phase p.
  const std::int64_t taps = 2 * half;
  std::vector<double> table(static_cast<std::size_t>(up * taps));
  for (std::int64_t p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / static_cast<double>(up);
    for (std::int64_t j = 0; j < taps; ++j) {
      const double t = static_cast<double>(j - half + 1) - frac;
      const double a = rho * t;
      const double sinc = a == 0.0 ? 1.0 : std::sin(std::numbers::pi * a) / (std::numbers::pi * a);
      const double r = t / extent;
      const double win = std::cyl_bessel_i(0.0, kBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
      table[static_cast<std::size_t>(p * taps + j)] = rho * sinc * win;
    }
  }

  std::vector<double> y(static_cast<std::size_t>(n_out), 0.0);
  for (std::int64_t m = 0; m < n_out; ++m) {
    const std::int64_t center = (m * down) / up;
    const std::int64_t phase = (m * down) % up;
    const double* h = table.data() + phase * taps;
    double acc = 0.0;
    for (std::int64_t j = 0; j < taps; ++j) {
      const std::int64_t i = center - half + 1 + j;
      if (i >= 0 && i < n_in) acc += h[j] * x[static_cast<std::size_t>(i)];
    }
    y[static_cast<std::size_t>(m)] = acc;
  }
  return y;
}

HrtfSet resample(const HrtfSet& set, double target_fs) {
  const std::int64_t from = integral_rate(set.fs());
  const std::int64_t to = integral_rate(target_fs);
  if (from == to) return set;
  const std::int64_t g = std::gcd(from, to);
  const std::int64_t up = to / g, down = from / g;
  if (down > 1000) {
    throw ValidationError("resampling ratio " + std::to_string(up) + "/" + std::to_string(down) +
                          " has a denominator above 1000");
  }
  const std::size_t n = set.ir_length();
  const auto n_out = static_cast<std::size_t>((static_cast<std::int64_t>(n) * up + down - 1) / down);
  std::vector<float> data;
  data.reserve(set.size() * 2 * n_out);
  std::vector<double> buf(n);
  for (std::size_t d = 0; d < set.size(); ++d) {
    for (int ch = 0; ch < 2; ++ch) {
      const auto ir = set.ir(d, ch);
      std::copy(ir.begin(), ir.end(), buf.begin());
      for (double v : resample_signal(buf, up, down)) data.push_back(static_cast<float>(v));
    }
  }
  return HrtfSet(static_cast<double>(to), n_out, set.positions(), std::move(data), set.metadata());
}

HrtfSet normalize(const HrtfSet& set) {
  float peak = 0.0f;
  for (float v : set.data()) peak = std::max(peak, std::abs(v));
  if (peak == 0.0f) throw ValidationError("cannot normalize an all-zero HRTF set");
  const double scale = 0.99 / static_cast<double>(peak);
  std::vector<float> data(set.data().begin(), set.data().end());
  for (float& v : data) v = static_cast<float>(static_cast<double>(v) * scale);
  return HrtfSet(set.fs(), set.ir_length(), set.positions(), std::move(data), set.metadata());
}

}  // namespace brirsim
