#include "brirsim/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "brirsim/error.hpp"
#include "brirsim/hrtf.hpp"
#include "brirsim/parallel.hpp"
#include "brirsim/random.hpp"
#include "brirsim/render.hpp"
#include "brirsim/rt60.hpp"

namespace brirsim {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

struct Reader {
  const json& obj;
  std::string where;
  std::set<std::string> seen;

  Reader(const json& o, std::string w) : obj(o), where(std::move(w)) {
    if (!obj.is_object()) throw ValidationError(where + " must be an object");
  }

  bool has(const std::string& key) {
    seen.insert(key);
    return obj.contains(key);
  }

  const json& at(const std::string& key) {
    if (!has(key)) throw ValidationError("missing key " + where + "." + key);
    return obj.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(obj.at(key), key);
  }

  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
    return v.get<double>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!obj.at(key).is_boolean()) throw ValidationError(where + "." + key + " must be true or false");
    return obj.at(key).get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!obj.at(key).is_string()) throw ValidationError(where + "." + key + " must be a string");
    return obj.at(key).get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : obj.items()) {
      if (!seen.contains(key)) throw ValidationError("unknown key " + where + "." + key);
    }
  }
};

Vec3 vec3(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
    throw ValidationError(what + " must be a 3-element number array");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::vector<double> numbers(const json& v, const std::string& what) {
  if (!v.is_array()) throw ValidationError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ValidationError(what + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// A number (all walls and bands), a per-band row (all walls) or six rows.
std::array<std::vector<double>, kWallCount> coefficients(const json& v, std::size_t bands,
                                                         const std::string& what) {
  std::array<std::vector<double>, kWallCount> out;
  if (v.is_number()) {
    out.fill(std::vector<double>(bands, v.get<double>()));
  } else if (v.is_array() && !v.empty() && v[0].is_number()) {
    out.fill(numbers(v, what));
  } else if (v.is_array() && v.size() == kWallCount) {
    for (int w = 0; w < kWallCount; ++w) out[w] = numbers(v[w], what);
  } else {
    throw ValidationError(what + " must be a number, one row or six rows");
  }
  return out;
}

RoomSpec parse_room(const json& j, std::size_t bands) {
  Reader r(j, "room");
  RoomSpec room;
  room.dimensions = vec3(r.at("dimensions"), "room.dimensions");
  room.temperature = r.number("temperature", room.temperature);
  room.humidity = r.number("humidity", room.humidity);
  room.pressure = r.number("pressure", room.pressure);
  const auto alpha = r.has("absorption") ? coefficients(r.at("absorption"), bands, "room.absorption")
                                         : coefficients(json(0.2), bands, "");
  const auto scat = r.has("scattering") ? coefficients(r.at("scattering"), bands, "room.scattering")
                                        : coefficients(json(0.2), bands, "");
  for (int w = 0; w < kWallCount; ++w) room.surfaces[w] = {alpha[w], scat[w]};
  r.finish();
  return room;
}

SimOptions parse_options(const json& j) {
  Reader r(j, "options");
  SimOptions o;
  o.fs = r.number("fs", o.fs);
  o.ir_duration = r.number("duration", o.ir_duration);
  if (r.has("band_centers")) o.band_centers = numbers(r.at("band_centers"), "options.band_centers");
  o.ism_enabled = r.flag("ism", o.ism_enabled);
  if (r.has("ism_order")) {
    const auto& v = r.at("ism_order");
    if (!v.is_number_integer()) throw ValidationError("options.ism_order must be an integer");
    o.ism_max_order = v.get<int>();
  }
  o.diffuse_enabled = r.flag("diffuse", o.diffuse_enabled);
  if (r.has("rays")) {
    const auto& v = r.at("rays");
    if (!v.is_number_integer()) throw ValidationError("options.rays must be an integer");
    o.n_rays = v.get<std::int64_t>();
  }
  o.detection_radius = r.number("detection_radius", o.detection_radius);
  if (r.has("seed")) {
    const auto& v = r.at("seed");
    if (!v.is_number_unsigned()) throw ValidationError("options.seed must be a non-negative integer");
    o.seed = v.get<std::uint64_t>();
  }
  o.energy_threshold = r.number("energy_threshold", o.energy_threshold);
  r.finish();
  return o;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

double wall_clearance(const RoomSpec& room, const Vec3& p) {
  double d = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) d = std::min({d, p[a], room.dimensions[a] - p[a]});
  return d;
}

Orientation facing(const Vec3& from, const Vec3& to) {
  const Vec3 d = normalized(to - from);
  return {rad2deg(std::atan2(d.y, d.x)), rad2deg(std::asin(std::clamp(d.z, -1.0, 1.0))), 0.0};
}

ojson vec_json(const Vec3& v) { return ojson::array({v.x, v.y, v.z}); }

struct Entry {
  std::size_t receiver = 0, source = 0, hrtf = 0;
  Vec3 source_position;
  double azimuth = 0.0, elevation = 0.0;  // source direction in the receiver frame
  std::string file;
  std::uint64_t seed = 0;
  std::optional<double> rt60;
  std::string rt60_error;
};

std::string entry_name(std::size_t r, std::size_t s, std::size_t h) {
  return "r" + std::to_string(r) + "_s" + std::to_string(s) + "_h" + std::to_string(h) + ".wav";
}

bool existing_output_valid(const std::filesystem::path& path, std::size_t channels, std::size_t length,
                           double fs) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return false;
  try {
    const auto ir = read_wave(path);
    return ir.channel_count() == channels && ir.length() == length && ir.fs == fs;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::vector<std::pair<double, double>> sphere_directions(double azimuth_step, double elevation_step,
                                                         double elevation_min, double elevation_max) {
  if (!(azimuth_step > 0.0 && elevation_step > 0.0)) {
    throw ValidationError("sphere azimuth_step and elevation_step must be positive");
  }
  if (!(elevation_min >= -90.0 && elevation_max <= 90.0 && elevation_min <= elevation_max)) {
    throw ValidationError("sphere elevation range must lie in [-90, 90]");
  }
  std::vector<std::pair<double, double>> dirs;
  const auto rows = static_cast<long>(std::floor((elevation_max - elevation_min) / elevation_step + 1e-9));
  const auto cols = static_cast<long>(std::ceil(360.0 / azimuth_step - 1e-9));
  for (long i = 0; i <= rows; ++i) {
    const double el = elevation_min + static_cast<double>(i) * elevation_step;
    if (std::abs(std::abs(el) - 90.0) < 1e-9) {
      dirs.emplace_back(0.0, el);
      continue;
    }
    for (long k = 0; k < cols; ++k) dirs.emplace_back(static_cast<double>(k) * azimuth_step, el);
  }
  return dirs;
}

DatasetSpec parse_dataset_spec(const std::string& json_text, const std::filesystem::path& base_dir) {
  const json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) throw FormatError("dataset spec is not valid JSON");
  Reader top(root, "spec");
  DatasetSpec spec;

  if (top.has("options")) spec.options = parse_options(top.at("options"));
  spec.room = parse_room(top.at("room"), spec.options.band_centers.size());

  {
    Reader r(top.at("receivers"), "receivers");
    if (r.has("positions")) {
      const auto& list = r.at("positions");
      if (!list.is_array() || list.empty()) throw ValidationError("receivers.positions must be a non-empty array");
      for (const auto& p : list) spec.receiver_positions.push_back(vec3(p, "receiver position"));
    }
    if (r.has("grid")) {
      if (!spec.receiver_positions.empty()) throw ValidationError("receivers: give positions or grid, not both");
      Reader g(r.at("grid"), "receivers.grid");
      const Vec3 start = vec3(g.at("start"), "receivers.grid.start");
      const Vec3 step = vec3(g.at("step"), "receivers.grid.step");
      const Vec3 count = vec3(g.at("count"), "receivers.grid.count");
      g.finish();
      for (int a = 0; a < 3; ++a) {
        if (count[a] < 1 || count[a] != std::floor(count[a])) {
          throw ValidationError("receivers.grid.count must hold positive integers");
        }
      }
      for (int i = 0; i < static_cast<int>(count.x); ++i)
        for (int j = 0; j < static_cast<int>(count.y); ++j)
          for (int k = 0; k < static_cast<int>(count.z); ++k)
            spec.receiver_positions.push_back({start.x + i * step.x, start.y + j * step.y, start.z + k * step.z});
    }
    if (spec.receiver_positions.empty()) throw ValidationError("receivers needs positions or grid");
    if (r.has("orientation")) {
      const Vec3 o = vec3(r.at("orientation"), "receivers.orientation");
      spec.receiver_orientation = {o.x, o.y, o.z};
    }
    r.finish();
  }

  if (top.has("hrtfs")) {
    const auto& list = top.at("hrtfs");
    if (!list.is_array()) throw ValidationError("hrtfs must be an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < list.size(); ++i) {
      HrtfEntrySpec h;
      std::string path;
      if (list[i].is_string()) {
        path = list[i].get<std::string>();
      } else {
        Reader r(list[i], "hrtfs[" + std::to_string(i) + "]");
        path = r.string("path", "");
        h.id = r.string("id", "");
        const std::string interp = r.string("interpolation", "nearest");
        if (interp == "nearest") {
          h.interpolation = HrtfInterpolation::nearest;
        } else if (interp == "interpolate") {
          h.interpolation = HrtfInterpolation::interpolate;
        } else {
          throw ValidationError("hrtfs interpolation must be nearest or interpolate");
        }
        h.normalize = r.flag("normalize", true);
        r.finish();
      }
      if (path.empty()) throw ValidationError("hrtfs entry needs a path");
      h.path = resolve(base_dir, path);
      if (h.id.empty()) h.id = std::filesystem::path(path).stem().string();
      if (!ids.insert(h.id).second) throw ValidationError("duplicate HRTF id " + h.id);
      std::error_code ec;
      if (!std::filesystem::is_regular_file(h.path, ec)) {
        throw ValidationError("HRTF file not found: " + h.path.string());
      }
      spec.hrtfs.push_back(std::move(h));
    }
  }

  {
    Reader r(top.at("sources"), "sources");
    const std::string layout = r.string("layout", "sphere");
    if (layout == "sphere") {
      spec.layout = SourceLayout::sphere;
      spec.sphere_radius = r.number("radius", spec.sphere_radius);
      spec.azimuth_step = r.number("azimuth_step", spec.azimuth_step);
      spec.elevation_step = r.number("elevation_step", spec.elevation_step);
      spec.elevation_min = r.number("elevation_min", spec.elevation_min);
      spec.elevation_max = r.number("elevation_max", spec.elevation_max);
    } else if (layout == "hrtf-grid") {
      spec.layout = SourceLayout::hrtf_grid;
      spec.sphere_radius = r.number("radius", spec.sphere_radius);
      if (spec.hrtfs.empty()) throw ValidationError("sources layout hrtf-grid needs at least one HRTF set");
    } else if (layout == "explicit") {
      spec.layout = SourceLayout::explicit_positions;
      const auto& list = r.at("positions");
      if (!list.is_array() || list.empty()) throw ValidationError("sources.positions must be a non-empty array");
      for (const auto& p : list) spec.source_positions.push_back(vec3(p, "source position"));
    } else {
      throw ValidationError("sources.layout must be sphere, hrtf-grid or explicit");
    }
    const std::string dir = r.string("directivity", "omnidirectional");
    const auto d = directivity_from_string(dir);
    if (!d) throw ValidationError("unknown directivity " + dir);
    spec.directivity = *d;
    r.finish();
  }

  spec.output_dir = resolve(base_dir, top.string("output_dir", "dataset"));
  const std::string fmt = top.string("sample_format", "float32");
  if (fmt == "float32") {
    spec.sample_format = SampleFormat::float32;
  } else if (fmt == "int16") {
    spec.sample_format = SampleFormat::int16;
  } else {
    throw ValidationError("sample_format must be float32 or int16");
  }
  top.finish();

  if (spec.layout != SourceLayout::explicit_positions) {
    if (!(spec.sphere_radius > 0.0)) throw ValidationError("sources.radius must be positive");
    for (std::size_t i = 0; i < spec.receiver_positions.size(); ++i) {
      if (!(spec.sphere_radius < wall_clearance(spec.room, spec.receiver_positions[i]))) {
        throw ValidationError("source sphere radius reaches a wall from receiver " + std::to_string(i));
      }
    }
  }
  return spec;
}

DatasetSpec load_dataset_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset spec " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_dataset_spec(text.str(), path.parent_path());
}

DatasetResult generate_dataset(const DatasetSpec& spec, const DatasetOptions& opts) {
  const std::uint64_t base_seed = opts.seed.value_or(spec.options.seed);

  std::vector<std::optional<HrtfSet>> raw;
  std::vector<PreparedHrtf> prepared;
  for (const auto& h : spec.hrtfs) {
    HrtfSet set = load_hrtf(h.path);
    prepared.push_back(prepare_hrtf(set, HrtfReceiver{h.path.string(), h.interpolation, h.normalize},
                                    spec.options.fs));
    raw.emplace_back(std::move(set));
  }
  const std::size_t hrtf_count = std::max<std::size_t>(1, spec.hrtfs.size());

  std::vector<Entry> entries;
  for (std::size_t r = 0; r < spec.receiver_positions.size(); ++r) {
    const Vec3& rp = spec.receiver_positions[r];
    const Rotation frame(spec.receiver_orientation);
    for (std::size_t h = 0; h < hrtf_count; ++h) {
      std::vector<std::pair<double, double>> dirs;
      std::vector<Vec3> positions;
      switch (spec.layout) {
        case SourceLayout::sphere:
          dirs = sphere_directions(spec.azimuth_step, spec.elevation_step, spec.elevation_min,
                                   spec.elevation_max);
          break;
        case SourceLayout::hrtf_grid:
          for (const auto& p : raw[h]->positions()) dirs.emplace_back(p.azimuth, p.elevation);
          break;
        case SourceLayout::explicit_positions:
          positions = spec.source_positions;
          break;
      }
      for (const auto& [az, el] : dirs) {
        positions.push_back(rp + spec.sphere_radius * frame.to_world(direction_vector(az, el)));
      }
      for (std::size_t s = 0; s < positions.size(); ++s) {
        Entry e;
        e.receiver = r;
        e.source = s;
        e.hrtf = h;
        e.source_position = positions[s];
        const Direction d = Direction::from_vector(frame.to_local(positions[s] - rp));
        e.azimuth = d.azimuth;
        e.elevation = d.elevation;
        e.file = entry_name(r, s, h);
        entries.push_back(std::move(e));
      }
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.receiver, a.source, a.hrtf) < std::tie(b.receiver, b.source, b.hrtf);
  });
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].seed = derive_seed(base_seed, i);

  // Validate every combination before touching the output directory.
  std::vector<ValidatedSpec> scenes;
  scenes.reserve(entries.size());
  for (const Entry& e : entries) {
    SimulationSpec sim;
    sim.room = spec.room;
    sim.options = spec.options;
    sim.options.seed = e.seed;
    sim.sources.push_back({e.source_position, facing(e.source_position, spec.receiver_positions[e.receiver]),
                           spec.directivity});
    ReceiverSpec rcv{spec.receiver_positions[e.receiver], spec.receiver_orientation, std::nullopt};
    if (!spec.hrtfs.empty()) {
      const auto& h = spec.hrtfs[e.hrtf];
      rcv.hrtf = HrtfReceiver{h.path.string(), h.interpolation, h.normalize};
    }
    sim.receivers.push_back(std::move(rcv));
    try {
      scenes.push_back(validate(std::move(sim)));
    } catch (const ValidationError& err) {
      throw ValidationError(e.file + ": " + err.what());
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  if (ec || !std::filesystem::is_directory(spec.output_dir)) {
    throw IoError("cannot create output directory " + spec.output_dir.string());
  }

  const std::size_t channels = spec.hrtfs.empty() ? 1 : 2;
  const auto length = static_cast<std::size_t>(std::llround(spec.options.fs * spec.options.ir_duration));
  std::atomic<std::size_t> done{0}, skipped{0};
  std::mutex progress_mutex;

  parallel_for(entries.size(), std::max(1u, opts.jobs), [&](std::size_t i) {
    Entry& e = entries[i];
    const auto path = spec.output_dir / e.file;
    ImpulseResponse stored;
    if (opts.resume && existing_output_valid(path, channels, length, spec.options.fs)) {
      stored = read_wave(path);
      ++skipped;
    } else {
      const PreparedHrtf* hrtf = spec.hrtfs.empty() ? nullptr : &prepared[e.hrtf];
      const ImpulseResponse ir = assemble_brir(scenes[i], 0, 0, hrtf, ExecutionOptions{1});
      const auto bytes = encode_wave(ir, spec.sample_format);
      write_file_atomic(path, bytes);
      // Annotate from what was stored so resumed and fresh runs agree.
      stored = decode_wave(bytes);
    }
    try {
      e.rt60 = estimate_rt60(stored);
    } catch (const AnalysisError& err) {
      e.rt60_error = err.what();
    }
    const std::size_t n = ++done;
    if (opts.progress) {
      std::lock_guard lock(progress_mutex);
      opts.progress(n, entries.size());
    }
  });

  ojson manifest;
  manifest["schema"] = kManifestSchema;
  manifest["generator"] = std::string("brirsim ") + BRIRSIM_VERSION;
  ojson room;
  room["dimensions"] = vec_json(spec.room.dimensions);
  room["temperature"] = spec.room.temperature;
  room["humidity"] = spec.room.humidity;
  room["pressure"] = spec.room.pressure;
  ojson alpha = ojson::array(), scat = ojson::array();
  for (const auto& s : spec.room.surfaces) {
    alpha.push_back(s.absorption);
    scat.push_back(s.scattering);
  }
  room["absorption"] = std::move(alpha);
  room["scattering"] = std::move(scat);
  manifest["room"] = std::move(room);

  const SimOptions& o = spec.options;
  manifest["options"] = {{"fs", o.fs},
                         {"duration", o.ir_duration},
                         {"band_centers", o.band_centers},
                         {"ism", o.ism_enabled},
                         {"ism_order", o.ism_max_order},
                         {"diffuse", o.diffuse_enabled},
                         {"rays", o.n_rays},
                         {"detection_radius", o.detection_radius},
                         {"energy_threshold", o.energy_threshold},
                         {"sample_format", spec.sample_format == SampleFormat::float32 ? "float32" : "int16"}};
  manifest["seed"] = base_seed;

  ojson predicted = ojson::array();
  for (std::size_t b = 0; b < o.band_centers.size(); ++b) {
    ojson row{{"band", o.band_centers[b]}};
    try {
      row["rt60"] = predicted_rt60_eyring(spec.room, b);
    } catch (const ValidationError&) {
      row["rt60"] = nullptr;
    }
    predicted.push_back(std::move(row));
  }
  manifest["predicted_rt60"] = std::move(predicted);

  ojson hrtfs = ojson::array();
  if (spec.hrtfs.empty()) {
    hrtfs.push_back({{"id", "omnidirectional"}, {"path", nullptr}});
  }
  for (std::size_t h = 0; h < spec.hrtfs.size(); ++h) {
    hrtfs.push_back({{"id", spec.hrtfs[h].id},
                     {"path", spec.hrtfs[h].path.filename().string()},
                     {"fs", raw[h]->fs()},
                     {"directions", raw[h]->size()},
                     {"resampled", prepared[h].resampled},
                     {"interpolation",
                      spec.hrtfs[h].interpolation == HrtfInterpolation::nearest ? "nearest" : "interpolate"},
                     {"normalize", spec.hrtfs[h].normalize}});
  }
  manifest["hrtfs"] = std::move(hrtfs);

  ojson list = ojson::array();
  for (const Entry& e : entries) {
    ojson j;
    j["file"] = e.file;
    j["receiver_index"] = e.receiver;
    j["source_index"] = e.source;
    j["hrtf_index"] = e.hrtf;
    j["hrtf"] = spec.hrtfs.empty() ? std::string("omnidirectional") : spec.hrtfs[e.hrtf].id;
    j["receiver_position"] = vec_json(spec.receiver_positions[e.receiver]);
    j["receiver_orientation"] = ojson::array(
        {spec.receiver_orientation.yaw, spec.receiver_orientation.pitch, spec.receiver_orientation.roll});
    j["source_position"] = vec_json(e.source_position);
    j["source_direction"] = {{"azimuth", e.azimuth}, {"elevation", e.elevation}};
    j["rt60"] = e.rt60 ? ojson(*e.rt60) : ojson(nullptr);
    if (!e.rt60) j["rt60_error"] = e.rt60_error;
    j["seed"] = e.seed;
    list.push_back(std::move(j));
  }
  manifest["entries"] = std::move(list);

  const std::string text = manifest.dump(2) + "\n";
  const auto manifest_path = spec.output_dir / "manifest.json";
  write_file_atomic(manifest_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));

  DatasetResult result;
  result.entries = entries.size();
  result.skipped = skipped;
  result.rendered = entries.size() - skipped;
  result.manifest = manifest_path;
  return result;
}

}  // namespace brirsim
