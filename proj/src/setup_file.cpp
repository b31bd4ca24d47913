#include "brirsim/setup_file.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "brirsim/error.hpp"

namespace brirsim {
namespace {

struct Location {
  std::size_t line = 0;
  std::size_t column = 0;
};

struct Value {
  enum class Kind { scalar, matrix, text };
  Kind kind = Kind::scalar;
  std::string text;                                // scalar token or string contents
  std::vector<std::vector<std::string>> rows;      // matrix tokens
  std::vector<std::vector<Location>> row_locations;
  Location where;
  bool quoted = false;
};

struct Statement {
  std::string key;
  Location key_at;
  Value value;
};

[[noreturn]] void syntax_error(const std::string& what, Location at) {
  throw ParseError(what, at.line, at.column);
}

std::optional<double> to_double(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || end != token.data() + token.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Statement> statements() {
    std::vector<Statement> out;
    for (;;) {
      skip_blank_lines();
      if (at_end()) break;
      out.push_back(statement());
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  Location here() const { return {line_, column_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_comment() {
    while (!at_end() && peek() != '\n') advance();
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }

  void skip_blank_lines() {
    for (;;) {
      skip_spaces();
      if (peek() == '%') skip_comment();
      if (!at_end() && peek() == '\n') {
        advance();
        continue;
      }
      // UTF-8 byte-order mark at the start of the file.
      if (pos_ == 0 && text_.substr(0, 3) == "\xEF\xBB\xBF") {
        pos_ = 3;
        continue;
      }
      return;
    }
  }

  static bool key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '(' ||
           c == ')';
  }

  Statement statement() {
    Statement st;
    st.key_at = here();
    while (!at_end() && key_char(peek())) {
      st.key.push_back(peek());
      advance();
    }
    if (st.key.empty()) syntax_error(std::string("unexpected character '") + peek() + "'", here());
    skip_spaces();
    if (peek() != '=') syntax_error("expected '=' after key '" + st.key + "'", here());
    advance();
    skip_spaces();
    st.value = value();
    skip_spaces();
    if (peek() == ';') {  // tolerate Octave-style statement terminators
      advance();
      skip_spaces();
    }
    if (peek() == '%') skip_comment();
    if (!at_end() && peek() != '\n') syntax_error("unexpected characters after value", here());
    return st;
  }

  Value value() {
    Value v;
    v.where = here();
    const char c = peek();
    if (at_end() || c == '\n' || c == '%') syntax_error("missing value", here());
    if (c == '[') return matrix();
    if (c == '\'' || c == '"') {
      v.kind = Value::Kind::text;
      v.quoted = true;
      v.text = quoted(c);
      return v;
    }
    // Bare value: rest of the line up to a comment.
    std::string raw;
    while (!at_end() && peek() != '\n' && peek() != '%') {
      raw.push_back(peek());
      advance();
    }
    while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t' || raw.back() == '\r' ||
                            raw.back() == ';')) {
      raw.pop_back();
    }
    v.text = raw;
    v.kind = to_double(raw) ? Value::Kind::scalar : Value::Kind::text;
    return v;
  }

  std::string quoted(char quote) {
    const Location start = here();
    advance();
    std::string s;
    for (;;) {
      if (at_end() || peek() == '\n') syntax_error("unterminated string", start);
      if (peek() == quote) {
        advance();
        if (peek() == quote) {  // doubled quote is a literal quote
          s.push_back(quote);
          advance();
          continue;
        }
        return s;
      }
      s.push_back(peek());
      advance();
    }
  }

  Value matrix() {
    Value v;
    v.kind = Value::Kind::matrix;
    v.where = here();
    advance();  // '['
    std::vector<std::string> row;
    std::vector<Location> row_at;
    auto flush_row = [&] {
      if (!row.empty()) {
        v.rows.push_back(std::move(row));
        v.row_locations.push_back(std::move(row_at));
      }
      row.clear();
      row_at.clear();
    };
    for (;;) {
      if (at_end()) syntax_error("unterminated '['", v.where);
      const char c = peek();
      if (c == ']') {
        advance();
        break;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == ',') {
        advance();
        continue;
      }
      if (c == '%') {
        skip_comment();
        continue;
      }
      if (c == ';' || c == '\n') {
        advance();
        flush_row();
        continue;
      }
      const Location at = here();
      std::string token;
      while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' &&
             peek() != ';' && peek() != ']' && peek() != '%') {
        token.push_back(peek());
        advance();
      }
      if (!to_double(token)) syntax_error("invalid number '" + token + "'", at);
      row.push_back(std::move(token));
      row_at.push_back(at);
    }
    flush_row();
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// Typed accessors

[[noreturn]] void mismatch(const Statement& st, const std::string& expected) {
  syntax_error("type mismatch: " + st.key + " expects " + expected, st.value.where);
}

double as_number(const Statement& st) {
  if (st.value.kind == Value::Kind::scalar) return *to_double(st.value.text);
  if (st.value.kind == Value::Kind::matrix && st.value.rows.size() == 1 &&
      st.value.rows[0].size() == 1) {
    return *to_double(st.value.rows[0][0]);
  }
  mismatch(st, "a number");
}

std::int64_t as_integer(const Statement& st) {
  const double v = as_number(st);
  std::int64_t i = 0;
  const std::string& tok = st.value.kind == Value::Kind::scalar ? st.value.text : st.value.rows[0][0];
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), i);
  if (ec == std::errc() && end == tok.data() + tok.size()) return i;
  if (v == std::trunc(v) && std::fabs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  mismatch(st, "an integer");
}

std::uint64_t as_unsigned(const Statement& st) {
  if (st.value.kind == Value::Kind::scalar) {
    std::uint64_t u = 0;
    const std::string& tok = st.value.text;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), u);
    if (ec == std::errc() && end == tok.data() + tok.size()) return u;
  }
  const std::int64_t i = as_integer(st);
  if (i < 0) mismatch(st, "a non-negative integer");
  return static_cast<std::uint64_t>(i);
}

std::vector<double> as_vector(const Statement& st) {
  if (st.value.kind == Value::Kind::scalar) return {*to_double(st.value.text)};
  if (st.value.kind != Value::Kind::matrix || st.value.rows.size() > 1) mismatch(st, "a vector");
  std::vector<double> out;
  if (!st.value.rows.empty()) {
    for (const auto& tok : st.value.rows[0]) out.push_back(*to_double(tok));
  }
  return out;
}

Vec3 as_vec3(const Statement& st) {
  const auto v = as_vector(st);
  if (v.size() != 3) mismatch(st, "a 3-vector");
  return {v[0], v[1], v[2]};
}

Orientation as_orientation(const Statement& st) {
  const Vec3 v = as_vec3(st);
  return {v.x, v.y, v.z};
}

std::vector<std::vector<double>> as_matrix(const Statement& st) {
  if (st.value.kind != Value::Kind::matrix) mismatch(st, "a matrix");
  std::vector<std::vector<double>> out;
  for (const auto& row : st.value.rows) {
    std::vector<double> r;
    for (const auto& tok : row) r.push_back(*to_double(tok));
    out.push_back(std::move(r));
  }
  return out;
}

std::string as_text(const Statement& st) {
  if (st.value.kind == Value::Kind::matrix) mismatch(st, "a string");
  return st.value.text;
}

bool as_bool(const Statement& st) {
  const std::string t = st.value.kind == Value::Kind::matrix ? std::string() : st.value.text;
  if (t == "1" || t == "true" || t == "on" || t == "yes") return true;
  if (t == "0" || t == "false" || t == "off" || t == "no") return false;
  mismatch(st, "a boolean (true/false)");
}

std::vector<std::string> split_words(std::string_view s, const Statement& st) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::string word;
    if (s[i] == '"' || s[i] == '\'') {
      const char q = s[i++];
      while (i < s.size() && s[i] != q) word.push_back(s[i++]);
      if (i >= s.size()) mismatch(st, std::string("a closing ") + q + " in the description");
      ++i;
    } else {
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) word.push_back(s[i++]);
    }
    out.push_back(std::move(word));
  }
  return out;
}

std::optional<HrtfReceiver> receiver_description(const Statement& st) {
  const auto words = split_words(as_text(st), st);
  if (words.size() == 1 && words[0] == "omnidirectional") return std::nullopt;
  if (words.size() == 4 && words[0] == "SOFA") {
    HrtfReceiver h;
    h.path = words[1];
    if (words[2] == "nearest") {
      h.interpolation = HrtfInterpolation::nearest;
    } else if (words[2] == "interpolate") {
      h.interpolation = HrtfInterpolation::interpolate;
    } else {
      mismatch(st, "interpolation 'nearest' or 'interpolate'");
    }
    if (words[3] == "normalize") {
      h.normalize = true;
    } else if (words[3] == "raw") {
      h.normalize = false;
    } else {
      mismatch(st, "normalization 'normalize' or 'raw'");
    }
    return h;
  }
  mismatch(st, "'omnidirectional' or 'SOFA <path> <nearest|interpolate> <normalize|raw>'");
}

struct IndexedKey {
  std::string group;  // "source" or "receiver"
  std::size_t index = 0;
  std::string field;
};

std::optional<IndexedKey> split_indexed(const std::string& key) {
  const auto open = key.find('(');
  if (open == std::string::npos) return std::nullopt;
  const auto close = key.find(')', open);
  if (close == std::string::npos || close + 1 >= key.size() || key[close + 1] != '.') {
    return std::nullopt;
  }
  IndexedKey k;
  k.group = key.substr(0, open);
  const std::string digits = key.substr(open + 1, close - open - 1);
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k.index);
  if (ec != std::errc() || end != digits.data() + digits.size() || digits.empty()) return std::nullopt;
  k.field = key.substr(close + 2);
  return k;
}

struct PendingSource {
  std::optional<Vec3> location;
  SourceSpec spec;
};

struct PendingReceiver {
  std::optional<Vec3> location;
  ReceiverSpec spec;
};

void fill_surfaces(RoomSpec& room, const std::vector<std::vector<double>>& rows,
                   bool absorption, const Statement& st) {
  if (rows.size() != 1 && rows.size() != static_cast<std::size_t>(kWallCount)) {
    mismatch(st, "6 rows (x0 x1 y0 y1 z0 z1) or a single row for all surfaces");
  }
  for (int w = 0; w < kWallCount; ++w) {
    const auto& row = rows.size() == 1 ? rows[0] : rows[w];
    (absorption ? room.surfaces[w].absorption : room.surfaces[w].scattering) = row;
  }
}

}  // namespace

SimulationSpec parse_setup(std::string_view text) {
  SimulationSpec spec;
  std::set<std::string> seen;
  std::map<std::size_t, PendingSource> sources;
  std::map<std::size_t, PendingReceiver> receivers;
  bool have_dimension = false;
  bool have_absorption = false;
  bool have_scattering = false;

  for (const Statement& st : Lexer(text).statements()) {
    std::string key = st.key;
    if (const auto ik = split_indexed(key)) {
      key = ik->group + "(" + std::to_string(ik->index) + ")." + ik->field;  // canonical
    }
    if (!seen.insert(key).second) syntax_error("duplicate key '" + key + "'", st.key_at);

    if (key == "room.dimension") {
      spec.room.dimensions = as_vec3(st);
      have_dimension = true;
    } else if (key == "room.temperature") {
      spec.room.temperature = as_number(st);
    } else if (key == "room.humidity") {
      spec.room.humidity = as_number(st);
    } else if (key == "room.pressure") {
      spec.room.pressure = as_number(st);
    } else if (key == "room.surface.absorption") {
      fill_surfaces(spec.room, as_matrix(st), true, st);
      have_absorption = true;
    } else if (key == "room.surface.scattering") {
      fill_surfaces(spec.room, as_matrix(st), false, st);
      have_scattering = true;
    } else if (key == "options.fs") {
      spec.options.fs = as_number(st);
    } else if (key == "options.duration") {
      spec.options.ir_duration = as_number(st);
    } else if (key == "options.bandcenters") {
      spec.options.band_centers = as_vector(st);
    } else if (key == "options.ism") {
      spec.options.ism_enabled = as_bool(st);
    } else if (key == "options.ismorder") {
      const auto order = as_integer(st);
      if (order < std::numeric_limits<int>::min() || order > std::numeric_limits<int>::max()) {
        mismatch(st, "an integer in int range");
      }
      spec.options.ism_max_order = static_cast<int>(order);
    } else if (key == "options.diffuse") {
      spec.options.diffuse_enabled = as_bool(st);
    } else if (key == "options.rays") {
      spec.options.n_rays = as_integer(st);
    } else if (key == "options.detectionradius") {
      spec.options.detection_radius = as_number(st);
    } else if (key == "options.seed") {
      spec.options.seed = as_unsigned(st);
    } else if (key == "options.energythreshold") {
      spec.options.energy_threshold = as_number(st);
    } else if (key == "output.path") {
      spec.output.path = as_text(st);
    } else if (key == "output.format") {
      const std::string f = as_text(st);
      if (f == "wav") {
        spec.output.format = OutputFormat::wav;
      } else if (f == "f64raw") {
        spec.output.format = OutputFormat::f64raw;
      } else {
        mismatch(st, "'wav' or 'f64raw'");
      }
    } else if (const auto ik = split_indexed(key); ik && ik->index >= 1 &&
                                                   (ik->group == "source" || ik->group == "receiver")) {
      if (ik->group == "source") {
        PendingSource& src = sources[ik->index];
        if (ik->field == "location") {
          src.location = as_vec3(st);
        } else if (ik->field == "orientation") {
          src.spec.orientation = as_orientation(st);
        } else if (ik->field == "description") {
          const auto d = directivity_from_string(as_text(st));
          if (!d) mismatch(st, "a directivity (omnidirectional, cardioid, subcardioid, hypercardioid, dipole)");
          src.spec.directivity = *d;
        } else {
          syntax_error("unknown key '" + st.key + "'", st.key_at);
        }
      } else {
        PendingReceiver& rcv = receivers[ik->index];
        if (ik->field == "location") {
          rcv.location = as_vec3(st);
        } else if (ik->field == "orientation") {
          rcv.spec.orientation = as_orientation(st);
        } else if (ik->field == "description") {
          rcv.spec.hrtf = receiver_description(st);
        } else {
          syntax_error("unknown key '" + st.key + "'", st.key_at);
        }
      }
    } else {
      syntax_error("unknown key '" + st.key + "'", st.key_at);
    }
  }

  if (!have_dimension) throw ParseError("missing required key room.dimension", 0, 0);

  const std::size_t bands = spec.options.band_centers.size();
  for (SurfaceSpec& s : spec.room.surfaces) {
    if (!have_absorption) s.absorption.assign(bands, kDefaultAbsorption);
    if (!have_scattering) s.scattering.assign(bands, kDefaultScattering);
  }

  std::size_t expected = 1;
  for (auto& [index, src] : sources) {
    if (index != expected) {
      throw ParseError("missing source(" + std::to_string(expected) + ")", 0, 0);
    }
    if (!src.location) {
      throw ParseError("missing required key source(" + std::to_string(index) + ").location", 0, 0);
    }
    src.spec.position = *src.location;
    spec.sources.push_back(src.spec);
    ++expected;
  }
  expected = 1;
  for (auto& [index, rcv] : receivers) {
    if (index != expected) {
      throw ParseError("missing receiver(" + std::to_string(expected) + ")", 0, 0);
    }
    if (!rcv.location) {
      throw ParseError("missing required key receiver(" + std::to_string(index) + ").location", 0,
                       0);
    }
    rcv.spec.position = *rcv.location;
    spec.receivers.push_back(rcv.spec);
    ++expected;
  }
  return spec;
}

namespace {

std::string num(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string vec(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s + "]";
}

std::string vec3(const Vec3& v) { return vec({v.x, v.y, v.z}); }

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    out.push_back(c);
    if (c == '\'') out.push_back('\'');
  }
  return out + "'";
}

std::string surface_matrix(const RoomSpec& room, bool absorption) {
  std::string s = "[";
  for (int w = 0; w < kWallCount; ++w) {
    const auto& row = absorption ? room.surfaces[w].absorption : room.surfaces[w].scattering;
    if (w) s += ";\n    ";
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? " " : "") + num(row[i]);
  }
  return s + "]";
}

}  // namespace

std::string serialize_setup(const SimulationSpec& spec) {
  std::ostringstream out;
  const RoomSpec& room = spec.room;
  const SimOptions& o = spec.options;
  out << "% room\n";
  out << "room.dimension = " << vec3(room.dimensions) << "\n";
  out << "room.temperature = " << num(room.temperature) << "\n";
  out << "room.humidity = " << num(room.humidity) << "\n";
  out << "room.pressure = " << num(room.pressure) << "\n";
  out << "room.surface.absorption = " << surface_matrix(room, true) << "\n";
  out << "room.surface.scattering = " << surface_matrix(room, false) << "\n";
  out << "\n% simulation options\n";
  out << "options.fs = " << num(o.fs) << "\n";
  out << "options.duration = " << num(o.ir_duration) << "\n";
  out << "options.bandcenters = " << vec(o.band_centers) << "\n";
  out << "options.ism = " << (o.ism_enabled ? "true" : "false") << "\n";
  out << "options.ismorder = " << o.ism_max_order << "\n";
  out << "options.diffuse = " << (o.diffuse_enabled ? "true" : "false") << "\n";
  out << "options.rays = " << o.n_rays << "\n";
  out << "options.detectionradius = " << num(o.detection_radius) << "\n";
  out << "options.seed = " << o.seed << "\n";
  out << "options.energythreshold = " << num(o.energy_threshold) << "\n";
  for (std::size_t i = 0; i < spec.sources.size(); ++i) {
    const SourceSpec& s = spec.sources[i];
    const std::string p = "source(" + std::to_string(i + 1) + ").";
    out << "\n" << p << "location = " << vec3(s.position) << "\n";
    out << p << "orientation = "
        << vec({s.orientation.yaw, s.orientation.pitch, s.orientation.roll}) << "\n";
    out << p << "description = " << quote(std::string(to_string(s.directivity))) << "\n";
  }
  for (std::size_t j = 0; j < spec.receivers.size(); ++j) {
    const ReceiverSpec& r = spec.receivers[j];
    const std::string p = "receiver(" + std::to_string(j + 1) + ").";
    out << "\n" << p << "location = " << vec3(r.position) << "\n";
    out << p << "orientation = "
        << vec({r.orientation.yaw, r.orientation.pitch, r.orientation.roll}) << "\n";
    std::string desc = "omnidirectional";
    if (r.hrtf) {
      const bool spaced = r.hrtf->path.find_first_of(" \t") != std::string::npos;
      desc = "SOFA " + (spaced ? "\"" + r.hrtf->path + "\"" : r.hrtf->path) + " " +
             (r.hrtf->interpolation == HrtfInterpolation::nearest ? "nearest" : "interpolate") +
             " " + (r.hrtf->normalize ? "normalize" : "raw");
    }
    out << p << "description = " << quote(desc) << "\n";
  }
  out << "\n% output\n";
  out << "output.path = " << quote(spec.output.path) << "\n";
  out << "output.format = " << (spec.output.format == OutputFormat::wav ? "wav" : "f64raw") << "\n";
  return out.str();
}

}  // namespace brirsim
