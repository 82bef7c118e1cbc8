#include "sensefeat/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sensefeat {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Strips a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool is_bare_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
      return false;
    }
  }
  return true;
}

class ValueParser {
 public:
  ValueParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  TomlValue parse_all() {
    TomlValue v = parse_value();
    skip_ws();
    if (pos_ != s_.size()) fail(line_, "unexpected trailing characters");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  TomlValue parse_value() {
    skip_ws();
    if (pos_ >= s_.size()) fail(line_, "missing value");
    const char c = s_[pos_];
    if (c == '"') return {parse_string()};
    if (c == '[') return {parse_array()};
    std::size_t end = pos_;
    while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && s_[end] != ' ' &&
           s_[end] != '\t') {
      ++end;
    }
    const std::string_view token = s_.substr(pos_, end - pos_);
    pos_ = end;
    return parse_scalar(token);
  }

  std::string parse_string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
        const char e = s_[++pos_];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(line_, std::string("unsupported escape \\") + e);
        }
      } else {
        out += s_[pos_];
      }
      ++pos_;
    }
    if (pos_ >= s_.size()) fail(line_, "unterminated string");
    ++pos_;
    return out;
  }

  TomlValue::Array parse_array() {
    ++pos_;
    TomlValue::Array items;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return items;
    }
    while (true) {
      items.push_back(parse_value());
      skip_ws();
      if (pos_ >= s_.size()) fail(line_, "unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          return items;
        }
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return items;
      }
      fail(line_, "expected ',' or ']' in array");
    }
  }

  TomlValue parse_scalar(std::string_view t) {
    if (t == "true") return {true};
    if (t == "false") return {false};
    if (t.size() == 10 && t[4] == '-' && t[7] == '-') {
      int y = 0;
      unsigned m = 0, d = 0;
      const bool ok = std::from_chars(t.data(), t.data() + 4, y).ec == std::errc() &&
                      std::from_chars(t.data() + 5, t.data() + 7, m).ec == std::errc() &&
                      std::from_chars(t.data() + 8, t.data() + 10, d).ec == std::errc();
      const CivilDate date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
      if (!ok || !date.ok()) fail(line_, "invalid date '" + std::string(t) + "'");
      return {date};
    }
    std::string cleaned;
    for (char c : t) {
      if (c != '_') cleaned += c;
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), i);
    if (ec == std::errc() && p == cleaned.data() + cleaned.size()) return {i};
    double d = 0.0;
    auto [p2, ec2] = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), d);
    if (ec2 == std::errc() && p2 == cleaned.data() + cleaned.size()) return {d};
    fail(line_, "cannot parse value '" + std::string(t) + "'");
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

template <typename T>
const T* get_if(const std::map<std::string, TomlValue>& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) return nullptr;
  const T* v = std::get_if<T>(&it->second.value);
  if (!v) throw ConfigError("config key '" + key + "' has the wrong type");
  return v;
}

std::optional<double> get_number(const std::map<std::string, TomlValue>& m,
                                 const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(&it->second.value)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&it->second.value)) return *d;
  throw ConfigError("config key '" + key + "' must be a number");
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(std::string_view text) {
  std::map<std::string, TomlValue> out;
  std::string table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail(line_no, "malformed table header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!is_bare_key(name)) fail(line_no, "invalid table name");
      table = std::string(name);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    if (!is_bare_key(key)) fail(line_no, "invalid key '" + std::string(key) + "'");
    const std::string full = table.empty() ? std::string(key) : table + "." + std::string(key);
    if (out.count(full)) fail(line_no, "duplicate key '" + full + "'");
    out.emplace(full, ValueParser(trim(line.substr(eq + 1)), line_no).parse_all());
  }
  return out;
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  const auto kv = parse_toml(text);
  static const std::set<std::string> known{
      "start",          "end",
      "timezone",       "half_term_split",
      "weeks_n",        "weeks_m",
      "seed",           "sensors",
      "location.eps_m", "location.min_pts",
      "location.speed_threshold_kmh", "location.gap_cap_s",
      "places.map"};
  for (const auto& [k, v] : kv) {
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }

  RunConfig cfg;
  cfg.source_text = std::string(text);
  const auto* start = get_if<CivilDate>(kv, "start");
  const auto* end = get_if<CivilDate>(kv, "end");
  if (!start || !end) throw ConfigError("config requires 'start' and 'end' dates");
  cfg.study.start = *start;
  cfg.study.end = *end;
  if (const auto* tz = get_if<std::string>(kv, "timezone")) cfg.study.timezone = *tz;
  if (const auto* split = get_if<CivilDate>(kv, "half_term_split")) {
    cfg.study.half_term_split = *split;
  }
  if (const auto* n = get_if<std::int64_t>(kv, "weeks_n")) cfg.study.weeks_n = static_cast<int>(*n);
  if (const auto* m = get_if<std::int64_t>(kv, "weeks_m")) cfg.study.weeks_m = static_cast<int>(*m);
  if (const auto* seed = get_if<std::int64_t>(kv, "seed")) {
    if (*seed < 0) throw ConfigError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(*seed);
  }
  if (const auto* sensors = get_if<TomlValue::Array>(kv, "sensors")) {
    cfg.sensors.clear();
    for (const auto& item : *sensors) {
      const auto* name = std::get_if<std::string>(&item.value);
      const auto sensor = name ? parse_sensor(*name) : std::nullopt;
      if (!sensor) throw ConfigError("unknown sensor in 'sensors'");
      cfg.sensors.insert(*sensor);
    }
  }

  if (auto v = get_number(kv, "location.eps_m")) cfg.location.eps_m = *v;
  if (const auto* v = get_if<std::int64_t>(kv, "location.min_pts")) {
    cfg.location.min_pts = static_cast<int>(*v);
  }
  if (auto v = get_number(kv, "location.speed_threshold_kmh")) {
    cfg.location.speed_threshold_kmh = *v;
  }
  if (auto v = get_number(kv, "location.gap_cap_s")) cfg.location.gap_cap_s = *v;
  if (!(cfg.location.eps_m > 0.0)) throw ConfigError("location.eps_m must be > 0");
  if (cfg.location.min_pts < 1) throw ConfigError("location.min_pts must be >= 1");
  if (!(cfg.location.gap_cap_s > 0.0)) throw ConfigError("location.gap_cap_s must be > 0");
  if (!(cfg.location.speed_threshold_kmh >= 0.0)) {
    throw ConfigError("location.speed_threshold_kmh must be >= 0");
  }

  if (const auto* map = get_if<std::string>(kv, "places.map")) {
    std::filesystem::path p(*map);
    cfg.place_map = p.is_absolute() ? p : base_dir / p;
  }

  resolve_calendar(cfg.study);  // validates dates, zone and weeks
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

}  // namespace sensefeat
