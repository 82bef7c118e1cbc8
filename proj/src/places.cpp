#include "sensefeat/places.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace sensefeat::places {

namespace {

constexpr TimestampMs kStudyMinMs = 30 * kMsPerMinute;
constexpr TimestampMs kSocialMinMs = 20 * kMsPerMinute;
constexpr std::int64_t kSedentaryStepLimit = 10;  // steps per 5-minute bin, exclusive

struct Projected {
  double x;
  double y;
};

Projected project(const GeoPoint& p, double cos_ref) {
  return {p.longitude * cos_ref, p.latitude};
}

bool on_segment(Projected p, Projected a, Projected b) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  if (std::abs(cross) > 1e-9 * std::max(len, 1e-12)) return false;
  return p.x >= std::min(a.x, b.x) - 1e-12 && p.x <= std::max(a.x, b.x) + 1e-12 &&
         p.y >= std::min(a.y, b.y) - 1e-12 && p.y <= std::max(a.y, b.y) + 1e-12;
}

bool contains(const PlacePolygon& poly, const GeoPoint& point) {
  const double cos_ref = std::cos(point.latitude * std::numbers::pi / 180.0);
  const Projected p = project(point, cos_ref);
  const std::size_t n = poly.ring.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Projected a = project(poly.ring[i], cos_ref);
    const Projected b = project(poly.ring[j], cos_ref);
    if (on_segment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double minutes(TimestampMs ms) { return static_cast<double>(ms) / kMsPerMinute; }

bool overlaps(TimestampMs a0, TimestampMs a1, TimestampMs b0, TimestampMs b1) {
  return a0 < b1 && b0 < a1;
}

}  // namespace

std::string_view to_string(PlaceType t) {
  switch (t) {
    case PlaceType::greek_social: return "greek_social";
    case PlaceType::greek_all: return "greek_all";
    case PlaceType::student_apartment: return "student_apartment";
    case PlaceType::residential_hall: return "residential_hall";
    case PlaceType::athletic: return "athletic";
    case PlaceType::green_space: return "green_space";
    case PlaceType::academic: return "academic";
    case PlaceType::off_campus: return "off_campus";
  }
  return "?";
}

std::optional<PlaceType> parse_place_type(std::string_view s) {
  for (PlaceType t : kAllPlaceTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

bool is_social_setting(PlaceType t) {
  switch (t) {
    case PlaceType::greek_social:
    case PlaceType::greek_all:
    case PlaceType::student_apartment:
    case PlaceType::residential_hall:
    case PlaceType::green_space:
      return true;
    default:
      return false;
  }
}

PlaceMap parse_place_map(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw PlaceMapError(std::string("place map is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("features")) doc = doc["features"];
  if (!doc.is_array()) throw PlaceMapError("place map must be a JSON array of features");

  PlaceMap map;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& f = doc[i];
    const std::string where = "place map feature " + std::to_string(i);
    if (!f.is_object() || !f.contains("type") || !f.contains("polygon")) {
      throw PlaceMapError(where + ": expected {\"type\", \"polygon\"}");
    }
    const auto type = f["type"].is_string() ? parse_place_type(f["type"].get<std::string>())
                                            : std::nullopt;
    if (!type) throw PlaceMapError(where + ": unknown place type");
    PlacePolygon poly;
    poly.type = *type;
    for (const auto& v : f["polygon"]) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw PlaceMapError(where + ": vertices must be [lat, lon]");
      }
      const GeoPoint p{v[0].get<double>(), v[1].get<double>()};
      if (!is_valid(p)) throw PlaceMapError(where + ": vertex out of range");
      poly.ring.push_back(p);
    }
    if (poly.ring.size() >= 2 && poly.ring.front() == poly.ring.back()) poly.ring.pop_back();
    if (poly.ring.size() < 3) throw PlaceMapError(where + ": polygon needs >= 3 vertices");
    map.polygons.push_back(std::move(poly));
  }
  return map;
}

PlaceMap load_place_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PlaceMapError("cannot open place map " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_place_map(ss.str());
}

PlaceType point_in_place(const GeoPoint& p, const PlaceMap& map) {
  for (const auto& poly : map.polygons) {
    if (contains(poly, p)) return poly.type;
  }
  return PlaceType::off_campus;
}

std::vector<PlaceSample> classify_fixes(std::span<const LocationFix> fixes, const PlaceMap& map,
                                        TimestampMs gap_cap_ms) {
  std::vector<PlaceSample> out;
  out.reserve(fixes.size());
  for (const auto& f : fixes) {
    if (!out.empty() && out.back().timestamp == f.timestamp) continue;
    PlaceSample s;
    s.timestamp = f.timestamp;
    s.type = point_in_place(f.point, map);
    s.after_gap = out.empty();
    if (!out.empty()) {
      const TimestampMs dt = f.timestamp - out.back().timestamp;
      out.back().duration_ms = std::min(dt, gap_cap_ms);
      s.after_gap = dt > gap_cap_ms;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<PlaceBout> extract_bouts(std::span<const PlaceSample> samples) {
  std::vector<PlaceBout> bouts;
  std::optional<PlaceBout> current;
  auto flush = [&] {
    if (current && current->duration_ms > 0) bouts.push_back(*current);
    current.reset();
  };
  for (const auto& s : samples) {
    if (current && (s.after_gap || s.type != current->type)) flush();
    if (!current) current = PlaceBout{s.type, s.timestamp, s.timestamp, 0};
    current->duration_ms += s.duration_ms;
    current->end = s.timestamp + s.duration_ms;
  }
  flush();
  return bouts;
}

FeatureMap place_features(std::span<const PlaceSample> samples) {
  std::map<PlaceType, TimestampMs> dwell;
  TimestampMs total = 0;
  std::size_t transitions = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    dwell[samples[i].type] += samples[i].duration_ms;
    total += samples[i].duration_ms;
    if (i > 0 && samples[i].type != samples[i - 1].type) ++transitions;
  }
  const auto bouts = extract_bouts(samples);

  FeatureMap out;
  out["transitions"] = static_cast<double>(transitions);
  for (PlaceType t : kAllPlaceTypes) {
    const auto scope = to_string(t);
    std::vector<double> lengths;
    std::array<std::size_t, 3> at_least{};  // >= 10, 20, 30 minutes
    for (const auto& b : bouts) {
      if (b.type != t) continue;
      lengths.push_back(b.minutes());
      for (std::size_t k = 0; k < at_least.size(); ++k) {
        if (b.duration_ms >= static_cast<TimestampMs>(10 * (k + 1)) * kMsPerMinute) {
          ++at_least[k];
        }
      }
    }
    out[feature_key("dwell_min", scope)] = minutes(dwell[t]);
    out[feature_key("pct_dwell", scope)] =
        total > 0 ? FeatureValue(100.0 * static_cast<double>(dwell[t]) / static_cast<double>(total))
                  : std::nullopt;
    out[feature_key("bouts", scope)] = static_cast<double>(lengths.size());
    out[feature_key("bouts_ge10", scope)] = static_cast<double>(at_least[0]);
    out[feature_key("bouts_ge20", scope)] = static_cast<double>(at_least[1]);
    out[feature_key("bouts_ge30", scope)] = static_cast<double>(at_least[2]);
    put_stats(out, "bout", scope, lengths, true, "_min");
  }
  return out;
}

std::optional<double> study_duration(
    std::span<const PlaceSample> samples, const std::optional<std::span<const StepBin>>& steps,
    const std::optional<std::span<const screen::InteractionBout>>& interactions) {
  if (!steps || !interactions) return std::nullopt;
  TimestampMs total = 0;
  for (const auto& b : extract_bouts(samples)) {
    if (b.type != PlaceType::academic || b.duration_ms < kStudyMinMs) continue;
    const bool sedentary = std::none_of(steps->begin(), steps->end(), [&](const StepBin& bin) {
      return overlaps(bin.start, bin.start + kStepBinMs, b.start, b.end) &&
             bin.steps >= kSedentaryStepLimit;
    });
    const bool phone_free =
        std::none_of(interactions->begin(), interactions->end(), [&](const auto& ib) {
          return ib.kind == screen::BoutKind::interaction &&
                 overlaps(ib.start, ib.end, b.start, b.end);
        });
    if (sedentary && phone_free) total += b.duration_ms;
  }
  return minutes(total);
}

std::optional<double> social_duration(
    std::span<const PlaceSample> samples,
    const std::optional<std::span<const ConversationInference>>& conversation) {
  if (!conversation) return std::nullopt;
  TimestampMs total = 0;
  for (const auto& b : extract_bouts(samples)) {
    if (!is_social_setting(b.type) || b.duration_ms < kSocialMinMs) continue;
    auto lo = std::lower_bound(conversation->begin(), conversation->end(), b.start,
                               [](const auto& c, TimestampMs t) { return c.timestamp < t; });
    std::size_t inferences = 0, talk = 0;
    for (auto it = lo; it != conversation->end() && it->timestamp < b.end; ++it) {
      ++inferences;
      if (it->label == ConversationLabel::voice || it->label == ConversationLabel::noise) ++talk;
    }
    // talk / inferences >= 0.8, in integers
    if (inferences > 0 && 5 * talk >= 4 * inferences) total += b.duration_ms;
  }
  return minutes(total);
}

std::vector<std::string> feature_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : place_features({})) keys.push_back(k);
  keys.push_back("study_duration_min");
  keys.push_back("social_duration_min");
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace sensefeat::places
