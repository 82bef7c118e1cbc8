#ifndef SENSEFEAT_PLACES_HPP
#define SENSEFEAT_PLACES_HPP

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sensefeat/features.hpp"
#include "sensefeat/records.hpp"
#include "sensefeat/screen.hpp"

namespace sensefeat::places {

enum class PlaceType {
  greek_social,
  greek_all,
  student_apartment,
  residential_hall,
  athletic,
  green_space,
  academic,
  off_campus,
};

inline constexpr std::array<PlaceType, 8> kAllPlaceTypes{
    PlaceType::greek_social, PlaceType::greek_all,   PlaceType::student_apartment,
    PlaceType::residential_hall, PlaceType::athletic, PlaceType::green_space,
    PlaceType::academic,     PlaceType::off_campus};

std::string_view to_string(PlaceType t);
std::optional<PlaceType> parse_place_type(std::string_view s);

/// Housing-related types plus green space count as social settings.
bool is_social_setting(PlaceType t);

struct PlacePolygon {
  std::vector<GeoPoint> ring;  // implicitly closed
  PlaceType type = PlaceType::off_campus;
};

struct PlaceMap {
  std::vector<PlacePolygon> polygons;
};

class PlaceMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses `[{"type": "...", "polygon": [[lat, lon], ...]}, ...]`.
PlaceMap parse_place_map(const std::string& json_text);
PlaceMap load_place_map(const std::filesystem::path& path);

/// First polygon in file order containing `p` (boundary included);
/// off_campus when none does.
PlaceType point_in_place(const GeoPoint& p, const PlaceMap& map);

struct PlaceSample {
  TimestampMs timestamp = 0;
  PlaceType type = PlaceType::off_campus;
  TimestampMs duration_ms = 0;  // gap-capped time to the next fix
  bool after_gap = false;       // preceded by an interval over the gap cap

  TimestampMs time() const { return timestamp; }
};

/// Classifies a sorted fix stream. Durations follow the location gap rule.
std::vector<PlaceSample> classify_fixes(std::span<const LocationFix> fixes, const PlaceMap& map,
                                        TimestampMs gap_cap_ms = 300 * kMsPerSecond);

struct PlaceBout {
  PlaceType type = PlaceType::off_campus;
  TimestampMs start = 0;
  TimestampMs end = 0;
  TimestampMs duration_ms = 0;

  double minutes() const { return static_cast<double>(duration_ms) / kMsPerMinute; }
};

/// Maximal runs of one place type, split by type changes and sampling gaps.
/// Runs with zero duration are dropped.
std::vector<PlaceBout> extract_bouts(std::span<const PlaceSample> samples);

/// Per-type dwell, share, bout counts and bout-length statistics, plus the
/// number of type transitions, over samples already assigned to a slice.
FeatureMap place_features(std::span<const PlaceSample> samples);

/**
 * Minutes in academic bouts of 30+ minutes with every overlapping 5-minute
 * step bin under 10 steps and no overlapping phone interaction. nullopt when
 * the step or screen stream is unavailable.
 */
std::optional<double> study_duration(std::span<const PlaceSample> samples,
                                     const std::optional<std::span<const StepBin>>& steps,
                                     const std::optional<std::span<const screen::InteractionBout>>&
                                         interactions);

/**
 * Minutes in social-setting bouts of 20+ minutes where at least 80% of the
 * conversation inferences inside the bout are voice or noise. nullopt when
 * the conversation stream is unavailable.
 */
std::optional<double> social_duration(
    std::span<const PlaceSample> samples,
    const std::optional<std::span<const ConversationInference>>& conversation);

std::vector<std::string> feature_keys();

}  // namespace sensefeat::places

#endif  // SENSEFEAT_PLACES_HPP
