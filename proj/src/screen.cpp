#include "sensefeat/screen.hpp"

#include <algorithm>
#include <optional>

namespace sensefeat::screen {

namespace {

constexpr std::array<std::string_view, 8> kScalarStems{
    "unlocks_per_min", "interaction_total_min", "unlocked_total_min", "first_unlock_hour",
    "first_on_hour",   "last_unlock_hour",      "last_lock_hour",     "last_on_hour"};

double minutes(TimestampMs ms) { return static_cast<double>(ms) / kMsPerMinute; }

TimestampMs clipped_length(const InteractionBout& b, const TimeSlice& slice) {
  TimestampMs total = 0;
  for (const auto& iv : slice.bounds) {
    const TimestampMs lo = std::max(b.start, iv.start);
    const TimestampMs hi = std::min(b.end, iv.end);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

}  // namespace

std::vector<InteractionBout> extract_bouts(std::span<const ScreenEvent> events) {
  std::vector<InteractionBout> bouts;
  std::optional<TimestampMs> interaction_start;
  std::optional<TimestampMs> unlocked_start;
  auto close = [&](std::optional<TimestampMs>& start, TimestampMs end, BoutKind kind,
                   bool unterminated) {
    if (start && end > *start) bouts.push_back({*start, end, kind, unterminated});
    start.reset();
  };
  for (const auto& e : events) {
    switch (e.status) {
      case ScreenStatus::unlock:
        if (!interaction_start) interaction_start = e.timestamp;
        if (!unlocked_start) unlocked_start = e.timestamp;
        break;
      case ScreenStatus::off:
        close(interaction_start, e.timestamp, BoutKind::interaction, false);
        break;
      case ScreenStatus::lock:
        close(interaction_start, e.timestamp, BoutKind::interaction, false);
        close(unlocked_start, e.timestamp, BoutKind::unlocked, false);
        break;
      case ScreenStatus::on:
        break;
    }
  }
  if (!events.empty()) {
    const TimestampMs last = events.back().timestamp;
    close(interaction_start, last, BoutKind::interaction, true);
    close(unlocked_start, last, BoutKind::unlocked, true);
  }
  std::stable_sort(bouts.begin(), bouts.end(), [](const auto& a, const auto& b) {
    return a.start != b.start ? a.start < b.start : a.kind < b.kind;
  });
  return bouts;
}

FeatureMap usage_features(std::span<const ScreenEvent> events,
                          std::span<const InteractionBout> bouts, const TimeSlice& slice,
                          const TimeZone& zone) {
  FeatureMap out;
  if (events.empty()) {
    for (const auto& k : feature_keys()) out[k] = std::nullopt;
    return out;
  }

  std::size_t unlocks = 0;
  std::optional<TimestampMs> first_unlock, first_on, last_unlock, last_lock, last_on;
  for (const auto& e : events) {
    switch (e.status) {
      case ScreenStatus::unlock:
        ++unlocks;
        if (!first_unlock) first_unlock = e.timestamp;
        last_unlock = e.timestamp;
        break;
      case ScreenStatus::on:
        if (!first_on) first_on = e.timestamp;
        last_on = e.timestamp;
        break;
      case ScreenStatus::lock:
        last_lock = e.timestamp;
        break;
      case ScreenStatus::off:
        break;
    }
  }
  auto hour = [&](const std::optional<TimestampMs>& t) -> FeatureValue {
    if (!t) return std::nullopt;
    return zone.local_hour(*t);
  };

  std::vector<double> interaction, unlocked;
  for (const auto& b : bouts) {
    const TimestampMs len = clipped_length(b, slice);
    if (len <= 0) continue;
    (b.kind == BoutKind::interaction ? interaction : unlocked).push_back(minutes(len));
  }
  auto total = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  };

  const double slice_minutes = minutes(slice.total_ms());
  out["unlocks_per_min"] =
      slice_minutes > 0 ? FeatureValue(static_cast<double>(unlocks) / slice_minutes)
                        : std::nullopt;
  out["interaction_total_min"] = total(interaction);
  out["unlocked_total_min"] = total(unlocked);
  out["first_unlock_hour"] = hour(first_unlock);
  out["first_on_hour"] = hour(first_on);
  out["last_unlock_hour"] = hour(last_unlock);
  out["last_lock_hour"] = hour(last_lock);
  out["last_on_hour"] = hour(last_on);
  put_stats(out, "interaction_bout", "", interaction, true, "_min");
  put_stats(out, "unlocked_bout", "", unlocked, true, "_min");
  return out;
}

std::vector<std::string> feature_keys() {
  std::vector<std::string> keys(kScalarStems.begin(), kScalarStems.end());
  FeatureMap m;
  put_stats(m, "interaction_bout", "", {}, true, "_min");
  put_stats(m, "unlocked_bout", "", {}, true, "_min");
  for (const auto& [k, v] : m) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace sensefeat::screen
