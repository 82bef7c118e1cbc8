#ifndef SENSEFEAT_SCREEN_HPP
#define SENSEFEAT_SCREEN_HPP

#include <span>
#include <string>
#include <vector>

#include "sensefeat/features.hpp"
#include "sensefeat/records.hpp"
#include "sensefeat/windowing.hpp"

namespace sensefeat::screen {

enum class BoutKind { interaction, unlocked };

struct InteractionBout {
  TimestampMs start = 0;
  TimestampMs end = 0;
  BoutKind kind = BoutKind::interaction;
  /// Still open at the last event; closed there.
  bool unterminated = false;

  TimestampMs length() const { return end - start; }
};

/**
 * Interaction bouts run from `unlock` to the next `off` or `lock`; unlocked
 * bouts run from `unlock` to the next `lock`. Repeated unlocks inside an open
 * bout do not restart it. Result is ordered by (start, kind).
 */
std::vector<InteractionBout> extract_bouts(std::span<const ScreenEvent> events);

/**
 * Usage features over the events assigned to `slice`. Bouts (from the whole
 * stream) are clipped to the slice. All features are MISSING when the slice
 * has no events.
 */
FeatureMap usage_features(std::span<const ScreenEvent> events,
                          std::span<const InteractionBout> bouts, const TimeSlice& slice,
                          const TimeZone& zone);

std::vector<std::string> feature_keys();

}  // namespace sensefeat::screen

#endif  // SENSEFEAT_SCREEN_HPP
