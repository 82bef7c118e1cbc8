#ifndef SENSEFEAT_FITBIT_HPP
#define SENSEFEAT_FITBIT_HPP

#include <span>
#include <string>
#include <vector>

#include "sensefeat/features.hpp"
#include "sensefeat/records.hpp"

namespace sensefeat::fitbit {

struct SleepBout {
  SleepState state = SleepState::asleep;
  TimestampMs start = 0;
  TimestampMs end = 0;  // exclusive: last minute + 1 minute
  int length_min = 0;
};

/// Maximal runs of consecutive minutes in one state. Unknown minutes and
/// missing minutes break runs; unknown runs are not reported.
std::vector<SleepBout> sleep_bouts(std::span<const SleepMinute> minutes);

struct SleepEfficiency {
  double weak = 0.0;    // (asleep + restless) / (asleep + restless + awake)
  double strong = 0.0;  // asleep / (asleep + restless + awake)
};

/// nullopt when asleep + restless + awake is zero.
std::optional<SleepEfficiency> sleep_efficiency(std::int64_t asleep, std::int64_t restless,
                                                std::int64_t awake);

FeatureMap sleep_features(std::span<const SleepMinute> minutes);

enum class ActivityKind { sedentary, active };

struct ActivityBout {
  ActivityKind kind = ActivityKind::sedentary;
  TimestampMs start = 0;
  TimestampMs end = 0;  // exclusive
  int bins = 0;
  std::int64_t steps = 0;

  double length_min() const { return bins * 5.0; }
};

/**
 * Segments 5-minute bins into alternating sedentary/active bouts. A bin under
 * 10 steps is sedentary, over 10 is active; exactly 10 keeps the current
 * bout's kind (sedentary when no bout is open). More than one missing bin
 * between consecutive bins ends the current bout.
 */
std::vector<ActivityBout> activity_bouts(std::span<const StepBin> bins);

FeatureMap steps_features(std::span<const StepBin> bins);

std::vector<std::string> sleep_feature_keys();
std::vector<std::string> steps_feature_keys();

}  // namespace sensefeat::fitbit

#endif  // SENSEFEAT_FITBIT_HPP
