#include "sensefeat/fitbit.hpp"

#include <algorithm>
#include <array>

namespace sensefeat::fitbit {

namespace {

constexpr std::array<SleepState, 3> kBoutStates{SleepState::asleep, SleepState::restless,
                                                SleepState::awake};
constexpr std::int64_t kStepThreshold = 10;

}  // namespace

std::vector<SleepBout> sleep_bouts(std::span<const SleepMinute> minutes) {
  std::vector<SleepBout> bouts;
  std::optional<SleepBout> cur;
  auto flush = [&] {
    if (cur) bouts.push_back(*cur);
    cur.reset();
  };
  for (const auto& m : minutes) {
    if (cur && (m.state != cur->state || m.timestamp != cur->end)) flush();
    if (m.state == SleepState::unknown) continue;
    if (!cur) cur = SleepBout{m.state, m.timestamp, m.timestamp, 0};
    cur->end = m.timestamp + kMsPerMinute;
    ++cur->length_min;
  }
  flush();
  return bouts;
}

std::optional<SleepEfficiency> sleep_efficiency(std::int64_t asleep, std::int64_t restless,
                                                std::int64_t awake) {
  const std::int64_t denom = asleep + restless + awake;
  if (denom <= 0) return std::nullopt;
  const double d = static_cast<double>(denom);
  return SleepEfficiency{static_cast<double>(asleep + restless) / d,
                         static_cast<double>(asleep) / d};
}

FeatureMap sleep_features(std::span<const SleepMinute> minutes) {
  std::array<std::int64_t, 4> counts{};
  for (const auto& m : minutes) ++counts[static_cast<std::size_t>(m.state)];

  FeatureMap out;
  for (SleepState s : {SleepState::asleep, SleepState::restless, SleepState::awake,
                       SleepState::unknown}) {
    out[feature_key("count", to_string(s))] =
        static_cast<double>(counts[static_cast<std::size_t>(s)]);
  }
  const auto eff = sleep_efficiency(counts[0], counts[1], counts[2]);
  out["efficiency_weak"] = eff ? FeatureValue(eff->weak) : std::nullopt;
  out["efficiency_strong"] = eff ? FeatureValue(eff->strong) : std::nullopt;

  const auto bouts = sleep_bouts(minutes);
  for (SleepState state : kBoutStates) {
    const auto scope = to_string(state);
    std::vector<double> lengths;
    const SleepBout* longest = nullptr;
    const SleepBout* shortest = nullptr;
    for (const auto& b : bouts) {
      if (b.state != state) continue;
      lengths.push_back(b.length_min);
      if (!longest || b.length_min > longest->length_min) longest = &b;
      if (!shortest || b.length_min < shortest->length_min) shortest = &b;
    }
    const auto s = summarize(lengths);
    out[feature_key("bout_count", scope)] = static_cast<double>(lengths.size());
    out[feature_key("bout_sum_min", scope)] = s ? s->sum : 0.0;
    out[feature_key("bout_mean_min", scope)] = s ? FeatureValue(s->mean) : std::nullopt;
    out[feature_key("bout_max_min", scope)] = s ? FeatureValue(s->max) : std::nullopt;
    out[feature_key("bout_min_min", scope)] = s ? FeatureValue(s->min) : std::nullopt;
    auto ts = [](const SleepBout* b, bool start) -> FeatureValue {
      if (!b) return std::nullopt;
      return static_cast<double>(start ? b->start : b->end);
    };
    out[feature_key("longest_start", scope)] = ts(longest, true);
    out[feature_key("longest_end", scope)] = ts(longest, false);
    out[feature_key("shortest_start", scope)] = ts(shortest, true);
    out[feature_key("shortest_end", scope)] = ts(shortest, false);
  }
  return out;
}

std::vector<ActivityBout> activity_bouts(std::span<const StepBin> bins) {
  std::vector<ActivityBout> bouts;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const auto& bin = bins[i];
    const bool gap = i > 0 && bin.start - bins[i - 1].start > 2 * kStepBinMs;
    std::optional<ActivityKind> kind;
    if (bin.steps < kStepThreshold) kind = ActivityKind::sedentary;
    if (bin.steps > kStepThreshold) kind = ActivityKind::active;

    const bool open = !bouts.empty() && !gap && i > 0;
    if (!kind) kind = open ? bouts.back().kind : ActivityKind::sedentary;
    if (!open || bouts.back().kind != *kind) {
      bouts.push_back({*kind, bin.start, bin.start, 0, 0});
    }
    auto& b = bouts.back();
    b.end = bin.start + kStepBinMs;
    ++b.bins;
    b.steps += bin.steps;
  }
  return bouts;
}

FeatureMap steps_features(std::span<const StepBin> bins) {
  FeatureMap out;
  if (bins.empty()) {
    for (const auto& k : steps_feature_keys()) out[k] = std::nullopt;
    return out;
  }
  std::int64_t total = 0, max_bin = 0;
  for (const auto& b : bins) {
    total += b.steps;
    max_bin = std::max(max_bin, b.steps);
  }
  std::vector<double> active_len, sedentary_len, active_steps;
  for (const auto& b : activity_bouts(bins)) {
    if (b.kind == ActivityKind::active) {
      active_len.push_back(b.length_min());
      active_steps.push_back(static_cast<double>(b.steps));
    } else {
      sedentary_len.push_back(b.length_min());
    }
  }
  out["total_steps"] = static_cast<double>(total);
  out["max_steps_5min"] = static_cast<double>(max_bin);
  out["active_bouts"] = static_cast<double>(active_len.size());
  out["sedentary_bouts"] = static_cast<double>(sedentary_len.size());
  put_stats(out, "active_bout", "", active_len, false, "_min");
  put_stats(out, "sedentary_bout", "", sedentary_len, false, "_min");
  put_stats(out, "active_bout_steps", "", active_steps, false);
  return out;
}

std::vector<std::string> sleep_feature_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : sleep_features({})) keys.push_back(k);
  return keys;
}

std::vector<std::string> steps_feature_keys() {
  std::vector<std::string> keys{"total_steps", "max_steps_5min", "active_bouts",
                                "sedentary_bouts"};
  FeatureMap m;
  put_stats(m, "active_bout", "", {}, false, "_min");
  put_stats(m, "sedentary_bout", "", {}, false, "_min");
  put_stats(m, "active_bout_steps", "", {}, false);
  for (const auto& [k, v] : m) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace sensefeat::fitbit
