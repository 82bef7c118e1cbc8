#include "sensefeat/windowing.hpp"

#include <absl/time/civil_time.h>

#include <cstdio>

namespace sensefeat {

using std::chrono::sys_days;

TimeZone::TimeZone() : name_("UTC"), zone_(absl::UTCTimeZone()) {}

TimeZone TimeZone::load(const std::string& name) {
  TimeZone tz;
  if (!absl::LoadTimeZone(name, &tz.zone_)) {
    throw std::invalid_argument("unknown time zone '" + name + "'");
  }
  tz.name_ = name;
  return tz;
}

TimestampMs TimeZone::to_utc(CivilDate date, int hour) const {
  const absl::CivilSecond cs(static_cast<int>(date.year()),
                             static_cast<unsigned>(date.month()),
                             static_cast<unsigned>(date.day()), hour, 0, 0);
  return absl::ToUnixMillis(absl::FromCivil(cs, zone_));
}

CivilDate TimeZone::local_date(TimestampMs t) const {
  const absl::CivilDay d = absl::ToCivilDay(absl::FromUnixMillis(t), zone_);
  return CivilDate{std::chrono::year{static_cast<int>(d.year())},
                   std::chrono::month{static_cast<unsigned>(d.month())},
                   std::chrono::day{static_cast<unsigned>(d.day())}};
}

double TimeZone::local_hour(TimestampMs t) const {
  const absl::Time at = absl::FromUnixMillis(t);
  const absl::CivilSecond cs = absl::ToCivilSecond(at, zone_);
  TimestampMs sub_ms = t % kMsPerSecond;
  if (sub_ms < 0) sub_ms += kMsPerSecond;
  return cs.hour() + cs.minute() / 60.0 +
         (static_cast<double>(cs.second()) + static_cast<double>(sub_ms) / 1000.0) / 3600.0;
}

std::string_view to_string(Epoch e) {
  switch (e) {
    case Epoch::morning: return "morning";
    case Epoch::afternoon: return "afternoon";
    case Epoch::evening: return "evening";
    case Epoch::night: return "night";
    case Epoch::all_day: return "all_day";
  }
  return "?";
}

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::daily: return "daily";
    case Granularity::weekly: return "weekly";
    case Granularity::weekdays: return "weekdays";
    case Granularity::weekends: return "weekends";
    case Granularity::half_term: return "half_term";
    case Granularity::full_term: return "full_term";
  }
  return "?";
}

std::optional<Epoch> parse_epoch(std::string_view s) {
  for (Epoch e : kAllEpochs) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

std::optional<Granularity> parse_granularity(std::string_view s) {
  for (Granularity g : kAllGranularities) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

std::pair<int, int> epoch_hours(Epoch e) {
  switch (e) {
    case Epoch::night: return {0, 6};
    case Epoch::morning: return {6, 12};
    case Epoch::afternoon: return {12, 18};
    case Epoch::evening: return {18, 24};
    case Epoch::all_day: return {0, 24};
  }
  return {0, 24};
}

Epoch epoch_of_hour(double local_hour) {
  if (local_hour < 6.0) return Epoch::night;
  if (local_hour < 12.0) return Epoch::morning;
  if (local_hour < 18.0) return Epoch::afternoon;
  return Epoch::evening;
}

std::string TimeSlice::feature_suffix() const {
  std::string s = std::string(to_string(epoch)) + ":" + std::string(to_string(granularity));
  if (granularity == Granularity::half_term) s += index == 1 ? ":first" : ":second";
  return s;
}

std::string TimeSlice::id() const {
  std::string s = std::string(to_string(epoch)) + ":" + std::string(to_string(granularity)) + ":";
  switch (granularity) {
    case Granularity::half_term:
      return s + (index == 1 ? "first" : "second");
    case Granularity::full_term:
      return s + "all";
    default: {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%03d", index);
      return s + buf;
    }
  }
}

TimestampMs TimeSlice::total_ms() const {
  TimestampMs total = 0;
  for (const auto& iv : bounds) total += iv.length();
  return total;
}

bool TimeSlice::contains(TimestampMs t) const {
  auto it = std::upper_bound(bounds.begin(), bounds.end(), t,
                             [](TimestampMs v, const Interval& iv) { return v < iv.start; });
  return it != bounds.begin() && std::prev(it)->contains(t);
}

int StudyCalendar::week_of(sys_days day) const {
  return static_cast<int>((day - first_monday).count() / 7) + 1;
}

StudyCalendar resolve_calendar(const StudyConfig& config) {
  if (!config.start.ok() || !config.end.ok()) throw ConfigError("invalid study start/end date");
  StudyCalendar cal;
  cal.start = sys_days{config.start};
  cal.end = sys_days{config.end};
  if (cal.start > cal.end) throw ConfigError("study start is after study end");
  try {
    cal.zone = TimeZone::load(config.timezone);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (config.half_term_split) {
    if (!config.half_term_split->ok()) throw ConfigError("invalid half_term_split date");
    cal.half_term_split = sys_days{*config.half_term_split};
    if (!(cal.start < cal.half_term_split && cal.half_term_split < cal.end)) {
      throw ConfigError("half_term_split must lie strictly between start and end");
    }
  } else {
    cal.half_term_split = cal.start + std::chrono::days{cal.num_days() / 2};
  }

  const std::chrono::weekday wd{cal.start};
  cal.first_monday = cal.start - (wd - std::chrono::Monday);
  const int span_weeks = cal.week_of(cal.end);
  if (config.weeks_n) {
    if (*config.weeks_n < 1) throw ConfigError("weeks_n must be >= 1");
    cal.weeks_n = *config.weeks_n;
  } else {
    cal.weeks_n = span_weeks;
  }
  if (config.weeks_m) {
    if (!(1 < *config.weeks_m && *config.weeks_m < cal.weeks_n)) {
      throw ConfigError("weeks_m must satisfy 1 < m < n");
    }
    cal.weeks_m = *config.weeks_m;
  } else {
    cal.weeks_m = (cal.weeks_n + 1) / 2;
  }
  return cal;
}

namespace {

void append_merged(std::vector<Interval>& out, Interval iv) {
  if (iv.length() <= 0) return;
  if (!out.empty() && out.back().end == iv.start) {
    out.back().end = iv.end;
  } else {
    out.push_back(iv);
  }
}

TimeSlice make_slice(const StudyCalendar& cal, Epoch epoch, Granularity g, int index,
                     const std::vector<sys_days>& days) {
  TimeSlice s{epoch, g, index, {}};
  const auto [h0, h1] = epoch_hours(epoch);
  for (sys_days d : days) {
    const CivilDate date{d};
    append_merged(s.bounds, {cal.zone.to_utc(date, h0), cal.zone.to_utc(date, h1)});
  }
  return s;
}

}  // namespace

std::vector<TimeSlice> build_slices(const StudyCalendar& cal) {
  std::vector<sys_days> all_days;
  for (sys_days d = cal.start; d <= cal.end; d += std::chrono::days{1}) all_days.push_back(d);
  const int weeks = cal.week_of(cal.end);

  std::vector<TimeSlice> slices;
  for (Epoch epoch : kAllEpochs) {
    for (Granularity g : kAllGranularities) {
      auto add = [&](int index, const std::vector<sys_days>& days) {
        if (!days.empty()) slices.push_back(make_slice(cal, epoch, g, index, days));
      };
      switch (g) {
        case Granularity::daily:
          for (std::size_t i = 0; i < all_days.size(); ++i) {
            add(static_cast<int>(i) + 1, {all_days[i]});
          }
          break;
        case Granularity::weekly:
        case Granularity::weekdays:
        case Granularity::weekends:
          for (int w = 1; w <= weeks; ++w) {
            std::vector<sys_days> days;
            for (sys_days d : all_days) {
              if (cal.week_of(d) != w) continue;
              const bool weekend = std::chrono::weekday{d}.iso_encoding() >= 6;
              if (g == Granularity::weekdays && weekend) continue;
              if (g == Granularity::weekends && !weekend) continue;
              days.push_back(d);
            }
            add(w, days);
          }
          break;
        case Granularity::half_term: {
          std::vector<sys_days> first, second;
          for (sys_days d : all_days) (d < cal.half_term_split ? first : second).push_back(d);
          add(1, first);
          add(2, second);
          break;
        }
        case Granularity::full_term:
          add(1, all_days);
          break;
      }
    }
  }
  return slices;
}

std::vector<TimeSlice> build_slices(const StudyConfig& config) {
  return build_slices(resolve_calendar(config));
}

}  // namespace sensefeat
