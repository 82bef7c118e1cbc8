#ifndef SENSEFEAT_WINDOWING_HPP
#define SENSEFEAT_WINDOWING_HPP

#include <algorithm>
#include <chrono>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <absl/time/time.h>

#include "sensefeat/records.hpp"

namespace sensefeat {

using CivilDate = std::chrono::year_month_day;

/// A named IANA zone. Local dates and clock hours are converted through it.
class TimeZone {
 public:
  /// UTC.
  TimeZone();
  /// Throws std::invalid_argument for an unknown zone name.
  static TimeZone load(const std::string& name);

  const std::string& name() const { return name_; }

  /// UTC instant of `date` at local `hour`:00 (hour may be 24 for the next
  /// midnight). Skipped or repeated civil times resolve to the pre-transition
  /// offset.
  TimestampMs to_utc(CivilDate date, int hour) const;
  CivilDate local_date(TimestampMs t) const;
  /// Local wall-clock hour of day as a fraction in [0, 24).
  double local_hour(TimestampMs t) const;

 private:
  std::string name_;
  absl::TimeZone zone_;
};

enum class Epoch { morning, afternoon, evening, night, all_day };
enum class Granularity { daily, weekly, weekdays, weekends, half_term, full_term };

inline constexpr std::array<Epoch, 5> kAllEpochs{Epoch::morning, Epoch::afternoon,
                                                 Epoch::evening, Epoch::night, Epoch::all_day};
inline constexpr std::array<Granularity, 6> kAllGranularities{
    Granularity::daily,    Granularity::weekly,    Granularity::weekdays,
    Granularity::weekends, Granularity::half_term, Granularity::full_term};

std::string_view to_string(Epoch e);
std::string_view to_string(Granularity g);
std::optional<Epoch> parse_epoch(std::string_view s);
std::optional<Granularity> parse_granularity(std::string_view s);

/// Local clock hours [begin, end) covered by an epoch.
std::pair<int, int> epoch_hours(Epoch e);
/// Epoch (one of the four named ones) containing a local hour of day.
Epoch epoch_of_hour(double local_hour);

struct Interval {
  TimestampMs start = 0;  // inclusive
  TimestampMs end = 0;    // exclusive

  TimestampMs length() const { return end - start; }
  bool contains(TimestampMs t) const { return t >= start && t < end; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct TimeSlice {
  Epoch epoch = Epoch::all_day;
  Granularity granularity = Granularity::daily;
  /// 1-based day or week ordinal; 1/2 for the half terms; 1 for full term.
  int index = 1;
  std::vector<Interval> bounds;

  /// `<epoch>:<granularity>[:first|second]`, used inside feature names.
  std::string feature_suffix() const;
  /// Unique, sortable id such as `morning:daily:003`.
  std::string id() const;
  TimestampMs total_ms() const;
  bool contains(TimestampMs t) const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StudyConfig {
  CivilDate start;  // first study day, inclusive
  CivilDate end;    // last study day, inclusive
  std::string timezone = "UTC";
  std::optional<CivilDate> half_term_split;  // first day of the second half
  std::optional<int> weeks_n;
  std::optional<int> weeks_m;
};

/// Study calendar resolved from a StudyConfig: defaults filled in, zone loaded.
struct StudyCalendar {
  std::chrono::sys_days start;
  std::chrono::sys_days end;  // inclusive
  std::chrono::sys_days half_term_split;
  std::chrono::sys_days first_monday;  // Monday of week 1
  int weeks_n = 1;
  int weeks_m = 1;
  TimeZone zone;

  int num_days() const { return (end - start).count() + 1; }
  /// 1-based week containing a study day.
  int week_of(std::chrono::sys_days day) const;
};

/// Validates the config and fills defaults: half-term split at the middle
/// day, weeks n from the span of ISO weeks touched, m = ceil(n / 2).
StudyCalendar resolve_calendar(const StudyConfig& config);

/// All slices, ordered by (epoch, granularity, index). Slices with no days
/// (e.g. weekends of a week cut short by the study end) are omitted.
std::vector<TimeSlice> build_slices(const StudyCalendar& calendar);
std::vector<TimeSlice> build_slices(const StudyConfig& config);

/// Records falling inside the slice's intervals, in input order. `records`
/// must be sorted by time().
template <typename Record>
std::vector<Record> assign(std::span<const Record> records, const TimeSlice& slice) {
  std::vector<Record> out;
  auto key = [](const Record& r, TimestampMs t) { return r.time() < t; };
  for (const Interval& iv : slice.bounds) {
    auto lo = std::lower_bound(records.begin(), records.end(), iv.start, key);
    auto hi = std::lower_bound(lo, records.end(), iv.end, key);
    out.insert(out.end(), lo, hi);
  }
  return out;
}

template <typename Record>
std::vector<Record> assign(const std::vector<Record>& records, const TimeSlice& slice) {
  return assign(std::span<const Record>(records), slice);
}

}  // namespace sensefeat

#endif  // SENSEFEAT_WINDOWING_HPP
