#ifndef SENSEFEAT_INGEST_HPP
#define SENSEFEAT_INGEST_HPP

#include <algorithm>
#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "sensefeat/records.hpp"

namespace sensefeat {

enum class SensorKind { bluetooth, calls, location, screen, sleep, steps, conversation, contacts };

std::string_view to_string(SensorKind kind);
std::optional<SensorKind> parse_sensor_kind(std::string_view s);
/// Exact CSV header expected for a sensor file.
std::string_view expected_header(SensorKind kind);
/// File name inside a participant directory, e.g. "bluetooth.csv".
std::string file_name(SensorKind kind);

/// Structural failure: missing file or header mismatch.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

template <typename Record>
struct LoadResult {
  std::vector<Record> records;
  std::size_t rejected = 0;
  std::vector<RowError> errors;
};

LoadResult<BluetoothScan> load_bluetooth(const std::filesystem::path& path);
LoadResult<CallRecord> load_calls(const std::filesystem::path& path);
LoadResult<LocationFix> load_location(const std::filesystem::path& path);
LoadResult<ScreenEvent> load_screen(const std::filesystem::path& path);
LoadResult<SleepMinute> load_sleep(const std::filesystem::path& path);
LoadResult<StepBin> load_steps(const std::filesystem::path& path);
LoadResult<ConversationInference> load_conversation(const std::filesystem::path& path);

struct ContactLoadResult {
  ContactDirectory directory;
  std::size_t rejected = 0;
  std::vector<RowError> errors;
};
ContactLoadResult load_contacts(const std::filesystem::path& path);

/// Stable sort by timestamp, then drop exact duplicates. Returns the number
/// of records removed.
template <typename Record>
std::size_t sort_and_dedup(std::vector<Record>& records) {
  std::stable_sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
    return a.time() < b.time();
  });
  std::vector<Record> kept;
  kept.reserve(records.size());
  std::size_t group_start = 0;
  for (auto& r : records) {
    if (!kept.empty() && kept.back().time() != r.time()) group_start = kept.size();
    const bool duplicate =
        std::find(kept.begin() + static_cast<std::ptrdiff_t>(group_start), kept.end(), r) !=
        kept.end();
    if (!duplicate) kept.push_back(std::move(r));
  }
  const std::size_t removed = records.size() - kept.size();
  records = std::move(kept);
  return removed;
}

/// All streams of one participant. Absent files stay nullopt.
struct ParticipantBundle {
  std::string participant;
  std::optional<LoadResult<BluetoothScan>> bluetooth;
  std::optional<LoadResult<CallRecord>> calls;
  std::optional<LoadResult<LocationFix>> location;
  std::optional<LoadResult<ScreenEvent>> screen;
  std::optional<LoadResult<SleepMinute>> sleep;
  std::optional<LoadResult<StepBin>> steps;
  std::optional<LoadResult<ConversationInference>> conversation;
  std::optional<ContactLoadResult> contacts;
};

/// Loads every `<sensor>.csv` present in `dir`.
ParticipantBundle load_participant(const std::filesystem::path& dir, std::string participant);

struct GapHistogram {
  // Upper bounds (exclusive) in ms for every bucket but the last.
  static constexpr std::array<TimestampMs, 5> kEdges{
      kMsPerMinute, 5 * kMsPerMinute, 30 * kMsPerMinute, kMsPerHour, 2 * kMsPerHour};
  static constexpr std::array<std::string_view, 6> kLabels{
      "<1m", "1m-5m", "5m-30m", "30m-1h", "1h-2h", ">=2h"};
  std::array<std::size_t, 6> counts{};

  void add(TimestampMs gap);
};

struct SensorCoverage {
  SensorKind kind = SensorKind::bluetooth;
  bool present = false;
  std::size_t records = 0;
  std::size_t rejected = 0;
  std::optional<TimestampMs> first;
  std::optional<TimestampMs> last;
  GapHistogram gaps;
  /// UTC day (days since epoch) -> fraction of the day's minutes covered.
  std::map<std::int64_t, double> daily_coverage;
  std::vector<RowError> violations;
};

struct ValidationReport {
  std::string participant;
  std::vector<SensorCoverage> sensors;

  const SensorCoverage& coverage(SensorKind kind) const;
};

ValidationReport validate_dataset(const ParticipantBundle& bundle);

nlohmann::json report_json(const ValidationReport& report);

}  // namespace sensefeat

#endif  // SENSEFEAT_INGEST_HPP
