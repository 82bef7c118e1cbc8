#ifndef SENSEFEAT_CATALOG_HPP
#define SENSEFEAT_CATALOG_HPP

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sensefeat/features.hpp"
#include "sensefeat/windowing.hpp"

namespace sensefeat {

/// Feature-producing sensors; each prefixes its feature names.
enum class Sensor { bluetooth, calls, location, places, screen, sleep, steps };

inline constexpr std::array<Sensor, 7> kAllSensors{Sensor::bluetooth, Sensor::calls,
                                                   Sensor::location,  Sensor::places,
                                                   Sensor::screen,    Sensor::sleep,
                                                   Sensor::steps};

std::string_view to_string(Sensor s);
std::optional<Sensor> parse_sensor(std::string_view s);

/// Feature keys (`<stem>[:<scope>]`) a sensor emits for every slice.
std::vector<std::string> sensor_feature_keys(Sensor s);

/// `<sensor>:<key>:<epoch>:<granularity>[:first|second]`
std::string feature_name(Sensor sensor, std::string_view key, const TimeSlice& slice);
/// `<feature>:change:<field>`
std::string change_feature_name(std::string_view weekly_feature, std::string_view field);

/// Slice id used for change-feature rows, which summarize the whole study.
inline constexpr std::string_view kStudySliceId = "study";

struct CatalogSelection {
  std::set<Sensor> sensors{kAllSensors.begin(), kAllSensors.end()};
  std::set<Epoch> epochs{kAllEpochs.begin(), kAllEpochs.end()};
  std::set<Granularity> granularities{kAllGranularities.begin(), kAllGranularities.end()};
};

/// Every feature name the selection can emit, sorted, including change
/// features for weekly features when weekly granularity is selected.
std::vector<std::string> enumerate_catalog(const CatalogSelection& selection);

struct FeatureRow {
  std::string participant;
  std::string feature;
  std::string slice;
  FeatureValue value;

  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

enum class MatrixFormat { csv, jsonl };

std::optional<MatrixFormat> parse_matrix_format(std::string_view s);

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sorts by (participant, feature, slice).
void sort_rows(std::vector<FeatureRow>& rows);

/// Shortest decimal text that parses back to the same double.
std::string format_value(double v);

/**
 * Long-format matrix with header `participant,feature,slice,value`. MISSING
 * is an empty field in CSV and null in JSONL. Rows are written sorted.
 * Throws OutputError for an unwritable path or a non-finite value.
 */
void write_matrix(std::vector<FeatureRow> rows, const std::filesystem::path& path,
                  MatrixFormat format);
std::vector<FeatureRow> read_matrix(const std::filesystem::path& path, MatrixFormat format);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace sensefeat

#endif  // SENSEFEAT_CATALOG_HPP
