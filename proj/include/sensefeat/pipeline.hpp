#ifndef SENSEFEAT_PIPELINE_HPP
#define SENSEFEAT_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sensefeat/catalog.hpp"
#include "sensefeat/config.hpp"
#include "sensefeat/ingest.hpp"

namespace sensefeat {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Exit codes of a run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitPartialFailure = 2;

struct RunOptions {
  std::filesystem::path config_path;
  std::filesystem::path input_dir;
  std::filesystem::path output_path;
  MatrixFormat format = MatrixFormat::csv;
  std::optional<std::set<Sensor>> sensors;
  std::optional<std::set<std::string>> participants;
  std::optional<std::set<Epoch>> epochs;
  std::optional<std::set<Granularity>> granularities;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

/**
 * Feature rows for a set of participants: slice-level features for every
 * selected sensor, then change features from the weekly rows. Work fans out
 * over (participant, slice) tasks on `jobs` threads; the result is sorted and
 * independent of scheduling.
 *
 * Participants whose preparation throws are reported in `failures` and
 * contribute no rows.
 */
struct ExtractionResult {
  std::vector<FeatureRow> rows;
  std::vector<std::pair<std::string, std::string>> failures;  // participant, error
};

ExtractionResult extract_features(const std::vector<ParticipantBundle>& bundles,
                                  const RunConfig& config, const CatalogSelection& selection,
                                  std::uint64_t seed, int jobs);

/// Change-feature rows from weekly rows of one participant.
std::vector<FeatureRow> change_rows(const std::vector<FeatureRow>& weekly_rows,
                                    const StudyCalendar& calendar);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view data);

/// End-to-end run: config, ingest, features, matrix, report and manifest.
/// Returns the process exit code.
int run(const RunOptions& options);

}  // namespace sensefeat

#endif  // SENSEFEAT_PIPELINE_HPP
