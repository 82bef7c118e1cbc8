#include "sensefeat/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sensefeat/bluetooth.hpp"
#include "sensefeat/calls.hpp"
#include "sensefeat/change.hpp"
#include "sensefeat/fitbit.hpp"
#include "sensefeat/location.hpp"
#include "sensefeat/places.hpp"
#include "sensefeat/screen.hpp"

namespace sensefeat {

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static const auto instance = [] {
    auto l = spdlog::stderr_color_mt("sensefeat");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("SENSEFEAT_LOG")) {
      const std::string v(env);
      if (v == "error") l->set_level(spdlog::level::err);
      if (v == "warn") l->set_level(spdlog::level::warn);
      if (v == "info") l->set_level(spdlog::level::info);
      if (v == "debug") l->set_level(spdlog::level::debug);
    }
    return l;
  }();
  return instance;
}

// Study-level state computed once per participant before slice fan-out.
struct Prepared {
  const ParticipantBundle* bundle = nullptr;
  StudyCalendar calendar;
  std::vector<TimeSlice> slices;
  std::optional<bluetooth::DeviceOwnership> ownership;
  std::optional<std::vector<location::MotionSample>> motion;
  std::optional<location::SignificantPlaces> global_places;
  std::optional<location::HomeModel> home;
  std::optional<std::vector<places::PlaceSample>> place_samples;
  std::optional<std::vector<screen::InteractionBout>> screen_bouts;
};

template <typename Record>
std::span<const Record> records_of(const std::optional<LoadResult<Record>>& stream) {
  return stream ? std::span<const Record>(stream->records) : std::span<const Record>();
}

Prepared prepare(const ParticipantBundle& bundle, const RunConfig& config,
                 const CatalogSelection& selection, const std::optional<places::PlaceMap>& map,
                 std::uint64_t seed) {
  Prepared p;
  p.bundle = &bundle;
  p.calendar = resolve_calendar(config.study);
  const auto all_slices = build_slices(p.calendar);
  for (const auto& s : all_slices) {
    if (selection.epochs.count(s.epoch) && selection.granularities.count(s.granularity)) {
      p.slices.push_back(s);
    }
  }
  const auto wants = [&](Sensor s) { return selection.sensors.count(s) > 0; };

  if (wants(Sensor::bluetooth) && bundle.bluetooth) {
    p.ownership = bluetooth::cluster_devices(bundle.bluetooth->records, seed, p.calendar.zone);
  }
  if (wants(Sensor::location) && bundle.location) {
    p.motion = location::label_motion(bundle.location->records, config.location);
    p.global_places =
        location::significant_places(*p.motion, location::PlaceScope::global, config.location);
    for (const auto& s : all_slices) {
      if (s.epoch == Epoch::night && s.granularity == Granularity::full_term) {
        p.home = location::infer_home(assign(bundle.location->records, s), config.location);
      }
    }
  }
  if (wants(Sensor::places) && bundle.location && map) {
    p.place_samples =
        places::classify_fixes(bundle.location->records, *map, config.location.gap_cap_ms());
  }
  if ((wants(Sensor::screen) || wants(Sensor::places)) && bundle.screen) {
    p.screen_bouts = screen::extract_bouts(bundle.screen->records);
  }
  return p;
}

void emit(std::vector<FeatureRow>& rows, const std::string& participant, Sensor sensor,
          const FeatureMap& features, const TimeSlice& slice) {
  const std::string slice_id = slice.id();
  for (const auto& [key, value] : features) {
    FeatureValue v = value;
    if (v && !std::isfinite(*v)) v.reset();
    rows.push_back({participant, feature_name(sensor, key, slice), slice_id, v});
  }
}

FeatureMap all_missing(Sensor sensor) {
  FeatureMap m;
  for (const auto& k : sensor_feature_keys(sensor)) m[k] = std::nullopt;
  return m;
}

std::vector<FeatureRow> slice_rows(const Prepared& p, const RunConfig& config,
                                   const CatalogSelection& selection, const TimeSlice& slice) {
  const ParticipantBundle& b = *p.bundle;
  std::vector<FeatureRow> rows;
  for (Sensor sensor : selection.sensors) {
    FeatureMap f;
    switch (sensor) {
      case Sensor::bluetooth:
        f = p.ownership ? bluetooth::bluetooth_features(assign(b.bluetooth->records, slice),
                                                        *p.ownership)
                        : all_missing(sensor);
        break;
      case Sensor::calls:
        f = b.calls ? calls::call_features(assign(b.calls->records, slice),
                                           b.contacts ? b.contacts->directory : ContactDirectory{})
                    : all_missing(sensor);
        break;
      case Sensor::location:
        if (p.motion) {
          const auto samples = assign(*p.motion, slice);
          const auto local =
              location::significant_places(samples, location::PlaceScope::local, config.location);
          f = location::location_features(samples, *p.global_places, local, p.home);
        } else {
          f = all_missing(sensor);
        }
        break;
      case Sensor::places:
        if (p.place_samples) {
          const auto samples = assign(*p.place_samples, slice);
          f = places::place_features(samples);
          std::optional<std::span<const StepBin>> steps;
          if (b.steps) steps = std::span<const StepBin>(b.steps->records);
          std::optional<std::span<const screen::InteractionBout>> interactions;
          if (p.screen_bouts) interactions = std::span<const screen::InteractionBout>(*p.screen_bouts);
          std::optional<std::span<const ConversationInference>> conversation;
          if (b.conversation) {
            conversation = std::span<const ConversationInference>(b.conversation->records);
          }
          f["study_duration_min"] = places::study_duration(samples, steps, interactions);
          f["social_duration_min"] = places::social_duration(samples, conversation);
        } else {
          f = all_missing(sensor);
        }
        break;
      case Sensor::screen:
        f = b.screen ? screen::usage_features(assign(b.screen->records, slice), *p.screen_bouts,
                                              slice, p.calendar.zone)
                     : all_missing(sensor);
        break;
      case Sensor::sleep:
        f = b.sleep ? fitbit::sleep_features(assign(b.sleep->records, slice))
                    : all_missing(sensor);
        break;
      case Sensor::steps:
        f = b.steps ? fitbit::steps_features(assign(b.steps->records, slice))
                    : all_missing(sensor);
        break;
    }
    emit(rows, b.participant, sensor, f, slice);
  }
  return rows;
}

int week_index_of(std::string_view slice_id) {
  const auto pos = slice_id.rfind(':');
  return std::atoi(std::string(slice_id.substr(pos + 1)).c_str());
}

}  // namespace

std::vector<FeatureRow> change_rows(const std::vector<FeatureRow>& weekly_rows,
                                    const StudyCalendar& calendar) {
  std::map<std::pair<std::string, std::string>, change::WeeklySeries> series;
  for (const auto& r : weekly_rows) {
    auto& s = series[{r.participant, r.feature}];
    if (s.values.empty()) {
      s.values.assign(static_cast<std::size_t>(calendar.weeks_n), std::nullopt);
      s.midpoint_week = calendar.weeks_m;
    }
    const int week = week_index_of(r.slice);
    if (week >= 1 && week <= calendar.weeks_n) s.values[static_cast<std::size_t>(week - 1)] = r.value;
  }
  std::vector<FeatureRow> out;
  for (const auto& [key, s] : series) {
    const auto values = change::as_array(change::change_features(s));
    for (std::size_t i = 0; i < values.size(); ++i) {
      out.push_back({key.first, change_feature_name(key.second, change::kFields[i]),
                     std::string(kStudySliceId), values[i]});
    }
  }
  return out;
}

ExtractionResult extract_features(const std::vector<ParticipantBundle>& bundles,
                                  const RunConfig& config, const CatalogSelection& selection,
                                  std::uint64_t seed, int jobs) {
  std::optional<places::PlaceMap> map;
  if (selection.sensors.count(Sensor::places) && config.place_map) {
    map = places::load_place_map(*config.place_map);
  }

  ExtractionResult result;
  std::vector<std::optional<Prepared>> prepared(bundles.size());
  std::vector<std::string> errors(bundles.size());
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    try {
      prepared[i] = prepare(bundles[i], config, selection, map, seed);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      logger()->error("participant {}: {}", bundles[i].participant, e.what());
    }
  }

  struct Task {
    std::size_t participant;
    std::size_t slice;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    if (!prepared[i]) continue;
    for (std::size_t s = 0; s < prepared[i]->slices.size(); ++s) tasks.push_back({i, s});
  }
  std::vector<std::vector<FeatureRow>> outputs(tasks.size());
  std::vector<std::string> task_errors(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const auto& p = *prepared[tasks[t].participant];
      try {
        outputs[t] = slice_rows(p, config, selection, p.slices[tasks[t].slice]);
      } catch (const std::exception& e) {
        task_errors[t] = e.what();
      }
    }
  };
  const int threads = std::max(1, jobs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& err = errors[tasks[t].participant];
    if (!task_errors[t].empty() && err.empty()) err = task_errors[t];
  }

  for (std::size_t i = 0; i < bundles.size(); ++i) {
    if (!errors[i].empty()) {
      result.failures.emplace_back(bundles[i].participant, errors[i]);
      continue;
    }
    std::vector<FeatureRow> weekly;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].participant != i) continue;
      const auto& slice = prepared[i]->slices[tasks[t].slice];
      for (auto& row : outputs[t]) {
        if (slice.granularity == Granularity::weekly) weekly.push_back(row);
        result.rows.push_back(std::move(row));
      }
    }
    auto changes = change_rows(weekly, prepared[i]->calendar);
    result.rows.insert(result.rows.end(), std::make_move_iterator(changes.begin()),
                       std::make_move_iterator(changes.end()));
  }
  sort_rows(result.rows);
  return result;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string utc_now_iso() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto day = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{now - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::filesystem::path sibling(const std::filesystem::path& output, std::string_view suffix) {
  auto p = output;
  p += suffix;
  return p;
}

}  // namespace

int run(const RunOptions& options) {
  RunConfig config;
  try {
    config = load_run_config(options.config_path);
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
    return kExitConfigError;
  }
  if (!std::filesystem::is_directory(options.input_dir)) {
    logger()->error("input directory not found: {}", options.input_dir.string());
    return kExitConfigError;
  }

  CatalogSelection selection;
  selection.sensors = options.sensors.value_or(config.sensors);
  if (options.sensors) {
    std::set<Sensor> both;
    for (Sensor s : *options.sensors) {
      if (config.sensors.count(s)) both.insert(s);
    }
    selection.sensors = both;
  }
  if (options.epochs) selection.epochs = *options.epochs;
  if (options.granularities) selection.granularities = *options.granularities;
  const std::uint64_t seed = options.seed.value_or(config.seed);

  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(options.input_dir)) {
    if (!entry.is_directory()) continue;
    const std::string id = entry.path().filename().string();
    if (options.participants && !options.participants->count(id)) continue;
    ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());

  nlohmann::ordered_json inventory = nlohmann::ordered_json::array();
  std::vector<ParticipantBundle> bundles;
  std::map<std::string, std::string> load_errors;
  nlohmann::ordered_json validation = nlohmann::ordered_json::object();
  for (const auto& id : ids) {
    const auto dir = options.input_dir / id;
    std::vector<std::filesystem::path> files;
    for (const auto& f : std::filesystem::directory_iterator(dir)) {
      if (f.is_regular_file()) files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      inventory.push_back({{"path", (std::filesystem::path(id) / f.filename()).generic_string()},
                           {"bytes", std::filesystem::file_size(f)}});
    }
    try {
      auto bundle = load_participant(dir, id);
      validation[id] = report_json(validate_dataset(bundle));
      bundles.push_back(std::move(bundle));
      logger()->info("loaded participant {}", id);
    } catch (const std::exception& e) {
      load_errors[id] = e.what();
      logger()->error("participant {}: {}", id, e.what());
    }
  }

  ExtractionResult extraction;
  try {
    extraction = extract_features(bundles, config, selection, seed, options.jobs);
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
    return kExitConfigError;
  }
  for (const auto& [id, err] : extraction.failures) load_errors[id] = err;

  try {
    write_matrix(extraction.rows, options.output_path, options.format);
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
    return kExitConfigError;
  }

  const int exit_code = load_errors.empty() ? kExitOk : kExitPartialFailure;
  nlohmann::ordered_json status = nlohmann::ordered_json::object();
  nlohmann::ordered_json report_participants = nlohmann::ordered_json::object();
  for (const auto& id : ids) {
    auto it = load_errors.find(id);
    status[id] = it == load_errors.end() ? "ok" : "error";
    nlohmann::ordered_json entry;
    entry["status"] = status[id];
    if (it != load_errors.end()) entry["error"] = it->second;
    if (validation.contains(id)) entry["validation"] = validation[id];
    report_participants[id] = std::move(entry);
  }

  nlohmann::ordered_json report;
  report["exit_code"] = exit_code;
  report["rows"] = extraction.rows.size();
  report["participants"] = std::move(report_participants);

  nlohmann::ordered_json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["config_hash"] = fnv1a_hex(config.source_text);
  manifest["seed"] = seed;
  manifest["format"] = options.format == MatrixFormat::csv ? "csv" : "jsonl";
  manifest["inputs"] = std::move(inventory);
  manifest["participants"] = std::move(status);
  manifest["created_at"] = utc_now_iso();

  try {
    write_file_atomically(sibling(options.output_path, ".report.json"), report.dump(2) + "\n");
    write_file_atomically(sibling(options.output_path, ".manifest.json"), manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
    return kExitConfigError;
  }
  logger()->info("wrote {} rows to {}", extraction.rows.size(), options.output_path.string());
  return exit_code;
}

}  // namespace sensefeat
