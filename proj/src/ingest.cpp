#include "sensefeat/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

namespace sensefeat {

namespace {

constexpr std::array<SensorKind, 8> kAllKinds{
    SensorKind::bluetooth, SensorKind::calls,        SensorKind::location,
    SensorKind::screen,    SensorKind::sleep,        SensorKind::steps,
    SensorKind::conversation, SensorKind::contacts};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct RowFailure {
  std::string message;
};

std::int64_t parse_int(std::string_view s, const char* field) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw RowFailure{std::string("invalid integer in ") + field + ": '" + std::string(s) + "'"};
  }
  return v;
}

double parse_real(std::string_view s, const char* field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw RowFailure{std::string("invalid number in ") + field + ": '" + std::string(s) + "'"};
  }
  return v;
}

template <typename E>
E parse_enum(std::string_view s, std::optional<E> (*parser)(std::string_view), const char* field) {
  auto v = parser(s);
  if (!v) throw RowFailure{std::string("unknown ") + field + " '" + std::string(s) + "'"};
  return *v;
}

// Reads the file, checks the header and feeds each data row to `on_row`.
// Malformed rows are skipped and recorded.
void read_rows(const std::filesystem::path& path, SensorKind kind,
               const std::function<void(const std::vector<std::string_view>&)>& on_row,
               std::size_t& rejected, std::vector<RowError>& errors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw IngestError(path.string() + ": missing header");
  }
  std::string_view header = line;
  if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  while (!header.empty() && (header.back() == '\r' || header.back() == ' ')) header.remove_suffix(1);
  if (header != expected_header(kind)) {
    throw IngestError(path.string() + ": header '" + std::string(header) + "' does not match '" +
                      std::string(expected_header(kind)) + "'");
  }
  const std::size_t columns = split_fields(expected_header(kind)).size();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    try {
      if (fields.size() != columns) {
        throw RowFailure{"expected " + std::to_string(columns) + " fields, got " +
                         std::to_string(fields.size())};
      }
      on_row(fields);
    } catch (const RowFailure& f) {
      ++rejected;
      errors.push_back({line_no, f.message});
    }
  }
}

template <typename Record>
LoadResult<Record> load_records(const std::filesystem::path& path, SensorKind kind,
                                const std::function<Record(const std::vector<std::string_view>&)>& parse) {
  LoadResult<Record> result;
  read_rows(
      path, kind, [&](const auto& fields) { result.records.push_back(parse(fields)); },
      result.rejected, result.errors);
  sort_and_dedup(result.records);
  return result;
}

// Keeps the first record of each timestamp; later ones overlap it.
template <typename Record>
void reject_overlaps(LoadResult<Record>& result) {
  std::vector<Record> kept;
  kept.reserve(result.records.size());
  for (auto& r : result.records) {
    if (!kept.empty() && kept.back().time() == r.time()) {
      ++result.rejected;
      result.errors.push_back({0, "overlapping record at " + std::to_string(r.time())});
      continue;
    }
    kept.push_back(std::move(r));
  }
  result.records = std::move(kept);
}

TimestampMs floor_to(TimestampMs t, TimestampMs unit) {
  TimestampMs q = t / unit;
  if (t % unit < 0) --q;
  return q * unit;
}

}  // namespace

std::string_view to_string(SensorKind kind) {
  switch (kind) {
    case SensorKind::bluetooth: return "bluetooth";
    case SensorKind::calls: return "calls";
    case SensorKind::location: return "location";
    case SensorKind::screen: return "screen";
    case SensorKind::sleep: return "sleep";
    case SensorKind::steps: return "steps";
    case SensorKind::conversation: return "conversation";
    case SensorKind::contacts: return "contacts";
  }
  return "?";
}

std::optional<SensorKind> parse_sensor_kind(std::string_view s) {
  for (SensorKind k : kAllKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view expected_header(SensorKind kind) {
  switch (kind) {
    case SensorKind::bluetooth: return "timestamp,address";
    case SensorKind::calls: return "timestamp,correspondent,direction,duration_s";
    case SensorKind::location: return "timestamp,lat,lon";
    case SensorKind::screen: return "timestamp,status";
    case SensorKind::sleep: return "timestamp,state";
    case SensorKind::steps: return "start_timestamp,steps";
    case SensorKind::conversation: return "timestamp,label";
    case SensorKind::contacts: return "correspondent,category";
  }
  return "";
}

std::string file_name(SensorKind kind) { return std::string(to_string(kind)) + ".csv"; }

LoadResult<BluetoothScan> load_bluetooth(const std::filesystem::path& path) {
  return load_records<BluetoothScan>(path, SensorKind::bluetooth, [](const auto& f) {
    BluetoothScan r;
    r.timestamp = parse_int(f[0], "timestamp");
    if (f[1].empty()) throw RowFailure{"empty address"};
    r.address = std::string(f[1]);
    return r;
  });
}

LoadResult<CallRecord> load_calls(const std::filesystem::path& path) {
  return load_records<CallRecord>(path, SensorKind::calls, [](const auto& f) {
    CallRecord r;
    r.timestamp = parse_int(f[0], "timestamp");
    if (f[1].empty()) throw RowFailure{"empty correspondent"};
    r.correspondent = std::string(f[1]);
    r.direction = parse_enum(f[2], &parse_call_direction, "direction");
    r.duration_s = parse_real(f[3], "duration_s");
    if (r.duration_s < 0.0) throw RowFailure{"negative duration"};
    if (r.direction == CallDirection::missed) r.duration_s = 0.0;
    return r;
  });
}

LoadResult<LocationFix> load_location(const std::filesystem::path& path) {
  return load_records<LocationFix>(path, SensorKind::location, [](const auto& f) {
    LocationFix r;
    r.timestamp = parse_int(f[0], "timestamp");
    r.point = {parse_real(f[1], "lat"), parse_real(f[2], "lon")};
    if (!is_valid(r.point)) throw RowFailure{"coordinates out of range"};
    return r;
  });
}

LoadResult<ScreenEvent> load_screen(const std::filesystem::path& path) {
  return load_records<ScreenEvent>(path, SensorKind::screen, [](const auto& f) {
    return ScreenEvent{parse_int(f[0], "timestamp"),
                       parse_enum(f[1], &parse_screen_status, "status")};
  });
}

LoadResult<SleepMinute> load_sleep(const std::filesystem::path& path) {
  auto result = load_records<SleepMinute>(path, SensorKind::sleep, [](const auto& f) {
    return SleepMinute{floor_to(parse_int(f[0], "timestamp"), kMsPerMinute),
                       parse_enum(f[1], &parse_sleep_state, "state")};
  });
  reject_overlaps(result);
  return result;
}

LoadResult<StepBin> load_steps(const std::filesystem::path& path) {
  auto result = load_records<StepBin>(path, SensorKind::steps, [](const auto& f) {
    StepBin r;
    r.start = floor_to(parse_int(f[0], "start_timestamp"), kStepBinMs);
    r.steps = parse_int(f[1], "steps");
    if (r.steps < 0) throw RowFailure{"negative step count"};
    return r;
  });
  reject_overlaps(result);
  return result;
}

LoadResult<ConversationInference> load_conversation(const std::filesystem::path& path) {
  return load_records<ConversationInference>(path, SensorKind::conversation, [](const auto& f) {
    return ConversationInference{parse_int(f[0], "timestamp"),
                                 parse_enum(f[1], &parse_conversation_label, "label")};
  });
}

ContactLoadResult load_contacts(const std::filesystem::path& path) {
  ContactLoadResult result;
  read_rows(
      path, SensorKind::contacts,
      [&](const auto& f) {
        if (f[0].empty()) throw RowFailure{"empty correspondent"};
        const auto category = parse_enum(f[1], &parse_contact_category, "category");
        result.directory.categories.emplace(std::string(f[0]), category);
      },
      result.rejected, result.errors);
  return result;
}

ParticipantBundle load_participant(const std::filesystem::path& dir, std::string participant) {
  if (!std::filesystem::is_directory(dir)) {
    throw IngestError("participant directory not found: " + dir.string());
  }
  ParticipantBundle b;
  b.participant = std::move(participant);
  auto path_of = [&](SensorKind k) { return dir / file_name(k); };
  auto exists = [&](SensorKind k) { return std::filesystem::exists(path_of(k)); };
  if (exists(SensorKind::bluetooth)) b.bluetooth = load_bluetooth(path_of(SensorKind::bluetooth));
  if (exists(SensorKind::calls)) b.calls = load_calls(path_of(SensorKind::calls));
  if (exists(SensorKind::location)) b.location = load_location(path_of(SensorKind::location));
  if (exists(SensorKind::screen)) b.screen = load_screen(path_of(SensorKind::screen));
  if (exists(SensorKind::sleep)) b.sleep = load_sleep(path_of(SensorKind::sleep));
  if (exists(SensorKind::steps)) b.steps = load_steps(path_of(SensorKind::steps));
  if (exists(SensorKind::conversation)) {
    b.conversation = load_conversation(path_of(SensorKind::conversation));
  }
  if (exists(SensorKind::contacts)) b.contacts = load_contacts(path_of(SensorKind::contacts));
  return b;
}

// ---------------------------------------------------------------------------
// Validation

void GapHistogram::add(TimestampMs gap) {
  std::size_t bucket = 0;
  while (bucket < kEdges.size() && gap >= kEdges[bucket]) ++bucket;
  ++counts[bucket];
}

const SensorCoverage& ValidationReport::coverage(SensorKind kind) const {
  for (const auto& s : sensors) {
    if (s.kind == kind) return s;
  }
  throw std::out_of_range("no coverage entry for " + std::string(to_string(kind)));
}

namespace {

template <typename Record>
SensorCoverage cover(SensorKind kind, const std::optional<LoadResult<Record>>& stream,
                     TimestampMs resolution) {
  SensorCoverage c;
  c.kind = kind;
  if (!stream) return c;
  c.present = true;
  c.records = stream->records.size();
  c.rejected = stream->rejected;
  c.violations = stream->errors;
  const auto& recs = stream->records;
  if (recs.empty()) return c;
  c.first = recs.front().time();
  c.last = recs.back().time();

  std::map<std::int64_t, std::set<std::int64_t>> minutes_by_day;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (i > 0) c.gaps.add(recs[i].time() - recs[i - 1].time());
    for (TimestampMs t = recs[i].time(); t < recs[i].time() + resolution; t += kMsPerMinute) {
      const TimestampMs minute = floor_to(t, kMsPerMinute);
      minutes_by_day[floor_to(minute, kMsPerDay) / kMsPerDay].insert(minute);
    }
  }
  for (const auto& [day, minutes] : minutes_by_day) {
    c.daily_coverage[day] = static_cast<double>(minutes.size()) / (24.0 * 60.0);
  }
  return c;
}

}  // namespace

ValidationReport validate_dataset(const ParticipantBundle& bundle) {
  ValidationReport r;
  r.participant = bundle.participant;
  r.sensors.push_back(cover(SensorKind::bluetooth, bundle.bluetooth, kMsPerMinute));
  r.sensors.push_back(cover(SensorKind::calls, bundle.calls, kMsPerMinute));
  r.sensors.push_back(cover(SensorKind::location, bundle.location, kMsPerMinute));
  r.sensors.push_back(cover(SensorKind::screen, bundle.screen, kMsPerMinute));
  r.sensors.push_back(cover(SensorKind::sleep, bundle.sleep, kMsPerMinute));
  r.sensors.push_back(cover(SensorKind::steps, bundle.steps, kStepBinMs));
  r.sensors.push_back(cover(SensorKind::conversation, bundle.conversation, kMsPerMinute));
  SensorCoverage contacts;
  contacts.kind = SensorKind::contacts;
  if (bundle.contacts) {
    contacts.present = true;
    contacts.records = bundle.contacts->directory.categories.size();
    contacts.rejected = bundle.contacts->rejected;
    contacts.violations = bundle.contacts->errors;
  }
  r.sensors.push_back(std::move(contacts));
  return r;
}

nlohmann::json report_json(const ValidationReport& report) {
  nlohmann::json sensors = nlohmann::json::object();
  for (const auto& s : report.sensors) {
    nlohmann::json j;
    j["present"] = s.present;
    if (s.present) {
      j["records"] = s.records;
      j["rejected"] = s.rejected;
      j["first"] = s.first ? nlohmann::json(*s.first) : nlohmann::json(nullptr);
      j["last"] = s.last ? nlohmann::json(*s.last) : nlohmann::json(nullptr);
      nlohmann::json gaps = nlohmann::json::object();
      for (std::size_t i = 0; i < s.gaps.counts.size(); ++i) {
        gaps[std::string(GapHistogram::kLabels[i])] = s.gaps.counts[i];
      }
      j["gap_histogram"] = std::move(gaps);
      nlohmann::json violations = nlohmann::json::array();
      for (const auto& e : s.violations) {
        violations.push_back({{"line", e.line}, {"message", e.message}});
      }
      j["violations"] = std::move(violations);
    }
    sensors[std::string(to_string(s.kind))] = std::move(j);
  }
  return {{"participant", report.participant}, {"sensors", std::move(sensors)}};
}

}  // namespace sensefeat
