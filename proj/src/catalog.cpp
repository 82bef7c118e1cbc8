#include "sensefeat/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sensefeat/bluetooth.hpp"
#include "sensefeat/calls.hpp"
#include "sensefeat/change.hpp"
#include "sensefeat/fitbit.hpp"
#include "sensefeat/location.hpp"
#include "sensefeat/places.hpp"
#include "sensefeat/screen.hpp"

namespace sensefeat {

std::string_view to_string(Sensor s) {
  switch (s) {
    case Sensor::bluetooth: return "bluetooth";
    case Sensor::calls: return "calls";
    case Sensor::location: return "location";
    case Sensor::places: return "places";
    case Sensor::screen: return "screen";
    case Sensor::sleep: return "sleep";
    case Sensor::steps: return "steps";
  }
  return "?";
}

std::optional<Sensor> parse_sensor(std::string_view s) {
  for (Sensor x : kAllSensors) {
    if (to_string(x) == s) return x;
  }
  return std::nullopt;
}

std::vector<std::string> sensor_feature_keys(Sensor s) {
  switch (s) {
    case Sensor::bluetooth: return bluetooth::feature_keys();
    case Sensor::calls: return calls::feature_keys();
    case Sensor::location: return location::feature_keys();
    case Sensor::places: return places::feature_keys();
    case Sensor::screen: return screen::feature_keys();
    case Sensor::sleep: return fitbit::sleep_feature_keys();
    case Sensor::steps: return fitbit::steps_feature_keys();
  }
  return {};
}

std::string feature_name(Sensor sensor, std::string_view key, const TimeSlice& slice) {
  std::string name(to_string(sensor));
  name += ':';
  name += key;
  name += ':';
  name += slice.feature_suffix();
  return name;
}

std::string change_feature_name(std::string_view weekly_feature, std::string_view field) {
  return std::string(weekly_feature) + ":change:" + std::string(field);
}

std::vector<std::string> enumerate_catalog(const CatalogSelection& selection) {
  std::vector<std::string> names;
  for (Sensor sensor : selection.sensors) {
    const auto keys = sensor_feature_keys(sensor);
    for (Epoch epoch : selection.epochs) {
      for (Granularity g : selection.granularities) {
        std::vector<TimeSlice> shapes;
        if (g == Granularity::half_term) {
          shapes.push_back({epoch, g, 1, {}});
          shapes.push_back({epoch, g, 2, {}});
        } else {
          shapes.push_back({epoch, g, 1, {}});
        }
        for (const auto& shape : shapes) {
          for (const auto& key : keys) {
            const std::string name = feature_name(sensor, key, shape);
            names.push_back(name);
            if (g == Granularity::weekly) {
              for (auto field : change::kFields) {
                names.push_back(change_feature_name(name, field));
              }
            }
          }
        }
      }
    }
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

std::optional<MatrixFormat> parse_matrix_format(std::string_view s) {
  if (s == "csv") return MatrixFormat::csv;
  if (s == "jsonl") return MatrixFormat::jsonl;
  return std::nullopt;
}

void sort_rows(std::vector<FeatureRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const FeatureRow& a, const FeatureRow& b) {
    if (a.participant != b.participant) return a.participant < b.participant;
    if (a.feature != b.feature) return a.feature < b.feature;
    return a.slice < b.slice;
  });
}

std::string format_value(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw OutputError("cannot format value");
  return std::string(buf, ptr);
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write " + path.string());
    out << contents;
    out.flush();
    if (!out) throw OutputError("write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw OutputError("cannot move output into place: " + path.string());
  }
}

void write_matrix(std::vector<FeatureRow> rows, const std::filesystem::path& path,
                  MatrixFormat format) {
  sort_rows(rows);
  std::string text;
  text.reserve(rows.size() * 64 + 64);
  if (format == MatrixFormat::csv) text += "participant,feature,slice,value\n";
  for (const auto& r : rows) {
    if (r.value && !std::isfinite(*r.value)) {
      throw OutputError("non-finite value for " + r.participant + " " + r.feature);
    }
    if (format == MatrixFormat::csv) {
      text += r.participant;
      text += ',';
      text += r.feature;
      text += ',';
      text += r.slice;
      text += ',';
      if (r.value) text += format_value(*r.value);
      text += '\n';
    } else {
      nlohmann::ordered_json j;
      j["participant"] = r.participant;
      j["feature"] = r.feature;
      j["slice"] = r.slice;
      j["value"] = r.value ? nlohmann::ordered_json(*r.value) : nlohmann::ordered_json(nullptr);
      text += j.dump();
      text += '\n';
    }
  }
  write_file_atomically(path, text);
}

std::vector<FeatureRow> read_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OutputError("cannot read " + path.string());
  std::vector<FeatureRow> rows;
  std::string line;
  if (format == MatrixFormat::csv) {
    if (!std::getline(in, line) || line != "participant,feature,slice,value") {
      throw OutputError(path.string() + ": bad matrix header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::array<std::string, 4> f;
      std::size_t pos = 0;
      for (std::size_t i = 0; i < 4; ++i) {
        const std::size_t comma = i < 3 ? line.find(',', pos) : std::string::npos;
        if (i < 3 && comma == std::string::npos) throw OutputError("malformed matrix row");
        f[i] = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        pos = comma + 1;
      }
      FeatureRow r{f[0], f[1], f[2], std::nullopt};
      if (!f[3].empty()) {
        double v = 0.0;
        std::from_chars(f[3].data(), f[3].data() + f[3].size(), v);
        r.value = v;
      }
      rows.push_back(std::move(r));
    }
  } else {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      FeatureRow r{j.at("participant").get<std::string>(), j.at("feature").get<std::string>(),
                   j.at("slice").get<std::string>(), std::nullopt};
      if (!j.at("value").is_null()) r.value = j.at("value").get<double>();
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace sensefeat
