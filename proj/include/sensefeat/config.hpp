#ifndef SENSEFEAT_CONFIG_HPP
#define SENSEFEAT_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sensefeat/catalog.hpp"
#include "sensefeat/location.hpp"
#include "sensefeat/windowing.hpp"

namespace sensefeat {

/// Value of a TOML key in the subset the config uses: strings, integers,
/// floats, booleans, local dates and flat arrays of those.
struct TomlValue {
  using Array = std::vector<TomlValue>;
  std::variant<std::string, std::int64_t, double, bool, CivilDate, Array> value;
};

/// Parses `key = value` lines under optional `[table]` headers. Keys are
/// returned fully dotted (`location.eps_m`). Throws ConfigError with the line
/// number on malformed input or a repeated key.
std::map<std::string, TomlValue> parse_toml(std::string_view text);

struct RunConfig {
  StudyConfig study;
  location::LocationParams location;
  std::optional<std::filesystem::path> place_map;
  /// Sensors enabled by the config; all when the key is absent.
  std::set<Sensor> sensors{kAllSensors.begin(), kAllSensors.end()};
  std::uint64_t seed = 42;
  /// Raw config text, hashed into the run manifest.
  std::string source_text;
};

/// Relative paths in the config resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace sensefeat

#endif  // SENSEFEAT_CONFIG_HPP
