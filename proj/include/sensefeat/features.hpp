#ifndef SENSEFEAT_FEATURES_HPP
#define SENSEFEAT_FEATURES_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensefeat/numerics.hpp"

namespace sensefeat {

/// nullopt is MISSING (no data), which is distinct from an observed 0.
using FeatureValue = std::optional<double>;

/// Keyed by `<stem>` or `<stem>:<scope>`; the sensor prefix and slice suffix
/// are added by the catalog.
using FeatureMap = std::map<std::string, FeatureValue>;

inline std::string feature_key(std::string_view stem, std::string_view scope) {
  std::string k(stem);
  if (!scope.empty()) {
    k += ':';
    k += scope;
  }
  return k;
}

/// Writes max/min/mean/std entries named `<prefix>_<stat><unit_suffix>` for
/// the given lengths, or MISSING for all of them when `values` is empty.
inline void put_stats(FeatureMap& out, std::string_view prefix, std::string_view scope,
                      const std::vector<double>& values, bool with_std = true,
                      std::string_view unit_suffix = "") {
  const auto s = summarize(values);
  auto name = [&](std::string_view stat) {
    return feature_key(std::string(prefix) + "_" + std::string(stat) + std::string(unit_suffix),
                       scope);
  };
  out[name("max")] = s ? FeatureValue(s->max) : std::nullopt;
  out[name("min")] = s ? FeatureValue(s->min) : std::nullopt;
  out[name("mean")] = s ? FeatureValue(s->mean) : std::nullopt;
  if (with_std) out[name("std")] = s ? FeatureValue(s->stddev) : std::nullopt;
}

}  // namespace sensefeat

#endif  // SENSEFEAT_FEATURES_HPP
