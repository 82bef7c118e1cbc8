#include "sensefeat/bluetooth.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace sensefeat::bluetooth {

namespace {

constexpr std::array<std::string_view, 6> kStems{
    "unique_devices", "scans_most_frequent", "scans_least_frequent",
    "scans_sum",      "scans_mean",          "scans_std"};

// Cluster ids ordered by descending mean score (center).
std::vector<int> rank_clusters(const ClusterResult& r) {
  std::vector<int> order(r.centers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return r.centers[static_cast<std::size_t>(a)][0] > r.centers[static_cast<std::size_t>(b)][0];
  });
  return order;
}

}  // namespace

std::string_view to_string(DeviceRole role) {
  switch (role) {
    case DeviceRole::self: return "self";
    case DeviceRole::related: return "related";
    case DeviceRole::others: return "others";
  }
  return "?";
}

std::vector<DeviceUsageProfile> device_profiles(std::span<const BluetoothScan> scans,
                                                const TimeZone& zone) {
  struct Tally {
    std::set<std::chrono::sys_days> days;
    std::int64_t count = 0;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& s : scans) {
    auto& t = tallies[s.address];
    t.days.insert(std::chrono::sys_days{zone.local_date(s.timestamp)});
    ++t.count;
  }
  std::vector<DeviceUsageProfile> profiles;
  profiles.reserve(tallies.size());
  for (const auto& [address, t] : tallies) {
    DeviceUsageProfile p;
    p.address = address;
    p.days_seen = static_cast<int>(t.days.size());
    p.total_count = t.count;
    p.avg_frequency = static_cast<double>(t.count) / p.days_seen;
    profiles.push_back(std::move(p));
  }
  if (profiles.empty()) return profiles;

  std::vector<double> days, freq;
  for (const auto& p : profiles) {
    days.push_back(p.days_seen);
    freq.push_back(p.avg_frequency);
  }
  const auto zd = zscore(days);
  const auto zf = zscore(freq);
  for (std::size_t i = 0; i < profiles.size(); ++i) profiles[i].score = zd[i] + zf[i];
  return profiles;
}

DeviceRole DeviceOwnership::role_of(const std::string& address) const {
  auto it = roles.find(address);
  return it == roles.end() ? DeviceRole::others : it->second;
}

DeviceOwnership cluster_devices(std::span<const BluetoothScan> scans, std::uint64_t seed,
                                const TimeZone& zone) {
  DeviceOwnership own;
  own.profiles = device_profiles(scans, zone);
  if (own.profiles.empty()) return own;

  std::vector<std::vector<double>> points;
  for (const auto& p : own.profiles) points.push_back({p.score});

  std::optional<ClusterResult> k2, k3;
  try {
    k2 = kmeans(points, 2, seed);
    own.sse_k2 = k2->sse;
  } catch (const DegenerateClustering&) {
    for (const auto& p : own.profiles) own.roles[p.address] = DeviceRole::self;
    own.chosen_k = 2;
    return own;
  }
  try {
    k3 = kmeans(points, 3, seed);
    own.sse_k3 = k3->sse;
  } catch (const DegenerateClustering&) {
  }

  const bool use_k2 = !k3 || k2->sse < k3->sse;
  const ClusterResult& chosen = use_k2 ? *k2 : *k3;
  own.chosen_k = use_k2 ? 2 : 3;

  const auto ranked = rank_clusters(chosen);
  std::vector<DeviceRole> role_of_cluster(chosen.centers.size(), DeviceRole::others);
  role_of_cluster[static_cast<std::size_t>(ranked.front())] = DeviceRole::self;
  if (!use_k2) role_of_cluster[static_cast<std::size_t>(ranked[1])] = DeviceRole::related;

  for (std::size_t i = 0; i < own.profiles.size(); ++i) {
    own.roles[own.profiles[i].address] =
        role_of_cluster[static_cast<std::size_t>(chosen.labels[i])];
  }
  return own;
}

FeatureMap bluetooth_features(std::span<const BluetoothScan> scans,
                              const DeviceOwnership& ownership) {
  // address -> scan count within the slice, per scope
  std::array<std::map<std::string, std::int64_t>, kScopes.size()> counts;
  for (const auto& s : scans) {
    ++counts[0][s.address];
    const auto role = ownership.role_of(s.address);
    ++counts[1 + static_cast<std::size_t>(role)][s.address];
  }

  FeatureMap out;
  for (std::size_t scope = 0; scope < kScopes.size(); ++scope) {
    const auto& c = counts[scope];
    auto key = [&](std::string_view stem) { return feature_key(stem, kScopes[scope]); };
    if (c.empty()) {
      for (auto stem : kStems) out[key(stem)] = std::nullopt;
      continue;
    }
    std::vector<double> values;
    for (const auto& [address, n] : c) values.push_back(static_cast<double>(n));
    const auto s = summarize(values);
    out[key("unique_devices")] = static_cast<double>(c.size());
    out[key("scans_most_frequent")] = s->max;
    out[key("scans_least_frequent")] = s->min;
    out[key("scans_sum")] = s->sum;
    out[key("scans_mean")] = s->mean;
    out[key("scans_std")] = s->stddev;
  }
  return out;
}

std::vector<std::string> feature_keys() {
  std::vector<std::string> keys;
  for (auto scope : kScopes) {
    for (auto stem : kStems) keys.push_back(feature_key(stem, scope));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace sensefeat::bluetooth
