#ifndef SENSEFEAT_BLUETOOTH_HPP
#define SENSEFEAT_BLUETOOTH_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sensefeat/features.hpp"
#include "sensefeat/records.hpp"
#include "sensefeat/windowing.hpp"

namespace sensefeat::bluetooth {

enum class DeviceRole { self, related, others };

std::string_view to_string(DeviceRole role);

struct DeviceUsageProfile {
  std::string address;
  int days_seen = 0;
  std::int64_t total_count = 0;
  double avg_frequency = 0.0;  // total_count / days_seen
  double score = 0.0;          // z(days_seen) + z(avg_frequency)
};

/// Per-address profiles in address order. Days are participant-local dates.
std::vector<DeviceUsageProfile> device_profiles(std::span<const BluetoothScan> scans,
                                                const TimeZone& zone);

struct DeviceOwnership {
  std::map<std::string, DeviceRole> roles;
  int chosen_k = 2;
  std::vector<DeviceUsageProfile> profiles;
  /// SSE of the candidate models; absent when the candidate was skipped.
  std::optional<double> sse_k2;
  std::optional<double> sse_k3;

  DeviceRole role_of(const std::string& address) const;
};

/**
 * Labels every scanned address as self, related or others from study-wide
 * usage. Scores are clustered with K=2 and K=3; K=2 is kept only when its SSE
 * is strictly smaller. Clusters are ranked by mean score, highest first.
 *
 * Fewer than two distinct scores labels every address self (K=2); fewer than
 * three skips the K=3 candidate.
 */
DeviceOwnership cluster_devices(std::span<const BluetoothScan> scans, std::uint64_t seed,
                                const TimeZone& zone = TimeZone());

inline constexpr std::array<std::string_view, 4> kScopes{"all", "self", "related", "others"};

/// Scan-count features per scope over scans already assigned to a slice.
/// Empty scopes produce MISSING values.
FeatureMap bluetooth_features(std::span<const BluetoothScan> scans,
                              const DeviceOwnership& ownership);

std::vector<std::string> feature_keys();

}  // namespace sensefeat::bluetooth

#endif  // SENSEFEAT_BLUETOOTH_HPP
