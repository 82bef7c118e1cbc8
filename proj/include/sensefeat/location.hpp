#ifndef SENSEFEAT_LOCATION_HPP
#define SENSEFEAT_LOCATION_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sensefeat/features.hpp"
#include "sensefeat/records.hpp"

namespace sensefeat::location {

struct LocationParams {
  double eps_m = 30.0;
  int min_pts = 5;
  double speed_threshold_kmh = 1.0;
  double gap_cap_s = 300.0;

  TimestampMs gap_cap_ms() const { return static_cast<TimestampMs>(gap_cap_s * 1000.0); }
};

struct MotionSample {
  LocationFix fix;
  double speed_kmh = 0.0;
  bool moving = false;
  /// Distance from the previous fix; 0 for the first fix and after a gap.
  double distance_m = 0.0;
  /// Time until the next fix, capped at the gap limit; 0 for the last fix.
  TimestampMs duration_ms = 0;
  /// True when the preceding interval exceeded the gap limit (or for the
  /// first fix). Such samples carry no speed of their own.
  bool after_gap = false;

  TimestampMs time() const { return fix.timestamp; }
};

/**
 * Speed from consecutive fixes, labelled moving when strictly above the
 * threshold. A pair further apart than the gap limit contributes no distance
 * and leaves the later sample static. The first sample takes the second's
 * speed and state. Fixes sharing a timestamp keep only the first.
 */
std::vector<MotionSample> label_motion(std::span<const LocationFix> fixes,
                                       const LocationParams& params = {});

enum class PlaceScope { global, local };

struct SignificantPlaces {
  PlaceScope scope = PlaceScope::global;
  /// Timestamps of the clustered static samples, ascending.
  std::vector<TimestampMs> times;
  /// Cluster label per static sample; -1 is an insignificant location.
  std::vector<int> labels;
  std::vector<GeoPoint> centers;
  std::vector<TimestampMs> dwell_ms;

  std::size_t num_clusters() const { return centers.size(); }
  /// Label of the static sample at `t`; nullopt when `t` was not clustered.
  std::optional<int> label_at(TimestampMs t) const;
};

/// DBSCAN (haversine metric) over the static samples in `samples`.
SignificantPlaces significant_places(std::span<const MotionSample> samples, PlaceScope scope,
                                     const LocationParams& params = {});

/// Log spectral energy of latitude and longitude in the 23.5-24.5 h band.
/// nullopt with fewer than 3 fixes or a span under 24 h.
std::optional<double> circadian_movement(std::span<const LocationFix> fixes);

struct HomeModel {
  GeoPoint center;
};

/// Home is the center of the max-dwell cluster of night-time static samples.
std::optional<HomeModel> infer_home(std::span<const LocationFix> night_fixes,
                                    const LocationParams& params = {});

/// Entropy of dwell shares, with entropy / ln(#clusters) normalization
/// (0 below two clusters).
std::pair<double, double> location_entropy(std::span<const double> dwell);

/// Dwell-weighted RMS distance of cluster centers from their weighted
/// centroid, in meters.
double radius_of_gyration(std::span<const GeoPoint> centers, std::span<const double> dwell);

/**
 * All location features for one slice. `samples` are the participant's motion
 * samples assigned to the slice (durations computed on the full stream);
 * `global` holds study-wide clusters and `local` the clusters of this slice.
 */
FeatureMap location_features(std::span<const MotionSample> samples,
                             const SignificantPlaces& global, const SignificantPlaces& local,
                             const std::optional<HomeModel>& home);

std::vector<std::string> feature_keys();

}  // namespace sensefeat::location

#endif  // SENSEFEAT_LOCATION_HPP
