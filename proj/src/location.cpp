#include "sensefeat/location.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace sensefeat::location {

namespace {

constexpr double kLogFloor = 1e-10;
constexpr int kCircadianBins = 80;
constexpr double kCircadianMinPeriodH = 23.5;
constexpr double kCircadianMaxPeriodH = 24.5;
constexpr std::array<std::pair<PlaceScope, std::string_view>, 2> kScopes{{
    {PlaceScope::global, "global"},
    {PlaceScope::local, "local"},
}};

double minutes(TimestampMs ms) { return static_cast<double>(ms) / kMsPerMinute; }

GeoPoint weighted_centroid(std::span<const GeoPoint> centers, std::span<const double> w) {
  double total = 0.0, lat = 0.0, lon = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    lat += w[i] * centers[i].latitude;
    lon += w[i] * centers[i].longitude;
    total += w[i];
  }
  return {lat / total, lon / total};
}

void put_missing_scope(FeatureMap& out, std::string_view scope);

}  // namespace

std::vector<MotionSample> label_motion(std::span<const LocationFix> fixes,
                                       const LocationParams& params) {
  std::vector<MotionSample> out;
  out.reserve(fixes.size());
  for (const auto& f : fixes) {
    if (!out.empty() && out.back().fix.timestamp == f.timestamp) continue;
    MotionSample s;
    s.fix = f;
    out.push_back(s);
  }
  const TimestampMs cap = params.gap_cap_ms();
  if (out.empty()) return out;
  out.front().after_gap = true;
  for (std::size_t i = 1; i < out.size(); ++i) {
    auto& cur = out[i];
    const TimestampMs dt = cur.fix.timestamp - out[i - 1].fix.timestamp;
    out[i - 1].duration_ms = std::min(dt, cap);
    if (dt > cap) {
      cur.after_gap = true;
      continue;
    }
    cur.distance_m = haversine_distance(out[i - 1].fix.point, cur.fix.point);
    cur.speed_kmh = cur.distance_m / (static_cast<double>(dt) / 1000.0) * 3.6;
    cur.moving = cur.speed_kmh > params.speed_threshold_kmh;
  }
  if (out.size() >= 2 && !out[1].after_gap) {
    out[0].speed_kmh = out[1].speed_kmh;
    out[0].moving = out[1].moving;
  }
  return out;
}

std::optional<int> SignificantPlaces::label_at(TimestampMs t) const {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end() || *it != t) return std::nullopt;
  return labels[static_cast<std::size_t>(it - times.begin())];
}

SignificantPlaces significant_places(std::span<const MotionSample> samples, PlaceScope scope,
                                     const LocationParams& params) {
  SignificantPlaces places;
  places.scope = scope;
  std::vector<std::vector<double>> points;
  std::vector<TimestampMs> durations;
  for (const auto& s : samples) {
    if (s.moving) continue;
    places.times.push_back(s.fix.timestamp);
    points.push_back({s.fix.point.latitude, s.fix.point.longitude});
    durations.push_back(s.duration_ms);
  }
  if (points.empty()) return places;
  const auto result = dbscan(points, params.eps_m, params.min_pts, Metric::haversine);
  places.labels = result.labels;
  for (const auto& c : result.centers) places.centers.push_back({c[0], c[1]});
  places.dwell_ms.assign(places.centers.size(), 0);
  for (std::size_t i = 0; i < places.labels.size(); ++i) {
    if (places.labels[i] >= 0) {
      places.dwell_ms[static_cast<std::size_t>(places.labels[i])] += durations[i];
    }
  }
  return places;
}

std::optional<double> circadian_movement(std::span<const LocationFix> fixes) {
  if (fixes.size() < 3) return std::nullopt;
  const TimestampMs span = fixes.back().timestamp - fixes.front().timestamp;
  if (span < kMsPerDay) return std::nullopt;

  std::vector<double> t, lat, lon;
  for (const auto& f : fixes) {
    t.push_back(static_cast<double>(f.timestamp - fixes.front().timestamp) / 1000.0);
    lat.push_back(f.point.latitude);
    lon.push_back(f.point.longitude);
  }
  const double f_lo = 1.0 / (kCircadianMaxPeriodH * 3600.0);
  const double f_hi = 1.0 / (kCircadianMinPeriodH * 3600.0);
  std::vector<double> freqs(kCircadianBins);
  for (int i = 0; i < kCircadianBins; ++i) {
    freqs[static_cast<std::size_t>(i)] = f_lo + (f_hi - f_lo) * i / (kCircadianBins - 1);
  }
  try {
    const auto p_lat = lomb_scargle_psd(t, lat, freqs);
    const auto p_lon = lomb_scargle_psd(t, lon, freqs);
    return std::log(mean(p_lat) + mean(p_lon) + kLogFloor);
  } catch (const InsufficientData&) {
    return std::nullopt;
  }
}

std::optional<HomeModel> infer_home(std::span<const LocationFix> night_fixes,
                                    const LocationParams& params) {
  const auto samples = label_motion(night_fixes, params);
  const auto places = significant_places(samples, PlaceScope::global, params);
  if (places.num_clusters() == 0) return std::nullopt;
  // max_element keeps the first of equal maxima, i.e. the earliest discovered.
  const auto best = std::max_element(places.dwell_ms.begin(), places.dwell_ms.end());
  return HomeModel{places.centers[static_cast<std::size_t>(best - places.dwell_ms.begin())]};
}

std::pair<double, double> location_entropy(std::span<const double> dwell) {
  const double total = std::accumulate(dwell.begin(), dwell.end(), 0.0);
  if (total <= 0.0) return {0.0, 0.0};
  double h = 0.0;
  std::size_t clusters = 0;
  for (double d : dwell) {
    if (d <= 0.0) continue;
    ++clusters;
    const double p = d / total;
    h -= p * std::log(p);
  }
  const double normalized = clusters < 2 ? 0.0 : h / std::log(static_cast<double>(clusters));
  return {h, normalized};
}

double radius_of_gyration(std::span<const GeoPoint> centers, std::span<const double> dwell) {
  const double total = std::accumulate(dwell.begin(), dwell.end(), 0.0);
  if (centers.size() < 2 || total <= 0.0) return 0.0;
  const GeoPoint centroid = weighted_centroid(centers, dwell);
  double acc = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double d = haversine_distance(centers[i], centroid);
    acc += dwell[i] / total * d * d;
  }
  return std::sqrt(acc);
}

namespace {

void put_missing_scope(FeatureMap& out, std::string_view scope) {
  for (auto stem : {"num_places", "num_transitions", "radius_of_gyration_m", "top1_dwell_min",
                    "top2_dwell_min", "top3_dwell_min", "pct_time_insignificant", "entropy",
                    "normalized_entropy"}) {
    out[feature_key(stem, scope)] = std::nullopt;
  }
  put_stats(out, "stay", scope, {}, true, "_min");
}

void put_scope(FeatureMap& out, std::span<const MotionSample> samples,
               const SignificantPlaces& places, std::string_view scope) {
  std::map<int, TimestampMs> dwell;  // cluster -> dwell within the slice
  TimestampMs static_ms = 0;
  TimestampMs noise_ms = 0;
  std::size_t static_samples = 0;
  int previous = -1;
  std::size_t transitions = 0;
  std::vector<double> stays;
  std::optional<int> stay_label;
  TimestampMs stay_ms = 0;

  auto close_stay = [&] {
    if (stay_label) stays.push_back(minutes(stay_ms));
    stay_label.reset();
    stay_ms = 0;
  };

  for (const auto& s : samples) {
    if (s.after_gap) close_stay();
    if (s.moving) {
      close_stay();
      continue;
    }
    ++static_samples;
    static_ms += s.duration_ms;
    const int label = places.label_at(s.fix.timestamp).value_or(-1);
    if (label < 0) {
      noise_ms += s.duration_ms;
      close_stay();
      continue;
    }
    dwell[label] += s.duration_ms;
    if (previous >= 0 && previous != label) ++transitions;
    previous = label;
    if (stay_label && *stay_label != label) close_stay();
    stay_label = label;
    stay_ms += s.duration_ms;
  }
  close_stay();

  if (static_samples == 0) {
    put_missing_scope(out, scope);
    out[feature_key("num_places", scope)] = 0.0;
    out[feature_key("num_transitions", scope)] = 0.0;
    return;
  }
  out[feature_key("pct_time_insignificant", scope)] =
      static_ms > 0 ? FeatureValue(100.0 * static_cast<double>(noise_ms) /
                                   static_cast<double>(static_ms))
                    : std::nullopt;
  out[feature_key("num_places", scope)] = static_cast<double>(dwell.size());
  out[feature_key("num_transitions", scope)] = static_cast<double>(transitions);

  std::vector<GeoPoint> centers;
  std::vector<double> weights;
  std::vector<std::pair<TimestampMs, int>> ranked;
  for (const auto& [label, ms] : dwell) {
    ranked.emplace_back(ms, label);
    if (ms <= 0) continue;
    centers.push_back(places.centers[static_cast<std::size_t>(label)]);
    weights.push_back(static_cast<double>(ms));
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; r < 3; ++r) {
    out[feature_key("top" + std::to_string(r + 1) + "_dwell_min", scope)] =
        r < ranked.size() ? FeatureValue(minutes(ranked[r].first)) : std::nullopt;
  }

  if (weights.empty()) {
    for (auto stem : {"radius_of_gyration_m", "entropy", "normalized_entropy"}) {
      out[feature_key(stem, scope)] = std::nullopt;
    }
  } else {
    out[feature_key("radius_of_gyration_m", scope)] = radius_of_gyration(centers, weights);
    const auto [h, hn] = location_entropy(weights);
    out[feature_key("entropy", scope)] = h;
    out[feature_key("normalized_entropy", scope)] = hn;
  }
  put_stats(out, "stay", scope, stays, true, "_min");
}

}  // namespace

FeatureMap location_features(std::span<const MotionSample> samples,
                             const SignificantPlaces& global, const SignificantPlaces& local,
                             const std::optional<HomeModel>& home) {
  FeatureMap out;
  if (samples.empty()) {
    for (const auto& k : feature_keys()) out[k] = std::nullopt;
    return out;
  }

  std::vector<double> lat, lon, speeds;
  std::vector<LocationFix> fixes;
  double distance = 0.0;
  TimestampMs total_ms = 0, moving_ms = 0;
  for (const auto& s : samples) {
    lat.push_back(s.fix.point.latitude);
    lon.push_back(s.fix.point.longitude);
    fixes.push_back(s.fix);
    distance += s.distance_m;
    total_ms += s.duration_ms;
    if (s.moving) moving_ms += s.duration_ms;
    if (!s.after_gap) speeds.push_back(s.speed_kmh);
  }
  const double variance = population_variance(lat) + population_variance(lon);
  out["variance"] = variance;
  out["log_variance"] = std::log(variance + kLogFloor);
  out["total_distance_m"] = distance;
  out["speed_mean_kmh"] = speeds.empty() ? std::nullopt : FeatureValue(mean(speeds));
  out["speed_variance"] =
      speeds.empty() ? std::nullopt : FeatureValue(population_variance(speeds));
  out["circadian_movement"] = circadian_movement(fixes);
  out["pct_time_moving"] =
      total_ms > 0 ? FeatureValue(100.0 * static_cast<double>(moving_ms) /
                                  static_cast<double>(total_ms))
                   : std::nullopt;

  for (const auto& [scope, name] : kScopes) {
    put_scope(out, samples, scope == PlaceScope::global ? global : local, name);
  }

  if (home) {
    TimestampMs within10 = 0, within100 = 0;
    for (const auto& s : samples) {
      if (s.moving) continue;
      const double d = haversine_distance(s.fix.point, home->center);
      if (d <= 10.0) within10 += s.duration_ms;
      if (d <= 100.0) within100 += s.duration_ms;
    }
    out["home_time_10m_min"] = minutes(within10);
    out["home_time_100m_min"] = minutes(within100);
  } else {
    out["home_time_10m_min"] = std::nullopt;
    out["home_time_100m_min"] = std::nullopt;
  }
  return out;
}

std::vector<std::string> feature_keys() {
  std::vector<std::string> keys{"variance",         "log_variance",     "total_distance_m",
                                "speed_mean_kmh",   "speed_variance",   "circadian_movement",
                                "pct_time_moving",  "home_time_10m_min", "home_time_100m_min"};
  for (const auto& [scope, name] : kScopes) {
    FeatureMap m;
    put_missing_scope(m, name);
    for (const auto& [k, v] : m) keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace sensefeat::location
