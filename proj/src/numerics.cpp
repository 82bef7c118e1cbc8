#include "sensefeat/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>

namespace sensefeat {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool all_equal(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(),
                            std::not_equal_to<>()) == values.end();
}

std::vector<std::vector<double>> cluster_means(
    const std::vector<std::vector<double>>& points,
    const std::vector<int>& labels, std::size_t k) {
  const std::size_t dim = points.empty() ? 0 : points.front().size();
  std::vector<std::vector<double>> centers(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] < 0) continue;
    auto& c = centers[static_cast<std::size_t>(labels[i])];
    for (std::size_t d = 0; d < dim; ++d) c[d] += points[i][d];
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : centers[c]) v /= static_cast<double>(counts[c]);
  }
  return centers;
}

}  // namespace

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.latitude) && std::isfinite(p.longitude) &&
         p.latitude >= -90.0 && p.latitude <= 90.0 && p.longitude >= -180.0 &&
         p.longitude <= 180.0;
}

namespace {

// Haversine with the latitude cosines supplied by the caller.
double haversine_with_cos(const GeoPoint& a, const GeoPoint& b, double cos1, double cos2) {
  const double dphi = (b.latitude - a.latitude) * kDegToRad;
  const double dlambda = (b.longitude - a.longitude) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + cos1 * cos2 * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

}  // namespace

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
  return haversine_with_cos(a, b, std::cos(a.latitude * kDegToRad),
                            std::cos(b.latitude * kDegToRad));
}

std::vector<double> zscore(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("zscore: empty input");
  std::vector<double> out(values.size(), 0.0);
  if (all_equal(values)) return out;
  const double mu = mean(values);
  const double sd = population_stddev(values);
  if (sd == 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mu) / sd;
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double cluster_sse(const std::vector<std::vector<double>>& points,
                   const std::vector<int>& labels,
                   const std::vector<std::vector<double>>& centers) {
  double sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] < 0) continue;
    sse += squared_distance(points[i], centers[static_cast<std::size_t>(labels[i])]);
  }
  return sse;
}

// ---------------------------------------------------------------------------
// k-means

namespace {

std::vector<std::vector<double>> kmeans_plus_plus(
    const std::vector<std::vector<double>>& points, int k, SplitMix64& rng) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> centers;
  centers.reserve(static_cast<std::size_t>(k));
  centers.push_back(points[rng.below(n)]);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (centers.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
      total += d2[i];
    }
    // Distinct points >= k guarantees total > 0 here.
    double target = rng.uniform() * total;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] == 0.0) continue;
      pick = i;
      target -= d2[i];
      if (target < 0.0) break;
    }
    centers.push_back(points[pick]);
  }
  return centers;
}

std::size_t nearest_center(std::span<const double> p,
                           const std::vector<std::vector<double>>& centers) {
  std::size_t best = 0;
  double best_d = squared_distance(p, centers[0]);
  for (std::size_t c = 1; c < centers.size(); ++c) {
    const double d = squared_distance(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

ClusterResult lloyd(const std::vector<std::vector<double>>& points,
                    std::vector<std::vector<double>> centers, int max_iterations) {
  const std::size_t n = points.size();
  const std::size_t k = centers.size();
  std::vector<int> labels(n, -1);
  [[maybe_unused]] double previous_sse = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = static_cast<int>(nearest_center(points[i], centers));
      if (c != labels[i]) {
        labels[i] = c;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::size_t> counts(k, 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    auto means = cluster_means(points, labels, k);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) centers[c] = std::move(means[c]);
    }
#ifndef NDEBUG
    const double sse = cluster_sse(points, labels, centers);
    assert(sse <= previous_sse * (1.0 + 1e-12) + 1e-12);
    previous_sse = sse;
#endif
  }
  ClusterResult result;
  result.sse = cluster_sse(points, labels, centers);
  result.labels = std::move(labels);
  result.centers = std::move(centers);
  return result;
}

}  // namespace

ClusterResult kmeans(const std::vector<std::vector<double>>& points, int k,
                     std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (points.empty()) throw std::invalid_argument("kmeans: no points");
  std::vector<std::vector<double>> distinct = points;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < static_cast<std::size_t>(k)) {
    throw DegenerateClustering("kmeans: " + std::to_string(distinct.size()) +
                               " distinct points for k=" + std::to_string(k));
  }

  std::optional<ClusterResult> best;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    SplitMix64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(r + 1)));
    ClusterResult run = lloyd(points, kmeans_plus_plus(points, k, rng),
                              options.max_iterations);
    if (!best || run.sse < best->sse) best = std::move(run);
  }
  return std::move(*best);
}

// ---------------------------------------------------------------------------
// DBSCAN

namespace {

// Exact range queries: candidates are pre-filtered on the first coordinate,
// whose difference never exceeds the true distance under either metric.
class RangeIndex {
 public:
  RangeIndex(const std::vector<std::vector<double>>& points, double eps, Metric metric)
      : points_(points), eps_(eps), metric_(metric), order_(points.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return points_[a][0] < points_[b][0];
    });
    keys_.reserve(order_.size());
    for (std::size_t i : order_) keys_.push_back(points_[i][0]);
    if (metric_ == Metric::haversine) {
      cos_.reserve(points_.size());
      for (const auto& p : points_) cos_.push_back(std::cos(p[0] * kDegToRad));
    }
    // Meridian arc length per degree of latitude bounds the haversine distance
    // from below; pad slightly against rounding.
    window_ = metric_ == Metric::haversine
                  ? eps_ / (kEarthRadiusM * kDegToRad) * (1.0 + 1e-9) + 1e-12
                  : eps_;
  }

  std::vector<std::size_t> neighbors(std::size_t i) const {
    const double key = points_[i][0];
    auto lo = std::lower_bound(keys_.begin(), keys_.end(), key - window_);
    auto hi = std::upper_bound(keys_.begin(), keys_.end(), key + window_);
    std::vector<std::size_t> out;
    for (auto it = lo; it != hi; ++it) {
      const std::size_t j = order_[static_cast<std::size_t>(it - keys_.begin())];
      if (distance(i, j) <= eps_) out.push_back(j);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  double distance(std::size_t a, std::size_t b) const {
    if (metric_ == Metric::haversine) {
      return haversine_with_cos({points_[a][0], points_[a][1]}, {points_[b][0], points_[b][1]},
                                cos_[a], cos_[b]);
    }
    return std::sqrt(squared_distance(points_[a], points_[b]));
  }

  const std::vector<std::vector<double>>& points_;
  double eps_;
  Metric metric_;
  double window_ = 0.0;
  std::vector<std::size_t> order_;
  std::vector<double> keys_;
  std::vector<double> cos_;
};

}  // namespace

ClusterResult dbscan(const std::vector<std::vector<double>>& points, double eps,
                     int min_pts, Metric metric) {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan: eps must be > 0");
  if (min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");
  ClusterResult result;
  const std::size_t n = points.size();
  result.labels.assign(n, -1);
  if (n == 0) return result;
  if (metric == Metric::haversine) {
    for (const auto& p : points) {
      if (p.size() < 2) throw std::invalid_argument("dbscan: haversine needs (lat, lon)");
    }
  }

  constexpr int kUnvisited = -2;
  std::vector<int> state(n, kUnvisited);
  const RangeIndex index(points, eps, metric);
  const auto min_size = static_cast<std::size_t>(min_pts);
  int cluster = 0;

  for (std::size_t p = 0; p < n; ++p) {
    if (state[p] != kUnvisited) continue;
    const auto seeds = index.neighbors(p);
    if (seeds.size() < min_size) {
      state[p] = -1;
      continue;
    }
    state[p] = cluster;
    // Points are labelled when first reached, so each one is queued at most once.
    std::deque<std::size_t> queue;
    auto reach = [&](const std::vector<std::size_t>& found) {
      for (std::size_t r : found) {
        if (state[r] == -1) state[r] = cluster;  // border point
        if (state[r] != kUnvisited) continue;
        state[r] = cluster;
        queue.push_back(r);
      }
    };
    reach(seeds);
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      const auto more = index.neighbors(q);
      if (more.size() >= min_size) reach(more);
    }
    ++cluster;
  }

  result.labels = std::move(state);
  result.centers = cluster_means(points, result.labels, static_cast<std::size_t>(cluster));
  result.sse = cluster_sse(points, result.labels, result.centers);
  return result;
}

// ---------------------------------------------------------------------------
// Lomb-Scargle

std::vector<double> lomb_scargle_psd(std::span<const double> times,
                                     std::span<const double> values,
                                     std::span<const double> frequencies) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("lomb_scargle_psd: times/values size mismatch");
  }
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t i : order) {
    if (!t.empty() && times[i] == t.back()) continue;
    t.push_back(times[i]);
    y.push_back(values[i]);
  }
  if (t.size() < 3) {
    throw InsufficientData("lomb_scargle_psd: need at least 3 distinct samples");
  }

  std::vector<double> psd(frequencies.size(), 0.0);
  if (all_equal(y)) return psd;
  const double mu = mean(y);
  for (double& v : y) v -= mu;
  const double n = static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += v * v;
  var /= (n - 1.0);
  if (var <= 0.0) return psd;

  const double t0 = t.front();
  for (double& v : t) v -= t0;

  for (std::size_t f = 0; f < frequencies.size(); ++f) {
    const double omega = 2.0 * std::numbers::pi * frequencies[f];
    if (omega == 0.0) continue;
    double s2 = 0.0;
    double c2 = 0.0;
    for (double ti : t) {
      s2 += std::sin(2.0 * omega * ti);
      c2 += std::cos(2.0 * omega * ti);
    }
    const double tau = std::atan2(s2, c2) / (2.0 * omega);
    double yc = 0.0, ys = 0.0, cc = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double arg = omega * (t[i] - tau);
      const double c = std::cos(arg);
      const double s = std::sin(arg);
      yc += y[i] * c;
      ys += y[i] * s;
      cc += c * c;
      ss += s * s;
    }
    double p = 0.0;
    if (cc > 0.0) p += yc * yc / cc;
    if (ss > 0.0) p += ys * ys / ss;
    psd[f] = std::max(0.0, p / (2.0 * var));
  }
  return psd;
}

// ---------------------------------------------------------------------------
// Regression and statistics

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("linear_fit: size mismatch");
  if (xs.size() < 2) throw DegenerateFit("linear_fit: need at least 2 points");
  const double xbar = mean(xs);
  const double ybar = mean(ys);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (all_equal(xs) || sxx == 0.0) throw DegenerateFit("linear_fit: xs are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    fit.rss += r * r;
  }
  return fit;
}

double mean(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (all_equal(values)) return 0.0;
  const double mu = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - mu) * (v - mu);
  return s / static_cast<double>(values.size());
}

double population_stddev(std::span<const double> values) {
  return std::sqrt(population_variance(values));
}

std::optional<Summary> summarize(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  Summary s;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.sum = std::accumulate(values.begin(), values.end(), 0.0);
  s.count = values.size();
  s.mean = all_equal(values) ? values.front() : s.sum / static_cast<double>(s.count);
  s.stddev = population_stddev(values);
  return s;
}

// ---------------------------------------------------------------------------

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  return bound == 0 ? 0 : next() % bound;
}

}  // namespace sensefeat
