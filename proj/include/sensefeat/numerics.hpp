#ifndef SENSEFEAT_NUMERICS_HPP
#define SENSEFEAT_NUMERICS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sensefeat {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

struct ClusterResult {
  std::vector<int> labels;                  // -1 marks noise
  std::vector<std::vector<double>> centers;
  double sse = 0.0;

  std::size_t num_clusters() const { return centers.size(); }
};

class DegenerateClustering : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Great-circle distance in meters.
double haversine_distance(const GeoPoint& a, const GeoPoint& b);

/// Population z-score. A zero-variance input maps to all zeros.
std::vector<double> zscore(std::span<const double> values);

/// Squared euclidean distance; sizes must match.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Recomputes sum of squared distances of labelled points to their centers.
/// Noise labels are skipped.
double cluster_sse(const std::vector<std::vector<double>>& points,
                   const std::vector<int>& labels,
                   const std::vector<std::vector<double>>& centers);

struct KMeansOptions {
  int max_iterations = 300;
  int restarts = 10;
};

/**
 * Lloyd's algorithm with k-means++ seeding, keeping the best of
 * `options.restarts` seeded runs by SSE. Assignment ties go to the lowest
 * center index. A cluster that loses all points keeps its previous center,
 * so SSE never increases between iterations.
 *
 * Throws DegenerateClustering when fewer than `k` distinct points exist.
 */
ClusterResult kmeans(const std::vector<std::vector<double>>& points, int k,
                     std::uint64_t seed, const KMeansOptions& options = {});

enum class Metric { euclidean, haversine };

/**
 * Density clustering. Points are scanned in input order and clusters are
 * numbered by discovery order. Neighborhoods are closed balls (distance <=
 * eps) and include the point itself. For the haversine metric each point is
 * (latitude, longitude) in degrees and eps is in meters.
 *
 * Centers are coordinate means of each cluster's members.
 */
ClusterResult dbscan(const std::vector<std::vector<double>>& points,
                     double eps, int min_pts, Metric metric);

/**
 * Classical normalized Lomb-Scargle periodogram evaluated at `frequencies`
 * (cycles per time unit of `times`). Samples sharing a timestamp keep only the
 * first occurrence. Values are mean-centered internally; a constant signal
 * yields an all-zero spectrum.
 *
 * Throws InsufficientData with fewer than 3 distinct samples.
 */
std::vector<double> lomb_scargle_psd(std::span<const double> times,
                                     std::span<const double> values,
                                     std::span<const double> frequencies);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rss = 0.0;
};

/// Ordinary least squares. Throws DegenerateFit when xs are all equal or
/// fewer than 2 points are given.
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

// Summary statistics shared by the feature modules. All use the population
// convention.
double mean(std::span<const double> values);
double population_variance(std::span<const double> values);
double population_stddev(std::span<const double> values);

struct Summary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  double sum = 0.0;
  std::size_t count = 0;
};

/// Nullopt for an empty input.
std::optional<Summary> summarize(std::span<const double> values);

/// Deterministic 64-bit generator (splitmix64) so seeded results do not
/// depend on the standard library's distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

}  // namespace sensefeat

#endif  // SENSEFEAT_NUMERICS_HPP
