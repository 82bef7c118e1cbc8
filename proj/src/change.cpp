#include "sensefeat/change.hpp"

#include <cmath>
#include <limits>

namespace sensefeat::change {

namespace {

struct Points {
  std::vector<double> weeks;
  std::vector<double> values;
};

// Observed points for weeks first..last (1-based, inclusive).
Points observed(const WeeklySeries& s, int first, int last) {
  Points p;
  for (int w = first; w <= last && w <= s.weeks(); ++w) {
    const auto& v = s.values[static_cast<std::size_t>(w - 1)];
    if (!v) continue;
    p.weeks.push_back(w);
    p.values.push_back(*v);
  }
  return p;
}

std::optional<LinearFit> try_fit(const Points& p) {
  try {
    return linear_fit(p.weeks, p.values);
  } catch (const DegenerateFit&) {
    return std::nullopt;
  }
}

FeatureValue slope_of(const WeeklySeries& s, int first, int last) {
  const auto fit = try_fit(observed(s, first, last));
  return fit ? FeatureValue(fit->slope) : std::nullopt;
}

}  // namespace

double bic(double rss, std::size_t n, int k, double rss_floor) {
  const double nn = static_cast<double>(n);
  return nn * std::log(std::max(rss, rss_floor) / nn) + k * std::log(nn);
}

ChangeFeatures change_features(const WeeklySeries& series) {
  ChangeFeatures f;
  const int n = series.weeks();
  const int m = series.midpoint_week;
  f.slope = slope_of(series, 1, n);
  f.slope_first_half = slope_of(series, 1, m);
  f.slope_second_half = slope_of(series, m, n);

  const Points all = observed(series, 1, n);
  if (all.values.size() < 4) return f;

  // Floor relative to the total sum of squares: invariant to shifting and
  // scaling the series, and keeps exact fits finite.
  const double tss = population_variance(all.values) * static_cast<double>(all.values.size());
  const double floor = std::max(tss * 1e-24, 1e-300);

  double best = std::numeric_limits<double>::infinity();
  for (int b = 2; b <= n - 2; ++b) {
    const auto before = try_fit(observed(series, 1, b));
    const auto after = try_fit(observed(series, b + 1, n));
    if (!before || !after) continue;
    const double score = bic(before->rss + after->rss, all.values.size(), kBicParameters, floor);
    if (score < best) {
      best = score;
      f.breakpoint = b;
      f.slope_before = before->slope;
      f.slope_after = after->slope;
    }
  }
  return f;
}

std::array<FeatureValue, 6> as_array(const ChangeFeatures& f) {
  return {f.slope, f.slope_first_half, f.slope_second_half, f.breakpoint, f.slope_before,
          f.slope_after};
}

}  // namespace sensefeat::change
