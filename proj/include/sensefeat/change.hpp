#ifndef SENSEFEAT_CHANGE_HPP
#define SENSEFEAT_CHANGE_HPP

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sensefeat/features.hpp"

namespace sensefeat::change {

/// Weekly values for weeks 1..n; nullopt marks a missing week.
struct WeeklySeries {
  std::vector<FeatureValue> values;
  int midpoint_week = 1;  // m

  int weeks() const { return static_cast<int>(values.size()); }
};

struct ChangeFeatures {
  FeatureValue slope;
  FeatureValue slope_first_half;
  FeatureValue slope_second_half;
  FeatureValue breakpoint;
  FeatureValue slope_before;
  FeatureValue slope_after;
};

inline constexpr std::array<std::string_view, 6> kFields{
    "slope", "slope_first_half", "slope_second_half", "breakpoint", "slope_before", "slope_after"};

/// Free parameters of the two-segment model: two slopes, two intercepts and
/// the noise variance.
inline constexpr int kBicParameters = 5;

/// Gaussian BIC, n ln(rss / n) + k ln(n). The RSS is floored at `rss_floor`
/// so exact fits stay finite.
double bic(double rss, std::size_t n, int k = kBicParameters, double rss_floor = 0.0);

/**
 * Slope over all weeks, over weeks 1..m and m..n (week m in both), and the
 * BIC-best two-segment breakpoint b in [2, n-2] with independent OLS lines on
 * weeks 1..b and b+1..n (ties to the smallest b). Missing weeks are dropped
 * from every fit; a fit without two distinct weeks leaves its fields MISSING.
 */
ChangeFeatures change_features(const WeeklySeries& series);

/// Field values in kFields order.
std::array<FeatureValue, 6> as_array(const ChangeFeatures& f);

}  // namespace sensefeat::change

#endif  // SENSEFEAT_CHANGE_HPP
