#include "sensefeat/calls.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace sensefeat::calls {

namespace {

constexpr std::array<CallDirection, 3> kDirections{CallDirection::incoming,
                                                   CallDirection::outgoing,
                                                   CallDirection::missed};
constexpr std::array<ContactCategory, 3> kListed{ContactCategory::family,
                                                 ContactCategory::friend_off_campus,
                                                 ContactCategory::friend_on_campus};

std::string scope(CallDirection d, std::string_view category) {
  return std::string(to_string(d)) + "_" + std::string(category);
}

}  // namespace

FeatureMap call_features(std::span<const CallRecord> calls, const ContactDirectory& directory) {
  FeatureMap out;
  for (auto d : kDirections) {
    out[feature_key("count", scope(d, "everyone"))] = 0.0;
    out[feature_key("duration_s", scope(d, "everyone"))] = 0.0;
    for (auto c : kListed) {
      out[feature_key("count", scope(d, to_string(c)))] = 0.0;
      out[feature_key("duration_s", scope(d, to_string(c)))] = 0.0;
    }
  }

  std::set<std::string> everyone;
  std::map<ContactCategory, std::set<std::string>> by_category;
  for (const auto& call : calls) {
    const auto category = directory.category_of(call.correspondent);
    *out[feature_key("count", scope(call.direction, "everyone"))] += 1.0;
    *out[feature_key("duration_s", scope(call.direction, "everyone"))] += call.duration_s;
    everyone.insert(call.correspondent);
    if (category != ContactCategory::other) {
      *out[feature_key("count", scope(call.direction, to_string(category)))] += 1.0;
      *out[feature_key("duration_s", scope(call.direction, to_string(category)))] +=
          call.duration_s;
      by_category[category].insert(call.correspondent);
    }
  }

  out[feature_key("correspondents", "everyone")] = static_cast<double>(everyone.size());
  for (auto c : kListed) {
    out[feature_key("correspondents", to_string(c))] =
        static_cast<double>(by_category[c].size());
  }
  return out;
}

std::vector<std::string> feature_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : call_features({}, ContactDirectory{})) keys.push_back(k);
  return keys;
}

}  // namespace sensefeat::calls
