#ifndef SENSEFEAT_CALLS_HPP
#define SENSEFEAT_CALLS_HPP

#include <span>
#include <string>
#include <vector>

#include "sensefeat/features.hpp"
#include "sensefeat/records.hpp"

namespace sensefeat::calls {

/// Call counts and durations per direction and contact category, plus
/// correspondent counts, over calls already assigned to a slice. Unlisted
/// correspondents count toward `everyone` only. An empty slice yields zeros.
FeatureMap call_features(std::span<const CallRecord> calls, const ContactDirectory& directory);

std::vector<std::string> feature_keys();

}  // namespace sensefeat::calls

#endif  // SENSEFEAT_CALLS_HPP
