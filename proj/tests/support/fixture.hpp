#ifndef SENSEFEAT_TESTS_FIXTURE_HPP
#define SENSEFEAT_TESTS_FIXTURE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sensefeat::testing {

struct FixtureLayout {
  std::filesystem::path root;
  std::filesystem::path config;
  std::filesystem::path input;
  std::filesystem::path place_map;
  std::vector<std::string> participants;
};

/// Writes a synthetic dataset under `root`: a run config, a campus place map
/// and `participants` participants with `days` days of every stream, starting
/// Monday 2024-03-04 in America/New_York (the span crosses the March DST
/// change).
FixtureLayout write_fixture(const std::filesystem::path& root, int participants = 2,
                            int days = 14, std::uint64_t seed = 7);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace sensefeat::testing

#endif  // SENSEFEAT_TESTS_FIXTURE_HPP
