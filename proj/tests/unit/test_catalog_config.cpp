#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <regex>
#include <sstream>

#include "fixture.hpp"
#include "sensefeat/change.hpp"
#include "sensefeat/config.hpp"
#include "sensefeat/pipeline.hpp"

using namespace sensefeat;
using namespace std::chrono;
using sensefeat::testing::scratch_dir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::regex kNameGrammar(
    R"(^[a-z_]+:[a-z0-9_]+(:[a-z0-9_]+)?:(all_day|night|morning|afternoon|evening):)"
    R"((daily|weekly|weekdays|weekends|half_term|full_term)(:first|:second)?)"
    R"((:change:(slope|slope_first_half|slope_second_half|breakpoint|slope_before|slope_after))?$)");

}  // namespace

TEST_CASE("feature names") {
  const TimeSlice weekly{Epoch::night, Granularity::weekly, 2, {}};
  CHECK(feature_name(Sensor::sleep, "count:asleep", weekly) == "sleep:count:asleep:night:weekly");
  const TimeSlice second{Epoch::morning, Granularity::half_term, 2, {}};
  CHECK(feature_name(Sensor::screen, "unlocks_per_min", second) ==
        "screen:unlocks_per_min:morning:half_term:second");
  CHECK(change_feature_name("sleep:count:asleep:night:weekly", "slope") ==
        "sleep:count:asleep:night:weekly:change:slope");
}

TEST_CASE("sleep-only catalog") {
  CatalogSelection sel;
  sel.sensors = {Sensor::sleep};
  const auto names = enumerate_catalog(sel);
  for (const auto& n : names) {
    CHECK(n.rfind("sleep:", 0) == 0);
    CHECK(std::regex_match(n, kNameGrammar));
  }
  // 4 state counts, 2 efficiencies and 9 bout statistics for each of 3
  // states; per epoch: daily, weekdays, weekends, full term, two half terms
  // and weekly plus its six change fields.
  const std::size_t keys = 4 + 2 + 9 * 3;
  CHECK(names.size() == keys * 5 * (1 + 1 + 1 + 1 + 2 + (1 + 6)));
  CHECK(enumerate_catalog(sel) == names);
  CHECK(std::is_sorted(names.begin(), names.end()));
}

TEST_CASE("full catalog matches a counting enumeration") {
  CatalogSelection sel;
  const auto names = enumerate_catalog(sel);
  std::size_t expected = 0;
  for (Sensor s : kAllSensors) {
    std::size_t per_epoch = 0;
    for (Granularity g : kAllGranularities) {
      const std::size_t shapes = g == Granularity::half_term ? 2 : 1;
      const std::size_t extra = g == Granularity::weekly ? change::kFields.size() : 0;
      per_epoch += shapes * (1 + extra);
    }
    expected += sensor_feature_keys(s).size() * kAllEpochs.size() * per_epoch;
  }
  CHECK(names.size() == expected);
  CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
  for (const auto& n : names) CHECK(std::regex_match(n, kNameGrammar));

  CatalogSelection no_weekly;
  no_weekly.granularities = {Granularity::daily};
  for (const auto& n : enumerate_catalog(no_weekly)) {
    CHECK(n.find(":change:") == std::string::npos);
  }
}

TEST_CASE("value formatting round-trips") {
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.below(30)) - 15);
    CHECK(std::stod(format_value(v)) == v);
  }
  CHECK(format_value(5.0) == "5");
  CHECK(format_value(0.25) == "0.25");
}

TEST_CASE("zero rows give a header-only csv") {
  const auto dir = scratch_dir("out-empty");
  write_matrix({}, dir / "m.csv", MatrixFormat::csv);
  CHECK(slurp(dir / "m.csv") == "participant,feature,slice,value\n");
  write_matrix({}, dir / "m.jsonl", MatrixFormat::jsonl);
  CHECK(slurp(dir / "m.jsonl").empty());
}

TEST_CASE("missing values and sorting") {
  const auto dir = scratch_dir("out-missing");
  std::vector<FeatureRow> rows{{"p2", "a", "s", 1.5},
                               {"p1", "b", "s", std::nullopt},
                               {"p1", "a", "t", 2.0},
                               {"p1", "a", "s", 0.0}};
  write_matrix(rows, dir / "m.csv", MatrixFormat::csv);
  CHECK(slurp(dir / "m.csv") ==
        "participant,feature,slice,value\n"
        "p1,a,s,0\n"
        "p1,a,t,2\n"
        "p1,b,s,\n"
        "p2,a,s,1.5\n");
  write_matrix(rows, dir / "m.jsonl", MatrixFormat::jsonl);
  const auto text = slurp(dir / "m.jsonl");
  CHECK(text.find("\"value\":null") != std::string::npos);
}

TEST_CASE("csv and jsonl read back exactly") {
  const auto dir = scratch_dir("out-roundtrip");
  SplitMix64 rng(5);
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 500; ++i) {
    FeatureRow r{"p" + std::to_string(rng.below(5)), "f:" + std::to_string(i), "s", std::nullopt};
    if (rng.uniform() < 0.8) r.value = (rng.uniform() - 0.3) * 1e6 / (1 + rng.below(1000));
    rows.push_back(r);
  }
  auto sorted = rows;
  sort_rows(sorted);
  for (auto fmt : {MatrixFormat::csv, MatrixFormat::jsonl}) {
    const auto path = dir / (fmt == MatrixFormat::csv ? "m.csv" : "m.jsonl");
    write_matrix(rows, path, fmt);
    CHECK(read_matrix(path, fmt) == sorted);
  }
}

TEST_CASE("writer errors") {
  const auto dir = scratch_dir("out-errors");
  CHECK_THROWS_AS(write_matrix({{"p", "f", "s", std::nan("")}}, dir / "m.csv", MatrixFormat::csv),
                  OutputError);
  CHECK_THROWS_AS(write_matrix({}, dir / "missing" / "deeper" / "m.csv", MatrixFormat::csv),
                  OutputError);
  // A failed write leaves an existing file untouched.
  write_file_atomically(dir / "keep.txt", "old");
  CHECK_THROWS(write_matrix({{"p", "f", "s", INFINITY}}, dir / "keep.txt", MatrixFormat::csv));
  CHECK(slurp(dir / "keep.txt") == "old");
  write_file_atomically(dir / "keep.txt", "new");
  CHECK(slurp(dir / "keep.txt") == "new");
}

TEST_CASE("change rows from weekly rows") {
  StudyConfig c;
  c.start = 2024y / March / 4;
  c.end = 2024y / March / 31;
  const auto cal = resolve_calendar(c);
  REQUIRE(cal.weeks_n == 4);
  const std::string f = "sleep:count:asleep:all_day:weekly";
  std::vector<FeatureRow> weekly{{"p", f, "all_day:weekly:001", 1.0},
                                 {"p", f, "all_day:weekly:002", 3.0},
                                 {"p", f, "all_day:weekly:003", std::nullopt},
                                 {"p", f, "all_day:weekly:004", 7.0}};
  const auto rows = change_rows(weekly, cal);
  REQUIRE(rows.size() == change::kFields.size());
  for (const auto& r : rows) {
    CHECK(r.slice == kStudySliceId);
    CHECK(r.feature.rfind(f + ":change:", 0) == 0);
  }
  auto slope = std::find_if(rows.begin(), rows.end(),
                            [&](auto& r) { return r.feature == f + ":change:slope"; });
  CHECK(*slope->value == doctest::Approx(2.0));
  // Only three observed weeks: no breakpoint.
  auto bp = std::find_if(rows.begin(), rows.end(),
                         [&](auto& r) { return r.feature == f + ":change:breakpoint"; });
  CHECK_FALSE(bp->value.has_value());
}

TEST_CASE("toml subset") {
  const auto kv = parse_toml(
      "# comment\n"
      "start = 2024-03-04  # trailing\n"
      "name = \"a # b\"\n"
      "n = -3\n"
      "x = 2.5\n"
      "flag = true\n"
      "list = [\"sleep\", \"steps\"]\n"
      "[location]\n"
      "eps_m = 30\n");
  CHECK(std::get<CivilDate>(kv.at("start").value) == 2024y / March / 4);
  CHECK(std::get<std::string>(kv.at("name").value) == "a # b");
  CHECK(std::get<std::int64_t>(kv.at("n").value) == -3);
  CHECK(std::get<double>(kv.at("x").value) == 2.5);
  CHECK(std::get<bool>(kv.at("flag").value));
  CHECK(std::get<TomlValue::Array>(kv.at("list").value).size() == 2);
  CHECK(std::get<std::int64_t>(kv.at("location.eps_m").value) == 30);

  CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = \"open\n"), ConfigError);
}

TEST_CASE("run config") {
  const auto cfg = parse_run_config(
      "start = 2024-03-04\nend = 2024-03-17\ntimezone = \"America/New_York\"\nseed = 7\n"
      "sensors = [\"sleep\", \"screen\"]\n[location]\neps_m = 25.5\nmin_pts = 4\n"
      "[places]\nmap = \"m.json\"\n",
      "/base");
  CHECK(cfg.seed == 7);
  CHECK(cfg.sensors == std::set<Sensor>{Sensor::sleep, Sensor::screen});
  CHECK(cfg.location.eps_m == 25.5);
  CHECK(cfg.location.min_pts == 4);
  CHECK(*cfg.place_map == std::filesystem::path("/base/m.json"));

  const std::string dates = "start = 2024-03-04\nend = 2024-03-17\n";
  CHECK(parse_run_config(dates).seed == 42);
  CHECK_THROWS_AS(parse_run_config(dates + "colour = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(dates + "sensors = [\"radar\"]\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(dates + "timezone = \"Nowhere/None\"\n"), std::exception);
  CHECK_THROWS_AS(parse_run_config(dates + "[location]\neps_m = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("start = 2024-03-04\n"), ConfigError);
  CHECK_THROWS_AS(load_run_config(scratch_dir("cfg-none") / "nope.toml"), ConfigError);
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
