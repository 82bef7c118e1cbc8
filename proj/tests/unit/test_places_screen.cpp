#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sensefeat/places.hpp"
#include "sensefeat/screen.hpp"

using namespace sensefeat;
using namespace std::chrono;
using places::PlaceSample;
using places::PlaceType;
using screen::BoutKind;

namespace {

constexpr TimestampMs kMin = kMsPerMinute;

// `minutes` one-minute samples of one type starting at `start`.
void visit(std::vector<PlaceSample>& out, PlaceType type, TimestampMs start, int minutes) {
  for (int i = 0; i < minutes; ++i) {
    out.push_back({start + i * kMin, type, kMin, out.empty()});
  }
}

std::vector<ConversationInference> talk(TimestampMs start, int count, int voiced) {
  std::vector<ConversationInference> out;
  for (int i = 0; i < count; ++i) {
    out.push_back({start + i * 30'000,
                   i < voiced ? (i % 2 ? ConversationLabel::noise : ConversationLabel::voice)
                              : ConversationLabel::silence});
  }
  return out;
}

TimeSlice slice_of(Epoch epoch) {
  StudyConfig c;
  c.start = 2024y / March / 5;
  c.end = 2024y / March / 5;
  for (auto& s : build_slices(c)) {
    if (s.epoch == epoch && s.granularity == Granularity::daily) return s;
  }
  throw std::logic_error("no slice");
}

const char* kSquares = R"([
  {"type": "academic",  "polygon": [[0,0],[0,1],[1,1],[1,0]]},
  {"type": "greek_all", "polygon": [[0,1],[0,2],[1,2],[1,1],[0,1]]},
  {"type": "athletic",  "polygon": [[5,5],[5,6],[6,6]]}
])";

}  // namespace

TEST_CASE("point in place") {
  const auto map = places::parse_place_map(kSquares);
  REQUIRE(map.polygons.size() == 3);
  CHECK(map.polygons[1].ring.size() == 4);  // closing vertex dropped
  CHECK(places::point_in_place({0.5, 0.5}, map) == PlaceType::academic);
  CHECK(places::point_in_place({0.5, 1.5}, map) == PlaceType::greek_all);
  CHECK(places::point_in_place({3, 3}, map) == PlaceType::off_campus);
  // Shared edge at lon = 1 belongs to the earlier polygon.
  CHECK(places::point_in_place({0.5, 1.0}, map) == PlaceType::academic);
}

TEST_CASE("place map errors") {
  CHECK_THROWS_AS(places::parse_place_map("{"), places::PlaceMapError);
  CHECK_THROWS_AS(places::parse_place_map(R"([{"type":"castle","polygon":[[0,0],[0,1],[1,1]]}])"),
                  places::PlaceMapError);
  CHECK_THROWS_AS(places::parse_place_map(R"([{"type":"academic","polygon":[[0,0],[0,1]]}])"),
                  places::PlaceMapError);
  CHECK_THROWS_AS(places::parse_place_map(R"([{"type":"academic","polygon":[[0,0],[0,1],[91,1]]}])"),
                  places::PlaceMapError);
  const auto fc = places::parse_place_map(
      R"({"features":[{"type":"green_space","polygon":[[0,0],[0,1],[1,1]]}]})");
  CHECK(fc.polygons.size() == 1);
}

TEST_CASE("45 continuous academic minutes") {
  std::vector<PlaceSample> s;
  visit(s, PlaceType::academic, 0, 45);
  auto f = places::place_features(s);
  CHECK(*f["bouts:academic"] == 1);
  CHECK(*f["bouts_ge10:academic"] == 1);
  CHECK(*f["bouts_ge20:academic"] == 1);
  CHECK(*f["bouts_ge30:academic"] == 1);
  CHECK(*f["dwell_min:academic"] == 45);
  CHECK(*f["pct_dwell:academic"] == 100);
  CHECK(*f["bout_max_min:academic"] == 45);
  CHECK(*f["bout_std_min:academic"] == 0);
  CHECK(*f["transitions"] == 0);
  CHECK(*f["bouts:off_campus"] == 0);
  CHECK_FALSE(f["bout_mean_min:off_campus"].has_value());
}

TEST_CASE("alternating samples") {
  std::vector<PlaceSample> s;
  visit(s, PlaceType::academic, 0, 1);
  visit(s, PlaceType::athletic, kMin, 1);
  visit(s, PlaceType::academic, 2 * kMin, 1);
  visit(s, PlaceType::athletic, 3 * kMin, 1);
  auto f = places::place_features(s);
  CHECK(*f["transitions"] == 3);
  CHECK(*f["bouts:academic"] + *f["bouts:athletic"] == 4);
}

TEST_CASE("gaps split bouts") {
  std::vector<PlaceSample> s;
  visit(s, PlaceType::academic, 0, 15);
  std::vector<PlaceSample> later;
  visit(later, PlaceType::academic, kMsPerHour, 15);
  s.insert(s.end(), later.begin(), later.end());
  const auto bouts = places::extract_bouts(s);
  REQUIRE(bouts.size() == 2);
  CHECK(bouts[0].minutes() == 15);
  CHECK(bouts[1].start == kMsPerHour);
}

TEST_CASE("empty slice") {
  const auto f = places::place_features({});
  for (const auto& [k, v] : f) {
    if (v) CHECK(*v == 0.0);
  }
  CHECK(f.size() + 2 == places::feature_keys().size());
}

TEST_CASE("classify_fixes caps durations and flags gaps") {
  const auto map = places::parse_place_map(kSquares);
  const std::vector<LocationFix> fixes{
      {0, {0.5, 0.5}}, {60'000, {0.5, 0.5}}, {60'000 + kMsPerHour, {0.5, 1.5}}};
  const auto s = places::classify_fixes(fixes, map);
  REQUIRE(s.size() == 3);
  CHECK(s[0].duration_ms == 60'000);
  CHECK(s[1].duration_ms == 300'000);
  CHECK(s[2].after_gap);
  CHECK(s[2].type == PlaceType::greek_all);
}

TEST_CASE("study duration rules") {
  const std::vector<StepBin> quiet;
  const std::vector<screen::InteractionBout> no_phone;
  std::vector<PlaceSample> s;
  visit(s, PlaceType::academic, 0, 35);
  CHECK(*places::study_duration(s, quiet, no_phone) == 35);

  s.clear();
  visit(s, PlaceType::academic, 0, 29);
  CHECK(*places::study_duration(s, quiet, no_phone) == 0);
  s.clear();
  visit(s, PlaceType::academic, 0, 30);
  CHECK(*places::study_duration(s, quiet, no_phone) == 30);

  s.clear();
  visit(s, PlaceType::academic, 0, 40);
  const std::vector<ScreenEvent> ev{{10 * kMin, ScreenStatus::unlock}, {12 * kMin, ScreenStatus::off}};
  const auto bouts = screen::extract_bouts(ev);
  CHECK(*places::study_duration(s, quiet, bouts) == 0);

  const std::vector<StepBin> busy{{20 * kMin, 10}};
  CHECK(*places::study_duration(s, busy, no_phone) == 0);
  const std::vector<StepBin> light{{20 * kMin, 9}};
  CHECK(*places::study_duration(s, light, no_phone) == 40);

  CHECK_FALSE(places::study_duration(s, std::nullopt, no_phone).has_value());
  CHECK_FALSE(places::study_duration(s, quiet, std::nullopt).has_value());
}

TEST_CASE("social duration rules") {
  std::vector<PlaceSample> s;
  visit(s, PlaceType::green_space, 0, 25);
  CHECK(*places::social_duration(s, talk(0, 20, 18)) == 25);
  CHECK(*places::social_duration(s, talk(0, 20, 10)) == 0);
  CHECK(*places::social_duration(s, talk(0, 20, 16)) == 25);  // exactly 80%
  CHECK(*places::social_duration(s, talk(0, 50, 39)) == 0);   // 78% over the bout
  CHECK(*places::social_duration(s, talk(0, 50, 40)) == 25);
  CHECK_FALSE(places::social_duration(s, std::nullopt).has_value());

  s.clear();
  visit(s, PlaceType::residential_hall, 0, 15);
  CHECK(*places::social_duration(s, talk(0, 20, 20)) == 0);
  s.clear();
  visit(s, PlaceType::residential_hall, 0, 19);
  CHECK(*places::social_duration(s, talk(0, 20, 20)) == 0);
  s.clear();
  visit(s, PlaceType::residential_hall, 0, 20);
  CHECK(*places::social_duration(s, talk(0, 20, 20)) == 20);

  s.clear();
  visit(s, PlaceType::academic, 0, 60);
  CHECK(*places::social_duration(s, talk(0, 20, 20)) == 0);
}

TEST_CASE("place invariants on random sequences") {
  SplitMix64 rng(19);
  for (int t = 0; t < 100; ++t) {
    std::vector<PlaceSample> s;
    TimestampMs now = 0;
    for (int v = 0; v < 8; ++v) {
      const auto type = places::kAllPlaceTypes[rng.below(8)];
      const int n = 1 + static_cast<int>(rng.below(50));
      for (int i = 0; i < n; ++i) {
        const bool gap = i == 0 && rng.uniform() < 0.2;
        s.push_back({now, type, static_cast<TimestampMs>(1 + rng.below(4)) * 30'000, gap});
        now += kMin;
      }
    }
    const auto f = places::place_features(s);
    double dwell = 0;
    TimestampMs total = 0;
    for (const auto& x : s) total += x.duration_ms;
    for (auto type : places::kAllPlaceTypes) {
      const std::string k(places::to_string(type));
      dwell += *f.at("dwell_min:" + k);
      CHECK(*f.at("bouts_ge30:" + k) <= *f.at("bouts_ge20:" + k));
      CHECK(*f.at("bouts_ge20:" + k) <= *f.at("bouts_ge10:" + k));
      CHECK(*f.at("bouts_ge10:" + k) <= *f.at("bouts:" + k));
    }
    CHECK(std::abs(dwell - static_cast<double>(total) / kMin) <= 1e-6);

    std::vector<StepBin> no_steps;
    std::vector<screen::InteractionBout> no_phone;
    const double study = *places::study_duration(s, no_steps, no_phone);
    CHECK(study <= *f.at("dwell_min:academic") + 1e-9);
    auto conv = talk(0, static_cast<int>(now / 30'000), static_cast<int>(now / 30'000));
    double social_dwell = 0;
    for (auto type : places::kAllPlaceTypes) {
      if (places::is_social_setting(type)) social_dwell += *f.at("dwell_min:" + std::string(places::to_string(type)));
    }
    CHECK(*places::social_duration(s, conv) <= social_dwell + 1e-9);
  }
}

TEST_CASE("screen bout extraction examples") {
  auto b = screen::extract_bouts(std::vector<ScreenEvent>{{0, ScreenStatus::unlock},
                                                          {120'000, ScreenStatus::off}});
  auto interactions = std::count_if(b.begin(), b.end(), [](auto& x) { return x.kind == BoutKind::interaction; });
  REQUIRE(interactions == 1);
  CHECK(b[0].length() == 120'000);

  b = screen::extract_bouts(std::vector<ScreenEvent>{{0, ScreenStatus::on}, {10'000, ScreenStatus::off}});
  CHECK(b.empty());

  b = screen::extract_bouts(std::vector<ScreenEvent>{{0, ScreenStatus::unlock},
                                                     {10, ScreenStatus::lock},
                                                     {20, ScreenStatus::unlock},
                                                     {30, ScreenStatus::off}});
  interactions = std::count_if(b.begin(), b.end(), [](auto& x) { return x.kind == BoutKind::interaction; });
  CHECK(interactions == 2);

  b = screen::extract_bouts(std::vector<ScreenEvent>{{0, ScreenStatus::unlock}, {50, ScreenStatus::on}});
  REQUIRE(b.size() == 2);
  CHECK(b[0].unterminated);
  CHECK(b[0].end == 50);
}

TEST_CASE("screen bouts ignore interleaved on events") {
  SplitMix64 rng(29);
  for (int t = 0; t < 100; ++t) {
    std::vector<ScreenEvent> ev;
    for (int i = 0; i < 30; ++i) {
      const auto st = static_cast<ScreenStatus>(1 + rng.below(3));  // off, lock, unlock
      ev.push_back({i * 1000, st});
    }
    const auto ref = screen::extract_bouts(ev);
    auto noisy = ev;
    for (int i = 0; i < 10; ++i) {
      noisy.push_back({static_cast<TimestampMs>(rng.below(29)) * 1000 + 500, ScreenStatus::on});
    }
    std::sort(noisy.begin(), noisy.end());
    noisy.push_back({29'000, ScreenStatus::on});  // same last timestamp as ev
    std::stable_sort(noisy.begin(), noisy.end(),
                     [](auto& a, auto& b) { return a.timestamp < b.timestamp; });
    const auto got = screen::extract_bouts(noisy);
    REQUIRE(got.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(got[i].start == ref[i].start);
      CHECK(got[i].end == ref[i].end);
      CHECK(got[i].kind == ref[i].kind);
    }
  }
}

TEST_CASE("usage features") {
  const TimeSlice morning = slice_of(Epoch::morning);
  const TimestampMs t0 = morning.bounds.front().start;  // 06:00 UTC
  std::vector<ScreenEvent> ev;
  for (int i = 0; i < 6; ++i) {
    const TimestampMs t = t0 + 90 * kMin + i * 40 * kMin;
    ev.push_back({t, ScreenStatus::on});
    ev.push_back({t + 1000, ScreenStatus::unlock});
    ev.push_back({t + 1000 + 5 * kMin, ScreenStatus::lock});
  }
  const auto bouts = screen::extract_bouts(ev);
  const auto f = screen::usage_features(ev, bouts, morning, TimeZone());
  CHECK(std::abs(*f.at("unlocks_per_min") - 6.0 / 360.0) <= 1e-5);
  CHECK(*f.at("first_on_hour") == doctest::Approx(7.5));
  CHECK(*f.at("interaction_bout_max_min") == doctest::Approx(5));
  CHECK(*f.at("interaction_bout_min_min") == doctest::Approx(5));
  CHECK(*f.at("interaction_bout_mean_min") == doctest::Approx(5));
  CHECK(*f.at("interaction_bout_std_min") == doctest::Approx(0));
  CHECK(*f.at("interaction_total_min") == doctest::Approx(30));
  CHECK(*f.at("interaction_total_min") <= *f.at("unlocked_total_min"));
  CHECK(*f.at("unlocked_total_min") <= 360.0);

  const auto empty = screen::usage_features({}, bouts, slice_of(Epoch::night), TimeZone());
  for (const auto& [k, v] : empty) CHECK_FALSE(v.has_value());
  CHECK(empty.size() == screen::feature_keys().size());
}

TEST_CASE("usage hours are local and bouts clip to the slice") {
  const TimeZone ny = TimeZone::load("America/New_York");
  StudyConfig c;
  c.start = 2024y / March / 5;
  c.end = 2024y / March / 5;
  c.timezone = "America/New_York";
  TimeSlice morning;
  for (auto& s : build_slices(c)) {
    if (s.epoch == Epoch::morning && s.granularity == Granularity::daily) morning = s;
  }
  const TimestampMs unlock = ny.to_utc(2024y / March / 5, 7) + 30 * kMin;
  // Interaction runs from 07:30 to 12:30 local; only 4.5 h fall in the morning.
  const std::vector<ScreenEvent> ev{{unlock, ScreenStatus::unlock},
                                    {unlock + 5 * kMsPerHour, ScreenStatus::lock}};
  const auto bouts = screen::extract_bouts(ev);
  const auto f = screen::usage_features(assign(ev, morning), bouts, morning, ny);
  CHECK(*f.at("first_unlock_hour") == doctest::Approx(7.5));
  CHECK(*f.at("interaction_total_min") == doctest::Approx(270));
}

TEST_CASE("usage invariants on random streams") {
  const TimeSlice day = slice_of(Epoch::all_day);
  SplitMix64 rng(37);
  for (int t = 0; t < 100; ++t) {
    std::vector<ScreenEvent> ev;
    for (int i = 0; i < 40; ++i) {
      ev.push_back({day.bounds.front().start + static_cast<TimestampMs>(rng.below(kMsPerDay)),
                    static_cast<ScreenStatus>(rng.below(4))});
    }
    std::sort(ev.begin(), ev.end());
    const auto bouts = screen::extract_bouts(ev);
    const auto f = screen::usage_features(ev, bouts, day, TimeZone());
    CHECK(*f.at("interaction_total_min") <= *f.at("unlocked_total_min") + 1e-9);
    CHECK(*f.at("unlocked_total_min") <= 1440.0);
    const auto unlocks = std::count_if(ev.begin(), ev.end(), [](auto& e) { return e.status == ScreenStatus::unlock; });
    const auto interactions = std::count_if(bouts.begin(), bouts.end(), [](auto& b) { return b.kind == BoutKind::interaction; });
    CHECK(interactions <= unlocks);
  }
}
