#include "fixture.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sensefeat/numerics.hpp"
#include "sensefeat/windowing.hpp"

namespace sensefeat::testing {

namespace {

using namespace std::chrono;

constexpr double kMetersPerDegLat = 111'195.0;

GeoPoint offset(GeoPoint p, double north_m, double east_m) {
  const double lon_scale = kMetersPerDegLat * std::cos(p.latitude * M_PI / 180.0);
  return {p.latitude + north_m / kMetersPerDegLat, p.longitude + east_m / lon_scale};
}

// Square polygon of side 2*half_m around a center, as JSON.
std::string square(const std::string& type, GeoPoint c, double half_m) {
  const GeoPoint a = offset(c, -half_m, -half_m);
  const GeoPoint b = offset(c, half_m, half_m);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "{\"type\":\"%s\",\"polygon\":[[%.7f,%.7f],[%.7f,%.7f],[%.7f,%.7f],[%.7f,%.7f]]}",
                type.c_str(), a.latitude, a.longitude, a.latitude, b.longitude, b.latitude,
                b.longitude, b.latitude, a.longitude);
  return buf;
}

struct Campus {
  GeoPoint center{43.7030, -72.2890};
  GeoPoint academic = offset(center, 0, 0);
  GeoPoint hall = offset(center, 600, 200);
  GeoPoint green = offset(center, -400, 300);
  GeoPoint greek = offset(center, 300, -700);
  GeoPoint gym = offset(center, -700, -500);
};

class Writer {
 public:
  Writer(const std::filesystem::path& path, const char* header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <typename... Args>
  void row(const char* fmt, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    out_ << buf << '\n';
  }

 private:
  std::ofstream out_;
};

struct Stop {
  double from_h;  // local hours since midnight
  double to_h;
  GeoPoint where;
};

void write_participant(const std::filesystem::path& dir, int who, int days, std::uint64_t seed,
                       const Campus& campus) {
  std::filesystem::create_directories(dir);
  SplitMix64 rng(seed * 1000 + static_cast<std::uint64_t>(who));
  const TimeZone zone = TimeZone::load("America/New_York");
  const sys_days first{year{2024} / March / 4};
  const GeoPoint home = who % 2 == 0 ? campus.hall : offset(campus.center, 2500, -1800);

  Writer location(dir / "location.csv", "timestamp,lat,lon");
  Writer screen(dir / "screen.csv", "timestamp,status");
  Writer sleep(dir / "sleep.csv", "timestamp,state");
  Writer steps(dir / "steps.csv", "start_timestamp,steps");
  Writer bluetooth(dir / "bluetooth.csv", "timestamp,address");
  Writer calls(dir / "calls.csv", "timestamp,correspondent,direction,duration_s");
  Writer conversation(dir / "conversation.csv", "timestamp,label");
  {
    Writer contacts(dir / "contacts.csv", "correspondent,category");
    contacts.row("+15550001,family");
    contacts.row("+15550002,friend_on_campus");
    contacts.row("+15550003,friend_off_campus");
  }

  const char* own_phone = who % 2 == 0 ? "AA:00:00:00:00:01" : "AA:00:00:00:00:11";
  const char* own_laptop = who % 2 == 0 ? "AA:00:00:00:00:02" : "AA:00:00:00:00:12";
  const char* roommate = "BB:00:00:00:00:01";

  for (int d = 0; d < days; ++d) {
    const sys_days day = first + sys_days::duration{d};
    const TimestampMs midnight = zone.to_utc(year_month_day{day}, 0);
    const auto at = [&](double h) { return midnight + static_cast<TimestampMs>(h * kMsPerHour); };
    const bool weekend = weekday{day}.iso_encoding() >= 6;

    std::vector<Stop> stops;
    if (weekend) {
      stops = {{0, 10.5, home},    {11, 13, campus.green}, {13.5, 16, campus.gym},
               {16.5, 19, home},   {19.5, 23.5, campus.greek}, {23.75, 24, home}};
    } else {
      stops = {{0, 8.25, home},       {8.5, 12, campus.academic}, {12.1, 13, campus.hall},
               {13.1, 17, campus.academic}, {17.3, 18.4, campus.green},
               {18.7, 22.2, campus.greek},  {22.5, 24, home}};
    }

    // Location every 5 minutes with a few meters of jitter; straight-line
    // travel between stops.
    for (int minute = 0; minute < 24 * 60; minute += 5) {
      if (rng.uniform() < 0.03) continue;  // dropped fix
      const double h = minute / 60.0;
      GeoPoint p = home;
      for (std::size_t i = 0; i < stops.size(); ++i) {
        if (h >= stops[i].from_h && h < stops[i].to_h) {
          p = stops[i].where;
          break;
        }
        if (i + 1 < stops.size() && h >= stops[i].to_h && h < stops[i + 1].from_h) {
          const double f = (h - stops[i].to_h) / (stops[i + 1].from_h - stops[i].to_h);
          const GeoPoint a = stops[i].where, b = stops[i + 1].where;
          p = {a.latitude + f * (b.latitude - a.latitude),
               a.longitude + f * (b.longitude - a.longitude)};
          break;
        }
      }
      p = offset(p, (rng.uniform() - 0.5) * 8.0, (rng.uniform() - 0.5) * 8.0);
      location.row("%lld,%.7f,%.7f", static_cast<long long>(at(h)), p.latitude, p.longitude);
    }

    // Steps: walking between stops, light activity otherwise.
    for (int minute = 0; minute < 24 * 60; minute += 5) {
      const double h = minute / 60.0;
      bool walking = false;
      for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
        walking = walking || (h >= stops[i].to_h && h < stops[i + 1].from_h);
      }
      const bool asleep_hours = h < 7.0 || h >= 23.5;
      std::int64_t n = 0;
      if (walking) {
        n = 300 + static_cast<std::int64_t>(rng.below(200));
      } else if (!asleep_hours) {
        n = static_cast<std::int64_t>(rng.below(25));
      }
      steps.row("%lld,%lld", static_cast<long long>(at(h)), static_cast<long long>(n));
    }

    // Sleep minutes from 00:00 to 07:00 local.
    for (int minute = 0; minute < 7 * 60; ++minute) {
      const double u = rng.uniform();
      const char* state = u < 0.82 ? "asleep" : u < 0.93 ? "restless" : u < 0.99 ? "awake" : "unknown";
      sleep.row("%lld,%s", static_cast<long long>(at(minute / 60.0)), state);
    }

    // Screen sessions across waking hours.
    for (double h = 7.5; h < 23.5; h += 0.5 + rng.uniform()) {
      const TimestampMs t = at(h);
      const TimestampMs len = static_cast<TimestampMs>((1 + rng.below(12)) * kMsPerMinute);
      screen.row("%lld,on", static_cast<long long>(t));
      screen.row("%lld,unlock", static_cast<long long>(t + 2 * kMsPerSecond));
      screen.row("%lld,%s", static_cast<long long>(t + len), rng.uniform() < 0.5 ? "off" : "lock");
      if (rng.uniform() < 0.3) screen.row("%lld,lock", static_cast<long long>(t + len + kMsPerSecond));
    }

    // Bluetooth: own devices hourly, a roommate on some days, strangers now and then.
    for (int hour = 0; hour < 24; ++hour) {
      const TimestampMs t = at(hour) + static_cast<TimestampMs>(rng.below(60)) * kMsPerSecond;
      bluetooth.row("%lld,%s", static_cast<long long>(t), own_phone);
      if (hour % 2 == 0) bluetooth.row("%lld,%s", static_cast<long long>(t + 1000), own_laptop);
      if ((d % 2 == 0) && (hour < 8 || hour >= 22)) {
        bluetooth.row("%lld,%s", static_cast<long long>(t + 2000), roommate);
      }
      if (rng.uniform() < 0.15) {
        bluetooth.row("%lld,CC:%02llX:%02llX:00:00:00", static_cast<long long>(t + 3000),
                      static_cast<unsigned long long>(rng.below(256)),
                      static_cast<unsigned long long>(rng.below(256)));
      }
    }

    // A handful of calls.
    static const char* kNumbers[] = {"+15550001", "+15550002", "+15550003", "+15559999"};
    static const char* kDirections[] = {"incoming", "outgoing", "missed"};
    const int n_calls = 1 + static_cast<int>(rng.below(4));
    for (int c = 0; c < n_calls; ++c) {
      const double h = 9 + 13 * rng.uniform();
      calls.row("%lld,%s,%s,%d", static_cast<long long>(at(h)), kNumbers[rng.below(4)],
                kDirections[rng.below(3)], static_cast<int>(rng.below(900)));
    }

    // Conversation inferences every 2 minutes in the evening.
    for (double h = 18.0; h < 23.0; h += 2.0 / 60.0) {
      const double u = rng.uniform();
      const char* label = u < 0.85 ? "voice" : u < 0.93 ? "noise" : "silence";
      conversation.row("%lld,%s", static_cast<long long>(at(h)), label);
    }
  }
}

}  // namespace

FixtureLayout write_fixture(const std::filesystem::path& root, int participants, int days,
                            std::uint64_t seed) {
  FixtureLayout layout;
  layout.root = root;
  layout.input = root / "input";
  layout.config = root / "config.toml";
  layout.place_map = root / "places.json";
  std::filesystem::create_directories(layout.input);

  const Campus campus;
  {
    std::ofstream map(layout.place_map);
    map << "[" << square("academic", campus.academic, 120) << ","
        << square("residential_hall", campus.hall, 80) << ","
        << square("green_space", campus.green, 150) << ","
        << square("greek_social", campus.greek, 60) << ","
        << square("athletic", campus.gym, 100) << "]\n";
  }

  const sys_days first{year{2024} / March / 4};
  const year_month_day last{first + sys_days::duration{days - 1}};
  {
    std::ofstream cfg(layout.config);
    char end[16];
    std::snprintf(end, sizeof end, "%04d-%02u-%02u", static_cast<int>(last.year()),
                  static_cast<unsigned>(last.month()), static_cast<unsigned>(last.day()));
    cfg << "# synthetic fixture\n"
        << "start = 2024-03-04\n"
        << "end = " << end << "\n"
        << "timezone = \"America/New_York\"\n"
        << "seed = 42\n\n"
        << "[location]\n"
        << "eps_m = 30\n"
        << "min_pts = 5\n\n"
        << "[places]\n"
        << "map = \"places.json\"\n";
  }

  for (int p = 1; p <= participants; ++p) {
    char id[8];
    std::snprintf(id, sizeof id, "p%02d", p);
    layout.participants.emplace_back(id);
    write_participant(layout.input / id, p, days, seed, campus);
  }
  return layout;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sensefeat-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace sensefeat::testing
