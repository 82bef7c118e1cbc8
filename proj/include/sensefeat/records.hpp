#ifndef SENSEFEAT_RECORDS_HPP
#define SENSEFEAT_RECORDS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "sensefeat/numerics.hpp"

namespace sensefeat {

/// UTC epoch milliseconds.
using TimestampMs = std::int64_t;

inline constexpr TimestampMs kMsPerSecond = 1000;
inline constexpr TimestampMs kMsPerMinute = 60 * kMsPerSecond;
inline constexpr TimestampMs kMsPerHour = 60 * kMsPerMinute;
inline constexpr TimestampMs kMsPerDay = 24 * kMsPerHour;

struct BluetoothScan {
  TimestampMs timestamp = 0;
  std::string address;

  TimestampMs time() const { return timestamp; }
  auto operator<=>(const BluetoothScan&) const = default;
};

enum class CallDirection { incoming, outgoing, missed };

struct CallRecord {
  TimestampMs timestamp = 0;
  std::string correspondent;
  CallDirection direction = CallDirection::incoming;
  double duration_s = 0.0;

  TimestampMs time() const { return timestamp; }
  auto operator<=>(const CallRecord&) const = default;
};

struct LocationFix {
  TimestampMs timestamp = 0;
  GeoPoint point;

  TimestampMs time() const { return timestamp; }
  friend bool operator==(const LocationFix&, const LocationFix&) = default;
};

enum class ScreenStatus { on, off, lock, unlock };

struct ScreenEvent {
  TimestampMs timestamp = 0;
  ScreenStatus status = ScreenStatus::on;

  TimestampMs time() const { return timestamp; }
  auto operator<=>(const ScreenEvent&) const = default;
};

enum class SleepState { asleep, restless, awake, unknown };

struct SleepMinute {
  TimestampMs timestamp = 0;  // minute aligned
  SleepState state = SleepState::unknown;

  TimestampMs time() const { return timestamp; }
  auto operator<=>(const SleepMinute&) const = default;
};

inline constexpr TimestampMs kStepBinMs = 5 * kMsPerMinute;

struct StepBin {
  TimestampMs start = 0;
  std::int64_t steps = 0;

  TimestampMs time() const { return start; }
  auto operator<=>(const StepBin&) const = default;
};

enum class ConversationLabel { voice, noise, silence, unknown };

struct ConversationInference {
  TimestampMs timestamp = 0;
  ConversationLabel label = ConversationLabel::unknown;

  TimestampMs time() const { return timestamp; }
  auto operator<=>(const ConversationInference&) const = default;
};

enum class ContactCategory { family, friend_off_campus, friend_on_campus, other };

struct ContactDirectory {
  std::map<std::string, ContactCategory> categories;

  /// Unlisted correspondents fall into `other`.
  ContactCategory category_of(const std::string& correspondent) const;
};

std::string_view to_string(CallDirection d);
std::string_view to_string(ScreenStatus s);
std::string_view to_string(SleepState s);
std::string_view to_string(ConversationLabel l);
std::string_view to_string(ContactCategory c);

std::optional<CallDirection> parse_call_direction(std::string_view s);
std::optional<ScreenStatus> parse_screen_status(std::string_view s);
std::optional<SleepState> parse_sleep_state(std::string_view s);
std::optional<ConversationLabel> parse_conversation_label(std::string_view s);
std::optional<ContactCategory> parse_contact_category(std::string_view s);

}  // namespace sensefeat

#endif  // SENSEFEAT_RECORDS_HPP
