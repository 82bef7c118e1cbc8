#include "sensefeat/records.hpp"

#include <array>
#include <utility>

namespace sensefeat {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<std::string_view, E>, N>& table,
                        std::string_view s) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view reverse_lookup(const std::array<std::pair<std::string_view, E>, N>& table,
                                E value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, CallDirection>, 3> kDirections{{
    {"incoming", CallDirection::incoming},
    {"outgoing", CallDirection::outgoing},
    {"missed", CallDirection::missed},
}};

constexpr std::array<std::pair<std::string_view, ScreenStatus>, 4> kScreen{{
    {"on", ScreenStatus::on},
    {"off", ScreenStatus::off},
    {"lock", ScreenStatus::lock},
    {"unlock", ScreenStatus::unlock},
}};

constexpr std::array<std::pair<std::string_view, SleepState>, 4> kSleep{{
    {"asleep", SleepState::asleep},
    {"restless", SleepState::restless},
    {"awake", SleepState::awake},
    {"unknown", SleepState::unknown},
}};

constexpr std::array<std::pair<std::string_view, ConversationLabel>, 4> kConversation{{
    {"voice", ConversationLabel::voice},
    {"noise", ConversationLabel::noise},
    {"silence", ConversationLabel::silence},
    {"unknown", ConversationLabel::unknown},
}};

constexpr std::array<std::pair<std::string_view, ContactCategory>, 4> kCategories{{
    {"family", ContactCategory::family},
    {"friend_off_campus", ContactCategory::friend_off_campus},
    {"friend_on_campus", ContactCategory::friend_on_campus},
    {"other", ContactCategory::other},
}};

}  // namespace

ContactCategory ContactDirectory::category_of(const std::string& correspondent) const {
  auto it = categories.find(correspondent);
  return it == categories.end() ? ContactCategory::other : it->second;
}

std::string_view to_string(CallDirection d) { return reverse_lookup(kDirections, d); }
std::string_view to_string(ScreenStatus s) { return reverse_lookup(kScreen, s); }
std::string_view to_string(SleepState s) { return reverse_lookup(kSleep, s); }
std::string_view to_string(ConversationLabel l) { return reverse_lookup(kConversation, l); }
std::string_view to_string(ContactCategory c) { return reverse_lookup(kCategories, c); }

std::optional<CallDirection> parse_call_direction(std::string_view s) {
  return lookup(kDirections, s);
}
std::optional<ScreenStatus> parse_screen_status(std::string_view s) {
  return lookup(kScreen, s);
}
std::optional<SleepState> parse_sleep_state(std::string_view s) { return lookup(kSleep, s); }
std::optional<ConversationLabel> parse_conversation_label(std::string_view s) {
  return lookup(kConversation, s);
}
std::optional<ContactCategory> parse_contact_category(std::string_view s) {
  return lookup(kCategories, s);
}

}  // namespace sensefeat
