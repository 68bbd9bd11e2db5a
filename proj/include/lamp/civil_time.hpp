#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "lamp/errors.hpp"

namespace lamp {

// Calendar date, local civil time. Timezone handling is the caller's
// business; everything here compares and formats naive wall-clock values.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;
  bool valid() const;
};

struct TimeOfDay {
  int hour = 0;
  int minute = 0;
  int second = 0;

  auto operator<=>(const TimeOfDay&) const = default;
  bool valid() const;
  int seconds_of_day() const { return (hour * 60 + minute) * 60 + second; }
};

struct Timestamp {
  Date date;
  TimeOfDay time;

  auto operator<=>(const Timestamp&) const = default;
  bool valid() const { return date.valid() && time.valid(); }
};

struct DateRange {
  Date start;
  Date end;
};

// Recurring daily clock window, inclusive on both ends. start > end means
// the window wraps midnight (e.g. 20:00-05:00).
struct ClockWindow {
  TimeOfDay start;
  TimeOfDay end;

  bool wraps() const { return end < start; }
};

struct TimeInterval {
  std::optional<DateRange> dates;
  std::optional<ClockWindow> window;
  bool anytime = false;

  static TimeInterval any() { return TimeInterval{std::nullopt, std::nullopt, true}; }
  static TimeInterval between(Date a, Date b) { return TimeInterval{DateRange{a, b}, std::nullopt, false}; }
  static TimeInterval daily(TimeOfDay a, TimeOfDay b) { return TimeInterval{std::nullopt, ClockWindow{a, b}, false}; }
};

// Errc::ok, or Errc::invalid_interval describing the first violation.
Errc validate_interval(const TimeInterval& interval);

bool window_contains(const ClockWindow& w, const TimeOfDay& t);
bool interval_contains(const TimeInterval& interval, const Timestamp& t);

// "YYYY-MM-DD"
std::optional<Date> parse_date(std::string_view s);
// "HH:MM" or "HH:MM:SS"
std::optional<TimeOfDay> parse_time(std::string_view s);
// "YYYY-MM-DDTHH:MM[:SS]" (space accepted instead of 'T')
std::optional<Timestamp> parse_timestamp(std::string_view s);

std::string format_date(const Date& d);
std::string format_time(const TimeOfDay& t);
std::string format_timestamp(const Timestamp& t);

}  // namespace lamp
