#include "lamp/civil_time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace lamp {

bool Date::valid() const {
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  return month >= 1 && month <= 12 && day >= 1 && ymd.ok();
}

bool TimeOfDay::valid() const {
  return hour >= 0 && hour <= 23 && minute >= 0 && minute <= 59 && second >= 0 && second <= 59;
}

Errc validate_interval(const TimeInterval& interval) {
  if (interval.anytime) {
    if (interval.dates || interval.window) return Errc::invalid_interval;
    return Errc::ok;
  }
  if (!interval.dates && !interval.window) return Errc::invalid_interval;
  if (interval.dates) {
    if (!interval.dates->start.valid() || !interval.dates->end.valid()) return Errc::invalid_interval;
    if (interval.dates->end < interval.dates->start) return Errc::invalid_interval;
  }
  if (interval.window) {
    if (!interval.window->start.valid() || !interval.window->end.valid()) return Errc::invalid_interval;
  }
  return Errc::ok;
}

bool window_contains(const ClockWindow& w, const TimeOfDay& t) {
  if (w.wraps()) {
    return t >= w.start || t <= w.end;
  }
  return w.start <= t && t <= w.end;
}

bool interval_contains(const TimeInterval& interval, const Timestamp& t) {
  if (interval.anytime) return true;
  if (interval.dates && (t.date < interval.dates->start || interval.dates->end < t.date)) return false;
  if (interval.window && !window_contains(*interval.window, t.time)) return false;
  return true;
}

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  Date d;
  if (!parse_int(s.substr(0, 4), d.year) || !parse_int(s.substr(5, 2), d.month) ||
      !parse_int(s.substr(8, 2), d.day)) {
    return std::nullopt;
  }
  if (!d.valid()) return std::nullopt;
  return d;
}

std::optional<TimeOfDay> parse_time(std::string_view s) {
  if (s.size() != 5 && s.size() != 8) return std::nullopt;
  if (s[2] != ':') return std::nullopt;
  TimeOfDay t;
  if (!parse_int(s.substr(0, 2), t.hour) || !parse_int(s.substr(3, 2), t.minute)) return std::nullopt;
  if (s.size() == 8) {
    if (s[5] != ':') return std::nullopt;
    if (!parse_int(s.substr(6, 2), t.second)) return std::nullopt;
  }
  if (!t.valid()) return std::nullopt;
  return t;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  if (s.size() < 16) return std::nullopt;
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  auto date = parse_date(s.substr(0, 10));
  auto time = parse_time(s.substr(11));
  if (!date || !time) return std::nullopt;
  return Timestamp{*date, *time};
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string format_time(const TimeOfDay& t) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", t.hour, t.minute, t.second);
  return buf;
}

std::string format_timestamp(const Timestamp& t) {
  return format_date(t.date) + "T" + format_time(t.time);
}

}  // namespace lamp
