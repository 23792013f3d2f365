#include "forage/local_time.hpp"

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include <algorithm>
#include <array>

#include "forage/common.hpp"

namespace forage {
namespace {

constexpr std::int64_t kSecondsPerDay = 86400;
// Transition table covers 1900-01-01 .. 2100-01-01 UTC.
constexpr std::int64_t kTableBegin = -2208988800;
constexpr std::int64_t kTableEnd = 4102444800;

std::int64_t civil_to_seconds(const absl::CivilSecond& cs) { return cs - absl::CivilSecond(1970); }

}  // namespace

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

LocalClock::LocalClock(std::string_view tz_name) : name_(tz_name) {
  absl::TimeZone tz;
  if (!absl::LoadTimeZone(name_, &tz)) {
    throw InputError("unknown time zone '" + name_ + "'");
  }
  absl::Time t = absl::FromUnixSeconds(kTableBegin);
  initial_offset_ = tz.At(t).offset;
  std::int64_t current = initial_offset_;
  absl::TimeZone::CivilTransition trans;
  while (tz.NextTransition(t, &trans)) {
    const std::int64_t instant = civil_to_seconds(trans.from) - current;
    if (instant >= kTableEnd) break;
    const std::int64_t next = tz.At(absl::FromUnixSeconds(instant)).offset;
    if (!starts_.empty() && instant <= starts_.back()) break;
    starts_.push_back(instant);
    offsets_.push_back(next);
    current = next;
    t = absl::FromUnixSeconds(instant);
  }
}

std::int64_t LocalClock::offset_at(std::int64_t utc_seconds) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), utc_seconds);
  if (it == starts_.begin()) return initial_offset_;
  return offsets_[static_cast<std::size_t>(it - starts_.begin() - 1)];
}

LocalTime LocalClock::at(std::int64_t utc_seconds) const {
  LocalTime lt;
  lt.local_seconds = utc_seconds + offset_at(utc_seconds);
  lt.day = floor_div(lt.local_seconds, kSecondsPerDay);
  const std::int64_t sod = lt.local_seconds - lt.day * kSecondsPerDay;
  lt.hour = static_cast<int>(sod / 3600);
  // 1970-01-01 was a Thursday (index 3 with Monday = 0).
  lt.weekday = static_cast<int>(((lt.day % 7) + 7 + 3) % 7);
  return lt;
}

std::int64_t LocalClock::to_utc(int year, int month, int dayofmonth, int hour, int minute,
                                int second) const {
  const std::int64_t local =
      civil_to_seconds(absl::CivilSecond(year, month, dayofmonth, hour, minute, second));
  const std::int64_t guess = local - offset_at(local - initial_offset_);
  const std::int64_t refined = local - offset_at(guess);
  if (refined + offset_at(refined) == local) return refined;
  return guess;
}

std::int64_t LocalClock::day_start_utc(std::int64_t day) const {
  const absl::CivilDay d = absl::CivilDay(1970) + day;
  return to_utc(static_cast<int>(d.year()), d.month(), d.day(), 0, 0, 0);
}

std::string format_day(std::int64_t day) {
  const absl::CivilDay d = absl::CivilDay(1970) + day;
  return absl::FormatCivilTime(d);
}

bool parse_day(std::string_view text, std::int64_t& day) {
  absl::CivilDay d;
  if (!absl::ParseCivilTime(std::string(text), &d)) return false;
  day = d - absl::CivilDay(1970);
  return true;
}

std::string_view weekday_name(int weekday) {
  static constexpr std::array<std::string_view, 7> kNames = {"Mon", "Tue", "Wed", "Thu",
                                                             "Fri", "Sat", "Sun"};
  return kNames.at(static_cast<std::size_t>(weekday));
}

}  // namespace forage
