#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace forage {

struct LocalTime {
  std::int64_t local_seconds = 0;  ///< UTC epoch seconds + zone offset
  std::int64_t day = 0;            ///< local civil day number, 0 = 1970-01-01
  int hour = 0;                    ///< 0..23
  int weekday = 0;                 ///< 0 = Monday .. 6 = Sunday

  bool is_weekend() const { return weekday >= 5; }
};

/// UTC -> local civil time for one IANA zone. Offsets are precomputed into a
/// transition table at construction, so lookups are pure and thread-safe.
class LocalClock {
 public:
  /// Throws InputError for an unknown zone identifier.
  explicit LocalClock(std::string_view tz_name);

  LocalTime at(std::int64_t utc_seconds) const;
  std::int64_t offset_at(std::int64_t utc_seconds) const;

  /// UTC epoch seconds of local midnight starting `day`.
  std::int64_t day_start_utc(std::int64_t day) const;

  /// Converts a local civil time to UTC (for ambiguous/skipped times the
  /// pre-transition offset is used).
  std::int64_t to_utc(int year, int month, int dayofmonth, int hour, int minute, int second) const;

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::vector<std::int64_t> starts_;  // transition instants, ascending
  std::vector<std::int64_t> offsets_;  // offset in effect from starts_[i]
  std::int64_t initial_offset_ = 0;
};

std::int64_t floor_div(std::int64_t a, std::int64_t b);

/// "YYYY-MM-DD" for a civil day number (0 = 1970-01-01).
std::string format_day(std::int64_t day);
/// Parses "YYYY-MM-DD"; returns false on malformed input.
bool parse_day(std::string_view text, std::int64_t& day);

std::string_view weekday_name(int weekday);

}  // namespace forage
