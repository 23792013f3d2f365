#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "forage/geo.hpp"
#include "forage/local_time.hpp"
#include "forage/track.hpp"

namespace forage {

enum class HomeMethod : std::uint8_t { Nighttime, WeekendFallback };

std::string_view home_method_name(HomeMethod m);
std::optional<HomeMethod> home_method_from_name(std::string_view s);

struct HomeLocation {
  std::string device_id;
  GridCell cell;
  LatLon centroid;  ///< mean of the qualifying pings in the winning cell
  HomeMethod method = HomeMethod::Nighttime;
  std::uint32_t support = 0;
};

struct HomeParams {
  std::uint32_t min_night_pings = 10;
  std::uint32_t min_weekend_pings = 10;
  int night_start_hour = 22;  ///< night is hour >= start or hour < end
  int night_end_hour = 6;
};

using HomeMap = std::map<std::string, HomeLocation, std::less<>>;

struct CoverageReport {
  std::uint64_t n_devices = 0;
  std::uint64_t n_nighttime = 0;
  std::uint64_t n_fallback = 0;
  std::uint64_t n_none = 0;

  friend bool operator==(const CoverageReport&, const CoverageReport&) = default;
};

struct HomeInference {
  HomeMap homes;
  CoverageReport report;
};

/// Nighttime rule first: the grid cell with most pings at local hour in
/// [22:00, 06:00). If that count is below min_night_pings, fall back to
/// Saturday/Sunday pings in [06:00, 22:00). Ties go to the cell with more
/// all-hours pings, then the lexicographically smallest (ix, iy).
std::optional<HomeLocation> infer_home(const DeviceTrack& track, const LocalFrame& frame, double cell_m,
                                       const LocalClock& clock, const HomeParams& params);

std::optional<HomeLocation> infer_home(const DeviceTrack& track, const StudyConfig& cfg, const LocalClock& clock,
                                       const HomeParams& params);

HomeInference infer_all_homes(std::span<const DeviceTrack> tracks, const StudyConfig& cfg, const HomeParams& params,
                              int workers = 1);

}  // namespace forage
