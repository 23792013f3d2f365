#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forage/common.hpp"
#include "forage/track.hpp"

namespace forage {

/// A detected dwell episode. Duration is first-ping to last-ping.
struct StayPoint {
  std::string stay_id;
  std::string device_id;
  LatLon centroid;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  std::uint32_t n_pings = 0;
  std::optional<std::string> origin;  ///< stay_id of the linked preceding stay

  double duration_min() const { return static_cast<double>(end_ts - start_ts) / 60.0; }
};

struct StayParams {
  double dist_threshold_m = 100.0;
  double min_dur_min = 5.0;
  double max_dur_min = 720.0;
  std::int64_t max_track_gap_s = 300;
  double max_food_dur_min = 120.0;
};

/// Derived from (device_id, start_ts) only, so ids never depend on the
/// order in which devices were processed.
std::string make_stay_id(std::string_view device_id, std::int64_t start_ts);

/// Greedy time-space sliding window over one device's sorted pings. The
/// window grows while each next ping is within dist_threshold_m of the
/// anchor (first) ping. A window whose span lies in [min_dur, max_dur] is
/// emitted; longer windows are dropped whole; shorter ones advance the
/// anchor by a single ping.
std::vector<StayPoint> detect_stays(const DeviceTrack& track, const StayParams& params);

/// Sets origin(S) = the preceding stay P when every inter-ping gap from
/// P.end_ts through S.start_ts is at most max_track_gap_s.
void link_origins(std::span<StayPoint> stays, const DeviceTrack& track, const StayParams& params);

/// Stays no longer than max_food_dur_min (closed bound), order preserved.
std::vector<StayPoint> filter_food_candidates(std::span<const StayPoint> stays, double max_food_dur_min);

/// detect_stays + link_origins for every device; devices run in parallel and
/// the result is concatenated in track order.
std::vector<StayPoint> detect_all_stays(std::span<const DeviceTrack> tracks, const StayParams& params,
                                        int workers);

}  // namespace forage
