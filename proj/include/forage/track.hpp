#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forage/common.hpp"

namespace forage {

/// Closed lat/lon rectangle.
struct BBox {
  double lat_min = 0.0;
  double lon_min = 0.0;
  double lat_max = 0.0;
  double lon_max = 0.0;

  bool contains(LatLon p) const {
    return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
  }
  LatLon south_west() const { return {lat_min, lon_min}; }
};

/// Study window [window_start, window_end), area and local-time settings.
/// Defaults cover 2022-09-01 .. 2022-10-15 (45 local days, America/New_York)
/// over Duval County, FL.
struct StudyConfig {
  std::int64_t window_start = 1662004800;
  std::int64_t window_end = 1665892800;
  BBox bbox{30.10, -82.05, 30.60, -81.30};
  std::string timezone = "America/New_York";
  double grid_cell_m = 20.0;

  /// Throws InputError when the window, bbox or cell size is invalid.
  void validate() const;
  bool in_window(std::int64_t ts) const { return ts >= window_start && ts < window_end; }
};

enum class Accuracy : std::uint8_t { High, Other };

struct GpsPing {
  std::string device_id;
  double lat = 0.0;
  double lon = 0.0;
  std::int64_t ts = 0;
  Accuracy accuracy = Accuracy::High;
  std::optional<std::string> geohash;
};

struct TrackPoint {
  std::int64_t ts = 0;
  LatLon pos;

  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

/// One device's filtered pings, strictly increasing in ts.
struct DeviceTrack {
  std::string device_id;
  std::vector<TrackPoint> points;
};

}  // namespace forage
