#pragma once

#include <absl/container/flat_hash_map.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forage/common.hpp"

namespace forage {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kMetersPerDegree = 111320.0;

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine(LatLon p, LatLon q);

/// Equirectangular frame anchored at a fixed point; x grows east, y north.
class LocalFrame {
 public:
  LocalFrame() = default;
  explicit LocalFrame(LatLon anchor);

  LatLon anchor() const { return anchor_; }
  double meters_per_deg_lat() const { return kMetersPerDegree; }
  double meters_per_deg_lon() const { return m_per_deg_lon_; }

  struct XY {
    double x = 0.0;
    double y = 0.0;
  };
  XY project(LatLon p) const;
  LatLon unproject(XY xy) const;

 private:
  LatLon anchor_{};
  double m_per_deg_lon_ = kMetersPerDegree;
};

struct GridCell {
  std::int32_t ix = 0;
  std::int32_t iy = 0;

  friend bool operator==(const GridCell&, const GridCell&) = default;
  friend auto operator<=>(const GridCell&, const GridCell&) = default;

  template <typename H>
  friend H AbslHashValue(H h, const GridCell& c) {
    return H::combine(std::move(h), c.ix, c.iy);
  }
};

GridCell to_cell(LatLon p, const LocalFrame& frame, double cell_m);

/// Uniform-grid bucket index over a fixed point set. Cells live in the
/// frame's projected space; queries translate the exact spherical-cap
/// bounding box into a cell range, so results are exact haversine balls.
class CellIndex {
 public:
  struct Hit {
    std::uint32_t id = 0;
    double distance_m = 0.0;
  };

  CellIndex() = default;
  CellIndex(std::span<const LatLon> points, double cell_m = 250.0, double max_radius_m = 1000.0);

  /// Ids of all points with haversine(p, point) <= r, ascending. Throws
  /// std::invalid_argument when r exceeds the configured max radius.
  std::vector<std::uint32_t> query_within(LatLon p, double r) const;
  /// Same ball, with distances.
  std::vector<Hit> query_within_dist(LatLon p, double r) const;

  /// Closest point (smallest id among exact ties); nullopt when empty.
  std::optional<Hit> nearest(LatLon p) const;

  std::size_t size() const { return points_.size(); }
  double max_radius_m() const { return max_radius_m_; }
  const LatLon& point(std::uint32_t id) const { return points_[id]; }

 private:
  void collect(LatLon p, double r, std::vector<Hit>& out) const;

  LocalFrame frame_;
  double cell_m_ = 250.0;
  double max_radius_m_ = 1000.0;
  std::vector<LatLon> points_;
  std::vector<std::uint32_t> order_;  // ids grouped by cell
  absl::flat_hash_map<GridCell, std::pair<std::uint32_t, std::uint32_t>> buckets_;
  GridCell lo_{}, hi_{};
};

struct Tract {
  std::string id;
  std::optional<double> population;
  /// Rings in lon/lat order; even-odd over all rings, so holes work.
  std::vector<std::vector<LatLon>> rings;
  LatLon min{}, max{};
};

/// Tracts sorted by id.
class TractSet {
 public:
  TractSet() = default;
  explicit TractSet(std::vector<Tract> tracts);

  const std::vector<Tract>& tracts() const { return tracts_; }
  std::size_t size() const { return tracts_.size(); }

  /// Index into tracts() of the tract containing p. Points on a boundary go
  /// to the smallest tract_id among the tracts whose boundary they touch.
  std::optional<std::size_t> locate(LatLon p) const;

 private:
  std::vector<Tract> tracts_;
};

std::optional<std::string> point_in_tract(LatLon p, const TractSet& tracts);

bool ring_contains(std::span<const LatLon> ring, LatLon p);
bool ring_boundary_contains(std::span<const LatLon> ring, LatLon p);

}  // namespace forage
