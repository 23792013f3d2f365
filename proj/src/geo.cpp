#include "forage/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace forage {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kBoundaryEps = 1e-12;

std::int32_t clamp_index(double v) {
  constexpr double lim = 1.0e9;
  return static_cast<std::int32_t>(std::clamp(std::floor(v), -lim, lim));
}

}  // namespace

double haversine(LatLon p, LatLon q) {
  const double phi1 = p.lat * kDegToRad;
  const double phi2 = q.lat * kDegToRad;
  const double dphi = (q.lat - p.lat) * kDegToRad;
  const double dlambda = (q.lon - p.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  a = std::clamp(a, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(a));
}

LocalFrame::LocalFrame(LatLon anchor)
    : anchor_(anchor), m_per_deg_lon_(kMetersPerDegree * std::cos(anchor.lat * kDegToRad)) {}

LocalFrame::XY LocalFrame::project(LatLon p) const {
  return {(p.lon - anchor_.lon) * m_per_deg_lon_, (p.lat - anchor_.lat) * kMetersPerDegree};
}

LatLon LocalFrame::unproject(XY xy) const {
  return {anchor_.lat + xy.y / kMetersPerDegree, anchor_.lon + xy.x / m_per_deg_lon_};
}

GridCell to_cell(LatLon p, const LocalFrame& frame, double cell_m) {
  const auto xy = frame.project(p);
  return {clamp_index(xy.x / cell_m), clamp_index(xy.y / cell_m)};
}

CellIndex::CellIndex(std::span<const LatLon> points, double cell_m, double max_radius_m)
    : cell_m_(cell_m), max_radius_m_(max_radius_m), points_(points.begin(), points.end()) {
  if (!(cell_m > 0.0)) throw std::invalid_argument("cell size must be positive");
  LatLon sw{90.0, 180.0};
  for (const auto& p : points_) {
    sw.lat = std::min(sw.lat, p.lat);
    sw.lon = std::min(sw.lon, p.lon);
  }
  frame_ = points_.empty() ? LocalFrame({0.0, 0.0}) : LocalFrame(sw);

  std::vector<GridCell> cells(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) cells[i] = to_cell(points_[i], frame_, cell_m_);
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return cells[a] < cells[b]; });

  if (!points_.empty()) {
    lo_ = hi_ = cells[order_.front()];
  }
  std::size_t i = 0;
  while (i < order_.size()) {
    std::size_t j = i;
    const GridCell c = cells[order_[i]];
    while (j < order_.size() && cells[order_[j]] == c) ++j;
    buckets_.emplace(c, std::make_pair(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)));
    lo_.ix = std::min(lo_.ix, c.ix);
    lo_.iy = std::min(lo_.iy, c.iy);
    hi_.ix = std::max(hi_.ix, c.ix);
    hi_.iy = std::max(hi_.iy, c.iy);
    i = j;
  }
}

void CellIndex::collect(LatLon p, double r, std::vector<Hit>& out) const {
  if (points_.empty()) return;
  const double ang = r / kEarthRadiusM;
  const double margin = 1e-9;
  const double dlat = ang * kRadToDeg + margin;
  const double lat_lo = p.lat - dlat;
  const double lat_hi = p.lat + dlat;

  bool full_lon = lat_lo <= -90.0 || lat_hi >= 90.0 || ang >= std::numbers::pi / 2.0;
  double dlon = 0.0;
  if (!full_lon) {
    const double s = std::sin(ang) / std::cos(p.lat * kDegToRad);
    if (s >= 1.0) {
      full_lon = true;
    } else {
      dlon = std::asin(s) * kRadToDeg + margin;
      if (p.lon - dlon < -180.0 || p.lon + dlon > 180.0) full_lon = true;
    }
  }

  GridCell clo = lo_, chi = hi_;
  {
    const auto a = to_cell({lat_lo, full_lon ? p.lon : p.lon - dlon}, frame_, cell_m_);
    const auto b = to_cell({lat_hi, full_lon ? p.lon : p.lon + dlon}, frame_, cell_m_);
    clo.iy = std::max(clo.iy, a.iy);
    chi.iy = std::min(chi.iy, b.iy);
    if (!full_lon) {
      clo.ix = std::max(clo.ix, a.ix);
      chi.ix = std::min(chi.ix, b.ix);
    }
  }
  if (clo.ix > chi.ix || clo.iy > chi.iy) return;

  auto scan_bucket = [&](std::uint32_t begin, std::uint32_t end) {
    for (std::uint32_t k = begin; k < end; ++k) {
      const std::uint32_t id = order_[k];
      const double d = haversine(p, points_[id]);
      if (d <= r) out.push_back({id, d});
    }
  };

  const double span = (static_cast<double>(chi.ix) - clo.ix + 1.0) * (static_cast<double>(chi.iy) - clo.iy + 1.0);
  if (span > static_cast<double>(buckets_.size())) {
    for (const auto& [cell, range] : buckets_) {
      if (cell.ix < clo.ix || cell.ix > chi.ix || cell.iy < clo.iy || cell.iy > chi.iy) continue;
      scan_bucket(range.first, range.second);
    }
  } else {
    for (std::int32_t iy = clo.iy; iy <= chi.iy; ++iy) {
      for (std::int32_t ix = clo.ix; ix <= chi.ix; ++ix) {
        auto it = buckets_.find(GridCell{ix, iy});
        if (it != buckets_.end()) scan_bucket(it->second.first, it->second.second);
      }
    }
  }
}

std::vector<CellIndex::Hit> CellIndex::query_within_dist(LatLon p, double r) const {
  if (r > max_radius_m_) {
    throw std::invalid_argument("query radius " + std::to_string(r) + " m exceeds index max radius " +
                                std::to_string(max_radius_m_) + " m");
  }
  std::vector<Hit> out;
  collect(p, r, out);
  std::sort(out.begin(), out.end(), [](const Hit& a, const Hit& b) { return a.id < b.id; });
  return out;
}

std::vector<std::uint32_t> CellIndex::query_within(LatLon p, double r) const {
  const auto hits = query_within_dist(p, r);
  std::vector<std::uint32_t> ids;
  ids.reserve(hits.size());
  for (const auto& h : hits) ids.push_back(h.id);
  return ids;
}

std::optional<CellIndex::Hit> CellIndex::nearest(LatLon p) const {
  if (points_.empty()) return std::nullopt;
  std::vector<Hit> hits;
  double r = 2.0 * cell_m_;
  const double half_circumference = std::numbers::pi * kEarthRadiusM;
  while (true) {
    hits.clear();
    collect(p, std::min(r, half_circumference), hits);
    if (!hits.empty() || r >= half_circumference) break;
    r *= 2.0;
  }
  if (hits.empty()) return std::nullopt;
  Hit best = hits.front();
  for (const auto& h : hits) {
    if (h.distance_m < best.distance_m || (h.distance_m == best.distance_m && h.id < best.id)) best = h;
  }
  return best;
}

bool ring_contains(std::span<const LatLon> ring, LatLon p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const LatLon a = ring[i];
    const LatLon b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

bool ring_boundary_contains(std::span<const LatLon> ring, LatLon p) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const LatLon a = ring[j];
    const LatLon b = ring[i];
    const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    if (std::abs(cross) > kBoundaryEps) continue;
    if (p.lon < std::min(a.lon, b.lon) - kBoundaryEps || p.lon > std::max(a.lon, b.lon) + kBoundaryEps) continue;
    if (p.lat < std::min(a.lat, b.lat) - kBoundaryEps || p.lat > std::max(a.lat, b.lat) + kBoundaryEps) continue;
    return true;
  }
  return false;
}

TractSet::TractSet(std::vector<Tract> tracts) : tracts_(std::move(tracts)) {
  for (auto& t : tracts_) {
    t.min = {90.0, 180.0};
    t.max = {-90.0, -180.0};
    for (const auto& ring : t.rings) {
      for (const auto& v : ring) {
        t.min.lat = std::min(t.min.lat, v.lat);
        t.min.lon = std::min(t.min.lon, v.lon);
        t.max.lat = std::max(t.max.lat, v.lat);
        t.max.lon = std::max(t.max.lon, v.lon);
      }
    }
  }
  std::sort(tracts_.begin(), tracts_.end(), [](const Tract& a, const Tract& b) { return a.id < b.id; });
}

std::optional<std::size_t> TractSet::locate(LatLon p) const {
  std::optional<std::size_t> interior;
  for (std::size_t i = 0; i < tracts_.size(); ++i) {
    const Tract& t = tracts_[i];
    if (p.lat < t.min.lat - kBoundaryEps || p.lat > t.max.lat + kBoundaryEps ||
        p.lon < t.min.lon - kBoundaryEps || p.lon > t.max.lon + kBoundaryEps) {
      continue;
    }
    bool on_edge = false;
    bool inside = false;
    for (const auto& ring : t.rings) {
      if (ring.size() < 3) continue;
      if (ring_boundary_contains(ring, p)) on_edge = true;
      if (ring_contains(ring, p)) inside = !inside;
    }
    // Tracts are sorted, so the first boundary hit has the smallest id.
    if (on_edge) return i;
    if (inside && !interior) interior = i;
  }
  return interior;
}

std::optional<std::string> point_in_tract(LatLon p, const TractSet& tracts) {
  if (auto i = tracts.locate(p)) return tracts.tracts()[*i].id;
  return std::nullopt;
}

}  // namespace forage
