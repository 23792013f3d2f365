#pragma once

// Small builders shared by the unit tests and the acceptance suite.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "forage/geo.hpp"
#include "forage/outlets.hpp"
#include "forage/routing.hpp"
#include "forage/staypoints.hpp"
#include "forage/track.hpp"

namespace fixture {

inline constexpr forage::LatLon kOrigin{30.30, -81.65};

/// Point `east_m` / `north_m` meters from `base` in the local frame.
inline forage::LatLon offset(forage::LatLon base, double east_m, double north_m) {
  const forage::LocalFrame f(base);
  return f.unproject({east_m, north_m});
}

/// Pings every `step_s` seconds at `pos` over [t0, t1].
inline void dwell(forage::DeviceTrack& t, forage::LatLon pos, std::int64_t t0, std::int64_t t1,
                  std::int64_t step_s = 60) {
  for (std::int64_t ts = t0; ts <= t1; ts += step_s) t.points.push_back({ts, pos});
}

inline forage::FoodOutlet outlet(std::string id, forage::LatLon pos, forage::Category c, bool primary = true,
                                 double radius = 0.0) {
  forage::FoodOutlet o;
  o.outlet_id = std::move(id);
  o.name = o.outlet_id;
  o.pos = pos;
  o.category = c;
  o.primary_food = primary;
  o.radius_m = radius > 0.0 ? radius : forage::category_default_radius(c);
  return o;
}

inline forage::StayPoint stay(std::string device, std::int64_t start, std::int64_t end, forage::LatLon c) {
  forage::StayPoint s;
  s.device_id = std::move(device);
  s.start_ts = start;
  s.end_ts = end;
  s.centroid = c;
  s.n_pings = 2;
  s.stay_id = forage::make_stay_id(s.device_id, start);
  return s;
}

/// Random catalog of `n` outlets inside a square of side `extent_m`. A few
/// outlets share a position so that distance ties occur.
inline std::vector<forage::FoodOutlet> random_outlets(std::mt19937_64& rng, std::size_t n, double extent_m) {
  std::uniform_real_distribution<double> u(0.0, extent_m);
  std::uniform_int_distribution<int> cat(0, 3);
  std::bernoulli_distribution coin(0.5);
  std::vector<forage::FoodOutlet> out;
  for (std::size_t i = 0; i < n; ++i) {
    forage::LatLon p = offset(kOrigin, u(rng), u(rng));
    if (i > 0 && i % 10 == 0) p = out[i / 2].pos;
    char id[16];
    std::snprintf(id, sizeof id, "o%04zu", (i * 7919) % 10000);
    const auto c = static_cast<forage::Category>(cat(rng));
    out.push_back(outlet(id + std::to_string(i), p, c, coin(rng)));
  }
  return out;
}

/// Random connected directed graph: a bidirectional random spanning tree
/// plus extra arcs, some one-way. Lengths are positive reals.
struct RandomGraph {
  std::vector<forage::RoadNode> nodes;
  std::vector<forage::RoadEdge> edges;
};

inline RandomGraph random_graph(std::mt19937_64& rng, std::size_t n) {
  RandomGraph g;
  std::uniform_real_distribution<double> u(0.0, 5000.0);
  std::uniform_real_distribution<double> len(1.0, 1000.0);
  std::vector<std::int64_t> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(static_cast<std::int64_t>(i * 3 + 100));
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back({ids[i], offset(kOrigin, u(rng), u(rng))});
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t parent = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    g.edges.push_back({ids[parent], ids[i], len(rng), false});
  }
  const std::size_t extra = std::uniform_int_distribution<std::size_t>(0, 2 * n)(rng);
  for (std::size_t k = 0; k < extra; ++k) {
    const auto a = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const auto b = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    if (a == b) continue;
    // Integer lengths make equal-length alternative paths common.
    const double l = k % 3 == 0 ? std::floor(len(rng) / 100.0) + 1.0 : len(rng);
    g.edges.push_back({ids[a], ids[b], l, std::bernoulli_distribution(0.5)(rng)});
  }
  return g;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("forage_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixture
