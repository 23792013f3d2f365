#include "forage/synth.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "forage/local_time.hpp"
#include "forage/parallel.hpp"

namespace forage {

void SynthParams::validate() const {
  if (!(grid_extent_m > 0.0)) throw InputError("synth.grid_extent_m must be > 0");
  if (!(road_spacing_m > 0.0) || road_spacing_m > grid_extent_m) {
    throw InputError("synth.road_spacing_m must be in (0, grid_extent_m]");
  }
  if (cadence_s <= 0) throw InputError("synth.cadence_s must be > 0");
  if (noise_sigma_m < 0.0 || noise_cap_m < 0.0) throw InputError("synth noise parameters must be >= 0");
  if (!(speed_m_per_min > 0.0)) throw InputError("synth.speed_m_per_min must be > 0");
  if (tract_k == 0) throw InputError("synth.tract_k must be > 0");
  for (double p : {fallback_share, worker_share, weekday_food_rate, evening_trip_rate, weekend_food_rate,
                   holiday_factor, other_accuracy_rate}) {
    if (p < 0.0 || p > 1.0) throw InputError("synth rates must lie in [0, 1]");
  }
  if (holiday) {
    std::int64_t d = 0;
    if (!parse_day(*holiday, d)) throw InputError("synth.holiday must be YYYY-MM-DD");
  }
}

std::string_view dwell_kind_name(DwellKind k) {
  switch (k) {
    case DwellKind::Home: return "home";
    case DwellKind::Work: return "work";
    case DwellKind::Other: return "other";
    case DwellKind::Food: return "food";
  }
  return "home";
}

std::optional<DwellKind> dwell_kind_from_name(std::string_view s) {
  for (auto k : {DwellKind::Home, DwellKind::Work, DwellKind::Other, DwellKind::Food}) {
    if (dwell_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

namespace {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

std::string padded(char prefix, std::uint64_t num, std::size_t width) {
  std::string digits = std::to_string(num);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

using XY = LocalFrame::XY;

double dist(XY a, XY b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Points bucketed by square cells of side `cell`; radius queries up to `cell`.
class XYGrid {
 public:
  explicit XYGrid(double cell) : cell_(cell) {}

  void add(XY p) { cells_[key(p)].push_back(p); }

  bool any_within(XY p, double r) const {
    const auto [cx, cy] = key(p);
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        auto it = cells_.find(std::pair{cx + dx, cy + dy});
        if (it == cells_.end()) continue;
        for (const auto& q : it->second) {
          if (dist(p, q) < r) return true;
        }
      }
    }
    return false;
  }

 private:
  std::pair<std::int64_t, std::int64_t> key(XY p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)), static_cast<std::int64_t>(std::floor(p.y / cell_))};
  }
  double cell_;
  absl::flat_hash_map<std::pair<std::int64_t, std::int64_t>, std::vector<XY>> cells_;
};

constexpr int kPlacementAttempts = 40;
constexpr double kMargin = 100.0;

XY random_xy(Rng& rng, double extent) {
  const double lo = std::min(kMargin, extent / 4.0);
  return {uniform(rng, lo, extent - lo), uniform(rng, lo, extent - lo)};
}

struct OutletSite {
  XY xy;
  std::uint32_t idx = 0;  // position in SynthWorld::outlets
};

struct World {
  const SynthParams& p;
  LocalFrame frame;
  LocalClock clock;
  std::vector<FoodOutlet> outlets;
  std::array<std::vector<OutletSite>, 4> by_category;
  XYGrid outlet_grid;
  std::optional<std::int64_t> holiday_day;
};

struct DeviceOut {
  DeviceTruth truth;
  std::vector<SynthPing> pings;
};

XY sample_place(Rng& rng, const World& w, std::span<const XY> avoid, double avoid_m) {
  XY best{};
  for (int a = 0; a < kPlacementAttempts; ++a) {
    best = random_xy(rng, w.p.grid_extent_m);
    bool ok = !w.outlet_grid.any_within(best, w.p.place_clearance_m);
    for (const auto& q : avoid) ok = ok && dist(best, q) >= avoid_m;
    if (ok) break;
  }
  return best;
}

struct Stop {
  DwellKind kind = DwellKind::Home;
  XY xy;
  std::optional<std::uint32_t> outlet;
  std::int64_t dur_s = 0;
  bool flexible = false;
  std::int64_t min_s = 0, max_s = 0;  // bounds for a flexible stop
};

constexpr std::array<double, 4> kCategoryWeights = {0.35, 0.20, 0.15, 0.30};
constexpr std::array<std::pair<double, double>, 4> kFoodMinutes = {
    std::pair{15.0, 60.0}, std::pair{20.0, 90.0}, std::pair{5.0, 30.0}, std::pair{5.0, 20.0}};

DeviceOut generate_device(const World& w, std::uint32_t device, const std::string& device_id) {
  const SynthParams& p = w.p;
  Rng rng(splitmix64(p.seed ^ splitmix64(0xD1CEULL + device)));
  DeviceOut out;
  DeviceTruth& truth = out.truth;
  truth.device_id = device_id;

  const XY home = sample_place(rng, w, {}, 0.0);
  truth.home = w.frame.unproject(home);
  truth.night_tracked = !chance(rng, p.fallback_share);
  const bool worker = chance(rng, p.worker_share);
  const XY anchors[1] = {home};
  const XY work = sample_place(rng, w, anchors, 300.0);
  const XY errands[2] = {sample_place(rng, w, anchors, 300.0), sample_place(rng, w, anchors, 300.0)};

  // Three nearest outlets of each category are the device's usual stores.
  std::array<std::vector<std::uint32_t>, 4> favorites;
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& sites = w.by_category[c];
    std::vector<std::pair<double, std::uint32_t>> d;
    d.reserve(sites.size());
    for (const auto& s : sites) d.emplace_back(dist(home, s.xy), s.idx);
    const std::size_t k = std::min<std::size_t>(3, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    for (std::size_t i = 0; i < k; ++i) favorites[c].push_back(d[i].second);
  }
  const bool has_outlets = std::any_of(favorites.begin(), favorites.end(), [](const auto& f) { return !f.empty(); });

  auto food_stop = [&]() -> Stop {
    std::size_t c = 0;
    do {
      c = std::discrete_distribution<std::size_t>(kCategoryWeights.begin(), kCategoryWeights.end())(rng);
    } while (favorites[c].empty());
    std::uint32_t idx = 0;
    if (chance(rng, 0.2)) {
      const auto& sites = w.by_category[c];
      idx = sites[std::uniform_int_distribution<std::size_t>(0, sites.size() - 1)(rng)].idx;
    } else {
      static constexpr std::array<double, 3> kFav = {0.6, 0.3, 0.1};
      std::size_t k = std::discrete_distribution<std::size_t>(kFav.begin(), kFav.end())(rng);
      idx = favorites[c][std::min(k, favorites[c].size() - 1)];
    }
    Stop s;
    s.kind = DwellKind::Food;
    s.outlet = idx;
    const XY o = w.frame.project(w.outlets[idx].pos);
    const double r = 8.0 * std::sqrt(uniform(rng, 0.0, 1.0));
    const double th = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    s.xy = {o.x + r * std::cos(th), o.y + r * std::sin(th)};
    const auto [lo, hi] = kFoodMinutes[c];
    s.dur_s = static_cast<std::int64_t>(std::llround(uniform(rng, lo, hi) * 60.0));
    return s;
  };
  auto fixed = [&](DwellKind kind, XY xy, double lo_min, double hi_min) {
    Stop s;
    s.kind = kind;
    s.xy = xy;
    s.dur_s = static_cast<std::int64_t>(std::llround(uniform(rng, lo_min, hi_min) * 60.0));
    return s;
  };
  auto flexible = [&](DwellKind kind, XY xy, double lo_min, double hi_min) {
    Stop s;
    s.kind = kind;
    s.xy = xy;
    s.flexible = true;
    s.min_s = static_cast<std::int64_t>(lo_min * 60.0);
    s.max_s = static_cast<std::int64_t>(hi_min * 60.0);
    return s;
  };
  auto travel_s = [&](XY a, XY b) {
    const auto t = static_cast<std::int64_t>(std::ceil(dist(a, b) / p.speed_m_per_min * 60.0));
    return std::max<std::int64_t>(t, 60);
  };

  const std::int64_t first_day = w.clock.at(p.start_ts).day;
  const std::int64_t end_ts = w.clock.day_start_utc(first_day + p.n_days);
  auto local = [&](std::int64_t day, double hours) {
    return w.clock.day_start_utc(day) + static_cast<std::int64_t>(std::llround(hours * 3600.0));
  };

  auto& dwells = truth.dwells;
  auto push = [&](DwellKind kind, XY xy, std::optional<std::uint32_t> outlet, std::int64_t s, std::int64_t e) {
    PlantedDwell d;
    d.kind = kind;
    d.pos = w.frame.unproject(xy);
    if (outlet) d.outlet_id = w.outlets[*outlet].outlet_id;
    d.start_ts = s;
    d.end_ts = e;
    if (!dwells.empty()) d.origin = static_cast<std::uint32_t>(dwells.size() - 1);
    dwells.push_back(std::move(d));
  };
  std::vector<XY> dwell_xy;

  std::int64_t home_since = p.start_ts;
  for (std::uint32_t k = 0; k < p.n_days && p.n_days > 0; ++k) {
    const std::int64_t day = first_day + k;
    const LocalTime lt = w.clock.at(w.clock.day_start_utc(day) + 12 * 3600);
    const bool holiday = w.holiday_day && *w.holiday_day == day;
    const bool workday = worker && !lt.is_weekend() && !holiday;
    const double f = holiday ? p.holiday_factor : 1.0;

    std::int64_t dep = workday ? local(day, uniform(rng, 6.5, 8.0)) : local(day, uniform(rng, 8.0, 10.5));
    dep = std::max(dep, home_since + 60 * 60);
    dep = std::min(dep, home_since + static_cast<std::int64_t>(uniform(rng, 600.0, 690.0) * 60.0));
    if (dep >= end_ts) break;

    std::vector<Stop> chain;
    if (workday) {
      if (has_outlets && chance(rng, 0.15 * f)) chain.push_back(food_stop());
      chain.push_back(flexible(DwellKind::Work, work, 240.0, 600.0));
      if (has_outlets && chance(rng, p.weekday_food_rate * f)) chain.push_back(food_stop());
      if (has_outlets && chance(rng, p.evening_trip_rate * f)) {
        chain.push_back(fixed(DwellKind::Home, home, 60.0, 150.0));
        chain.push_back(food_stop());
      }
    } else {
      const double rate = lt.is_weekend() || holiday ? p.weekend_food_rate : p.weekday_food_rate;
      if (has_outlets && chance(rng, rate * f)) chain.push_back(food_stop());
      chain.push_back(fixed(DwellKind::Other, errands[0], 45.0, 150.0));
      chain.push_back(flexible(DwellKind::Home, home, 60.0, 480.0));
      if (has_outlets && chance(rng, 0.5 * f)) chain.push_back(food_stop());
      if (chance(rng, 0.3)) chain.push_back(fixed(DwellKind::Other, errands[1], 30.0, 120.0));
    }
    const double target_h = workday ? uniform(rng, 19.0, 21.5) : uniform(rng, 20.0, 22.0);
    const std::int64_t target = local(day, target_h);

    // Size the flexible stop so the device gets home close to the target.
    std::int64_t busy = 0;
    XY at = home;
    for (const auto& s : chain) {
      busy += travel_s(at, s.xy) + s.dur_s;
      at = s.xy;
    }
    busy += travel_s(at, home);
    std::int64_t arrival = dep + busy;
    for (auto& s : chain) {
      if (s.flexible) {
        s.dur_s = std::clamp(target - dep - busy, s.min_s, s.max_s);
        arrival += s.dur_s;
      }
    }
    // Home early: an evening errand keeps the overnight dwell under the cap
    // and the next departure after dawn.
    if (target - arrival > 30 * 60) {
      const XY last = chain.back().xy;
      const std::int64_t errand_s = std::min<std::int64_t>(60 * 60, (target - arrival) / 3);
      const std::int64_t legs = travel_s(home, errands[1]) + travel_s(errands[1], home) - travel_s(last, home);
      Stop h = fixed(DwellKind::Home, home, 0.0, 0.0);
      h.dur_s = std::max<std::int64_t>(20 * 60, target - arrival - errand_s - legs);
      Stop e = fixed(DwellKind::Other, errands[1], 0.0, 0.0);
      e.dur_s = std::max<std::int64_t>(10 * 60, errand_s);
      if (chain.back().kind == DwellKind::Home) {
        chain.back().dur_s = std::min<std::int64_t>(chain.back().dur_s + h.dur_s, 600 * 60);
      } else {
        chain.push_back(h);
      }
      chain.push_back(e);
    }

    push(DwellKind::Home, home, std::nullopt, home_since, dep);
    dwell_xy.push_back(home);
    std::int64_t t = dep;
    at = home;
    bool done = false;
    for (const auto& s : chain) {
      const std::int64_t arrive = t + travel_s(at, s.xy);
      const std::int64_t leave = arrive + s.dur_s;
      if (leave + travel_s(s.xy, home) >= end_ts) {
        done = true;
        break;
      }
      push(s.kind, s.xy, s.outlet, arrive, leave);
      dwell_xy.push_back(s.xy);
      t = leave;
      at = s.xy;
    }
    home_since = t + travel_s(at, home);
    if (done) break;
  }
  const std::int64_t last_end =
      std::min(end_ts, home_since + static_cast<std::int64_t>(uniform(rng, 600.0, 690.0) * 60.0));
  if (home_since < end_ts) {
    push(DwellKind::Home, home, std::nullopt, home_since, last_end);
    dwell_xy.push_back(home);
  }

  // Fixes: every dwell's arrival and departure plus cadence ticks in between;
  // travel ticks closer than half a cadence to either end are skipped.
  std::normal_distribution<double> noise(0.0, 1.0);
  auto emit = [&](std::int64_t ts, XY xy) {
    if (ts < p.start_ts || ts >= end_ts) return;
    if (!truth.night_tracked) {
      const int h = w.clock.at(ts).hour;
      if (h >= 22 || h < 6) return;
    }
    auto jitter = [&](double sigma, double cap) {
      XY e{0.0, 0.0};
      if (sigma > 0.0) {
        e = {noise(rng) * sigma, noise(rng) * sigma};
        const double n = std::hypot(e.x, e.y);
        if (n > cap) e = {e.x * cap / n, e.y * cap / n};
      }
      return XY{xy.x + e.x, xy.y + e.y};
    };
    out.pings.push_back({device, ts, w.frame.unproject(jitter(p.noise_sigma_m, p.noise_cap_m)), Accuracy::High});
    if (p.other_accuracy_rate > 0.0 && chance(rng, p.other_accuracy_rate)) {
      out.pings.push_back(
          {device, ts + 1, w.frame.unproject(jitter(3.0 * p.noise_sigma_m, 200.0)), Accuracy::Other});
    }
  };
  const std::int64_t c = p.cadence_s;
  for (std::size_t i = 0; i < dwells.size(); ++i) {
    const auto& d = dwells[i];
    emit(d.start_ts, dwell_xy[i]);
    for (std::int64_t g = (floor_div(d.start_ts, c) + 1) * c; g < d.end_ts; g += c) emit(g, dwell_xy[i]);
    if (d.end_ts > d.start_ts) emit(d.end_ts, dwell_xy[i]);
    if (i + 1 == dwells.size()) break;
    const std::int64_t t0 = d.end_ts, t1 = dwells[i + 1].start_ts;
    const XY a = dwell_xy[i], b = dwell_xy[i + 1];
    for (std::int64_t g = (floor_div(2 * t0 + c, 2 * c) + 1) * c; 2 * g < 2 * t1 - c; g += c) {
      const double f = static_cast<double>(g - t0) / static_cast<double>(t1 - t0);
      emit(g, {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
    }
  }
  return out;
}

}  // namespace

SynthWorld generate_world(const SynthParams& params, int workers) {
  params.validate();
  SynthWorld world;
  World w{params, LocalFrame(params.origin), LocalClock(params.timezone), {}, {}, XYGrid(params.place_clearance_m), {}};
  if (params.holiday) {
    std::int64_t d = 0;
    parse_day(*params.holiday, d);
    w.holiday_day = d;
  }
  const double E = params.grid_extent_m;
  world.extent = {params.origin.lat, params.origin.lon, w.frame.unproject({E, E}).lat, w.frame.unproject({E, E}).lon};

  // Road grid.
  const auto n = static_cast<std::int64_t>(std::floor(E / params.road_spacing_m)) + 1;
  world.nodes.reserve(static_cast<std::size_t>(n * n));
  for (std::int64_t iy = 0; iy < n; ++iy) {
    for (std::int64_t ix = 0; ix < n; ++ix) {
      const XY xy{static_cast<double>(ix) * params.road_spacing_m, static_cast<double>(iy) * params.road_spacing_m};
      world.nodes.push_back({iy * n + ix, w.frame.unproject(xy)});
    }
  }
  for (std::int64_t iy = 0; iy < n; ++iy) {
    for (std::int64_t ix = 0; ix < n; ++ix) {
      const std::int64_t id = iy * n + ix;
      const LatLon here = world.nodes[static_cast<std::size_t>(id)].pos;
      if (ix + 1 < n) {
        world.edges.push_back({id, id + 1, haversine(here, world.nodes[static_cast<std::size_t>(id + 1)].pos), false});
      }
      if (iy + 1 < n) {
        world.edges.push_back({id, id + n, haversine(here, world.nodes[static_cast<std::size_t>(id + n)].pos), false});
      }
    }
  }

  // Outlets, spread out so stays at different stores never merge.
  Rng rng(splitmix64(params.seed ^ 0x0A77E7ULL));
  XYGrid spacing(std::max(params.outlet_min_separation_m, 1.0));
  const std::size_t id_width = std::max<std::size_t>(6, std::to_string(4ULL * params.n_outlets_per_category).size());
  std::uint32_t next_id = 0;
  for (auto cat : kOutletCategories) {
    for (std::uint32_t i = 0; i < params.n_outlets_per_category; ++i) {
      XY xy{};
      for (int a = 0; a < kPlacementAttempts; ++a) {
        xy = random_xy(rng, E);
        if (!spacing.any_within(xy, params.outlet_min_separation_m)) break;
      }
      spacing.add(xy);
      w.outlet_grid.add(xy);
      FoodOutlet o;
      o.outlet_id = padded('o', next_id++, id_width);
      o.name = std::string(category_name(cat)) + " " + std::to_string(i + 1);
      o.pos = w.frame.unproject(xy);
      o.category = cat;
      o.primary_food = cat == Category::LargeGrocery || ((cat == Category::SmallHealthy || cat == Category::ProcessedFood) && chance(rng, 0.5));
      o.radius_m = category_default_radius(cat);
      w.by_category[category_index(cat)].push_back({xy, static_cast<std::uint32_t>(w.outlets.size())});
      w.outlets.push_back(std::move(o));
    }
  }

  // Devices.
  const std::size_t dev_width = std::max<std::size_t>(5, std::to_string(params.n_devices).size());
  world.device_ids.resize(params.n_devices);
  for (std::uint32_t i = 0; i < params.n_devices; ++i) world.device_ids[i] = padded('d', i, dev_width);
  std::vector<DeviceOut> devices(params.n_devices);
  parallel_for(params.n_devices, workers,
               [&](std::size_t i) { devices[i] = generate_device(w, static_cast<std::uint32_t>(i), world.device_ids[i]); });

  std::size_t total = 0;
  for (const auto& d : devices) total += d.pings.size();
  world.pings.reserve(total);
  world.truth.seed = params.seed;
  world.truth.devices.reserve(devices.size());
  for (auto& d : devices) {
    world.pings.insert(world.pings.end(), d.pings.begin(), d.pings.end());
    d.pings = {};
    world.truth.devices.push_back(std::move(d.truth));
  }
  std::sort(world.pings.begin(), world.pings.end(), [](const SynthPing& a, const SynthPing& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    if (a.device != b.device) return a.device < b.device;
    return a.accuracy < b.accuracy;
  });

  // k x k tracts; populations imply a 6-14% sampling rate.
  const std::uint32_t k = params.tract_k;
  std::vector<std::uint32_t> homes_in(static_cast<std::size_t>(k) * k, 0);
  const double side = E / static_cast<double>(k);
  for (const auto& d : world.truth.devices) {
    const XY h = w.frame.project(d.home);
    const auto tx = std::min<std::uint32_t>(k - 1, static_cast<std::uint32_t>(std::max(0.0, h.x / side)));
    const auto ty = std::min<std::uint32_t>(k - 1, static_cast<std::uint32_t>(std::max(0.0, h.y / side)));
    ++homes_in[ty * k + tx];
  }
  for (std::uint32_t ty = 0; ty < k; ++ty) {
    for (std::uint32_t tx = 0; tx < k; ++tx) {
      Tract t;
      t.id = "12031" + padded('0', ty * k + tx + 1, 5);
      const std::uint32_t count = homes_in[ty * k + tx];
      t.population = count > 0 ? std::round(static_cast<double>(count) / uniform(rng, 0.06, 0.14))
                               : std::round(uniform(rng, 800.0, 1500.0));
      const double x0 = tx * side, x1 = (tx + 1) * side, y0 = ty * side, y1 = (ty + 1) * side;
      t.rings.push_back({w.frame.unproject({x0, y0}), w.frame.unproject({x1, y0}), w.frame.unproject({x1, y1}),
                         w.frame.unproject({x0, y1})});
      world.tracts.push_back(std::move(t));
    }
  }
  world.outlets = std::move(w.outlets);
  return world;
}

std::vector<DeviceTrack> tracks_from_pings(const SynthWorld& world) {
  std::vector<DeviceTrack> tracks(world.device_ids.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) tracks[i].device_id = world.device_ids[i];
  for (const auto& p : world.pings) {
    if (p.accuracy == Accuracy::High) tracks[p.device].points.push_back({p.ts, p.pos});
  }
  return tracks;
}

std::vector<SynthPing> degrade(std::span<const SynthPing> pings, const DegradeParams& params) {
  if (params.dropout_p < 0.0 || params.dropout_p >= 1.0) throw std::invalid_argument("dropout_p must be in [0, 1)");
  // Merged, sorted blackouts so each ping checks one interval.
  auto sorted = params.blackouts;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<std::int64_t, std::int64_t>> blacks;
  for (const auto& b : sorted) {
    if (b.second <= b.first) continue;
    if (!blacks.empty() && b.first <= blacks.back().second) {
      blacks.back().second = std::max(blacks.back().second, b.second);
    } else {
      blacks.push_back(b);
    }
  }
  std::vector<SynthPing> out;
  out.reserve(pings.size());
  for (const auto& p : pings) {
    if (params.dropout_p > 0.0) {
      const std::uint64_t h = splitmix64(params.seed ^ splitmix64(p.device ^ splitmix64(static_cast<std::uint64_t>(p.ts))));
      const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
      if (u < params.dropout_p) continue;
    }
    auto it = std::upper_bound(blacks.begin(), blacks.end(), std::pair{p.ts, std::numeric_limits<std::int64_t>::max()});
    const bool blocked = it != blacks.begin() && p.ts < std::prev(it)->second;
    if (!blocked) out.push_back(p);
  }
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> periodic_blackouts(std::int64_t first, std::int64_t last,
                                                                      std::int64_t period_s, std::int64_t length_s) {
  if (period_s <= 0 || length_s <= 0) throw std::invalid_argument("blackout period and length must be > 0");
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t t = first; t < last; t += period_s) out.emplace_back(t, std::min(last, t + length_s));
  return out;
}

double interval_iou(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
  const double inter = static_cast<double>(std::max<std::int64_t>(0, std::min(a1, b1) - std::max(a0, b0)));
  const double uni = static_cast<double>(std::max(a1, b1) - std::min(a0, b0));
  if (uni <= 0.0) return a0 == b0 && a1 == b1 ? 1.0 : 0.0;
  return inter / uni;
}

namespace {

// One-to-one greedy matching by descending IoU; returns the match count.
template <class Score>
std::uint64_t greedy_match(std::size_t n_a, std::size_t n_b, Score score) {
  struct Cand {
    double iou;
    std::size_t a, b;
  };
  std::vector<Cand> cands;
  for (std::size_t a = 0; a < n_a; ++a) {
    for (std::size_t b = 0; b < n_b; ++b) {
      if (auto s = score(a, b)) cands.push_back({*s, a, b});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.iou != y.iou) return x.iou > y.iou;
    return std::pair{x.a, x.b} < std::pair{y.a, y.b};
  });
  std::vector<bool> used_a(n_a), used_b(n_b);
  std::uint64_t n = 0;
  for (const auto& c : cands) {
    if (used_a[c.a] || used_b[c.b]) continue;
    used_a[c.a] = used_b[c.b] = true;
    ++n;
  }
  return n;
}

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport evaluate(std::span<const StayPoint> stays, std::span<const FoodVisit> visits, const HomeMap& homes,
                    const GroundTruth& truth, const EvalParams& params) {
  EvalReport r;
  r.n_devices = truth.devices.size();
  absl::flat_hash_map<std::string_view, const DeviceTruth*> by_id;
  for (const auto& d : truth.devices) by_id.emplace(d.device_id, &d);

  for (const auto& [id, h] : homes) {
    auto it = by_id.find(id);
    if (it == by_id.end()) continue;
    ++r.n_homes_inferred;
    if (haversine(h.centroid, it->second->home) <= params.home_hit_m) ++r.n_homes_hit;
  }
  r.home_hit_rate = ratio(r.n_homes_hit, r.n_homes_inferred);
  r.home_coverage = ratio(r.n_homes_inferred, r.n_devices);

  absl::flat_hash_map<std::string_view, std::vector<const StayPoint*>> stays_of;
  for (const auto& s : stays) stays_of[s.device_id].push_back(&s);
  absl::flat_hash_map<std::string_view, std::vector<const FoodVisit*>> visits_of;
  for (const auto& v : visits) visits_of[v.device_id].push_back(&v);

  std::uint64_t true_known = 0, true_yes = 0;
  for (const auto& d : truth.devices) {
    static const std::vector<const StayPoint*> kNoStays;
    static const std::vector<const FoodVisit*> kNoVisits;
    auto si = stays_of.find(d.device_id);
    const auto& ds = si == stays_of.end() ? kNoStays : si->second;
    auto vi = visits_of.find(d.device_id);
    const auto& dv = vi == visits_of.end() ? kNoVisits : vi->second;

    auto stay_score = [&](const PlantedDwell& p, const StayPoint& s) -> std::optional<double> {
      const double iou = interval_iou(p.start_ts, p.end_ts, s.start_ts, s.end_ts);
      if (iou < params.min_iou || haversine(p.pos, s.centroid) > params.max_centroid_m) return std::nullopt;
      return iou;
    };

    std::vector<const PlantedDwell*> planted_short;
    std::vector<const PlantedDwell*> planted_food;
    for (const auto& p : d.dwells) {
      if (p.duration_min() >= params.min_stay_min && p.duration_min() <= params.max_stay_min) planted_short.push_back(&p);
      if (p.kind == DwellKind::Food) {
        planted_food.push_back(&p);
        if (p.origin) {
          ++true_known;
          if (d.dwells[*p.origin].kind == DwellKind::Home) ++true_yes;
        }
      }
    }
    std::vector<const StayPoint*> detected_short;
    for (const auto* s : ds) {
      if (s->duration_min() <= params.max_stay_min) detected_short.push_back(s);
    }

    r.n_planted_stays += planted_short.size();
    r.n_recalled_stays += greedy_match(planted_short.size(), ds.size(),
                                       [&](std::size_t a, std::size_t b) { return stay_score(*planted_short[a], *ds[b]); });
    r.n_detected_stays += detected_short.size();
    r.n_precise_stays += greedy_match(d.dwells.size(), detected_short.size(), [&](std::size_t a, std::size_t b) {
      return stay_score(d.dwells[a], *detected_short[b]);
    });

    const auto n_visit_matches = greedy_match(planted_food.size(), dv.size(), [&](std::size_t a, std::size_t b) -> std::optional<double> {
      const auto& p = *planted_food[a];
      const auto& v = *dv[b];
      if (!p.outlet_id || *p.outlet_id != v.outlet_id) return std::nullopt;
      const double iou = interval_iou(p.start_ts, p.end_ts, v.start_ts, v.end_ts);
      if (iou < params.min_iou) return std::nullopt;
      return iou;
    });
    r.n_planted_visits += planted_food.size();
    r.n_detected_visits += dv.size();
    r.n_recalled_visits += n_visit_matches;
    r.n_precise_visits += n_visit_matches;
    for (const auto* v : dv) {
      if (v->home_based == HomeBased::UnknownOrigin) continue;
      ++r.n_known_origin_visits;
      if (v->home_based == HomeBased::Yes) ++r.n_home_based_visits;
    }
  }
  r.stay_recall = ratio(r.n_recalled_stays, r.n_planted_stays);
  r.stay_precision = ratio(r.n_precise_stays, r.n_detected_stays);
  r.visit_recall = ratio(r.n_recalled_visits, r.n_planted_visits);
  r.visit_precision = ratio(r.n_precise_visits, r.n_detected_visits);
  r.visit_frequency_ratio = ratio(r.n_detected_visits, r.n_planted_visits);
  r.measured_home_based_share = ratio(r.n_home_based_visits, r.n_known_origin_visits);
  r.true_home_based_share = ratio(true_yes, true_known);
  return r;
}

}  // namespace forage
