#include "forage/home.hpp"

#include <absl/container/flat_hash_map.h>

#include <vector>

#include "forage/parallel.hpp"

namespace forage {

std::string_view home_method_name(HomeMethod m) {
  return m == HomeMethod::Nighttime ? "nighttime" : "weekend_fallback";
}

std::optional<HomeMethod> home_method_from_name(std::string_view s) {
  if (s == "nighttime") return HomeMethod::Nighttime;
  if (s == "weekend_fallback") return HomeMethod::WeekendFallback;
  return std::nullopt;
}

namespace {

struct CellCounts {
  std::uint32_t night = 0;
  std::uint32_t weekend_day = 0;
  std::uint32_t all = 0;
  double night_lat = 0.0, night_lon = 0.0;
  double weekend_lat = 0.0, weekend_lon = 0.0;
};

}  // namespace

std::optional<HomeLocation> infer_home(const DeviceTrack& track, const LocalFrame& frame, double cell_m,
                                       const LocalClock& clock, const HomeParams& params) {
  absl::flat_hash_map<GridCell, CellCounts> cells;
  for (const auto& p : track.points) {
    auto& c = cells[to_cell(p.pos, frame, cell_m)];
    ++c.all;
    const LocalTime lt = clock.at(p.ts);
    const bool night = lt.hour >= params.night_start_hour || lt.hour < params.night_end_hour;
    if (night) {
      ++c.night;
      c.night_lat += p.pos.lat;
      c.night_lon += p.pos.lon;
    } else if (lt.is_weekend()) {
      ++c.weekend_day;
      c.weekend_lat += p.pos.lat;
      c.weekend_lon += p.pos.lon;
    }
  }

  auto pick = [&](auto count_of) -> std::optional<std::pair<GridCell, const CellCounts*>> {
    std::optional<std::pair<GridCell, const CellCounts*>> best;
    for (const auto& [cell, counts] : cells) {
      const std::uint32_t n = count_of(counts);
      if (n == 0) continue;
      if (!best) {
        best = {cell, &counts};
        continue;
      }
      const std::uint32_t bn = count_of(*best->second);
      if (n > bn || (n == bn && (counts.all > best->second->all ||
                                 (counts.all == best->second->all && cell < best->first)))) {
        best = {cell, &counts};
      }
    }
    return best;
  };

  HomeLocation home;
  home.device_id = track.device_id;
  if (auto night = pick([](const CellCounts& c) { return c.night; }); night && night->second->night >= params.min_night_pings) {
    const auto& c = *night->second;
    home.cell = night->first;
    home.method = HomeMethod::Nighttime;
    home.support = c.night;
    home.centroid = {c.night_lat / c.night, c.night_lon / c.night};
    return home;
  }
  if (auto wk = pick([](const CellCounts& c) { return c.weekend_day; }); wk && wk->second->weekend_day >= params.min_weekend_pings) {
    const auto& c = *wk->second;
    home.cell = wk->first;
    home.method = HomeMethod::WeekendFallback;
    home.support = c.weekend_day;
    home.centroid = {c.weekend_lat / c.weekend_day, c.weekend_lon / c.weekend_day};
    return home;
  }
  return std::nullopt;
}

std::optional<HomeLocation> infer_home(const DeviceTrack& track, const StudyConfig& cfg, const LocalClock& clock,
                                       const HomeParams& params) {
  return infer_home(track, LocalFrame(cfg.bbox.south_west()), cfg.grid_cell_m, clock, params);
}

HomeInference infer_all_homes(std::span<const DeviceTrack> tracks, const StudyConfig& cfg, const HomeParams& params,
                              int workers) {
  const LocalClock clock(cfg.timezone);
  const LocalFrame frame(cfg.bbox.south_west());
  std::vector<std::optional<HomeLocation>> slots(tracks.size());
  parallel_for(tracks.size(), workers,
               [&](std::size_t i) { slots[i] = infer_home(tracks[i], frame, cfg.grid_cell_m, clock, params); });

  HomeInference out;
  out.report.n_devices = tracks.size();
  for (auto& h : slots) {
    if (!h) {
      ++out.report.n_none;
      continue;
    }
    if (h->method == HomeMethod::Nighttime) {
      ++out.report.n_nighttime;
    } else {
      ++out.report.n_fallback;
    }
    std::string key = h->device_id;
    out.homes.emplace(std::move(key), std::move(*h));
  }
  return out;
}

}  // namespace forage
