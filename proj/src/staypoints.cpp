#include "forage/staypoints.hpp"

#include <algorithm>

#include "forage/geo.hpp"
#include "forage/parallel.hpp"

namespace forage {

std::string make_stay_id(std::string_view device_id, std::int64_t start_ts) {
  std::string id;
  id.reserve(device_id.size() + 12);
  id.append(device_id);
  id.push_back(':');
  id.append(std::to_string(start_ts));
  return id;
}

std::vector<StayPoint> detect_stays(const DeviceTrack& track, const StayParams& params) {
  std::vector<StayPoint> stays;
  const auto& pts = track.points;
  const std::size_t n = pts.size();
  const auto min_span = static_cast<std::int64_t>(params.min_dur_min * 60.0);
  const auto max_span = static_cast<std::int64_t>(params.max_dur_min * 60.0);

  std::size_t i = 0;
  while (i + 1 < n) {
    std::size_t j = i + 1;
    while (j < n && haversine(pts[i].pos, pts[j].pos) <= params.dist_threshold_m) ++j;
    // Window is [i, j).
    const std::int64_t span = pts[j - 1].ts - pts[i].ts;
    if (j - i >= 2 && span >= min_span && span <= max_span) {
      StayPoint s;
      double lat = 0.0, lon = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        lat += pts[k].pos.lat;
        lon += pts[k].pos.lon;
      }
      const auto m = static_cast<double>(j - i);
      s.centroid = {lat / m, lon / m};
      s.device_id = track.device_id;
      s.start_ts = pts[i].ts;
      s.end_ts = pts[j - 1].ts;
      s.n_pings = static_cast<std::uint32_t>(j - i);
      s.stay_id = make_stay_id(track.device_id, s.start_ts);
      stays.push_back(std::move(s));
      i = j;
    } else if (span > max_span) {
      i = j;
    } else {
      ++i;
    }
  }
  return stays;
}

void link_origins(std::span<StayPoint> stays, const DeviceTrack& track, const StayParams& params) {
  const auto& pts = track.points;
  auto by_ts = [](const TrackPoint& p, std::int64_t t) { return p.ts < t; };
  for (std::size_t k = 0; k < stays.size(); ++k) {
    stays[k].origin.reset();
    if (k == 0) continue;
    const StayPoint& prev = stays[k - 1];
    const StayPoint& cur = stays[k];
    auto first = std::lower_bound(pts.begin(), pts.end(), prev.end_ts, by_ts);
    auto last = std::lower_bound(pts.begin(), pts.end(), cur.start_ts, by_ts);
    if (first == pts.end() || last == pts.end()) continue;
    bool continuous = true;
    for (auto it = first; it != last; ++it) {
      if ((it + 1)->ts - it->ts > params.max_track_gap_s) {
        continuous = false;
        break;
      }
    }
    if (continuous) stays[k].origin = prev.stay_id;
  }
}

std::vector<StayPoint> filter_food_candidates(std::span<const StayPoint> stays, double max_food_dur_min) {
  std::vector<StayPoint> out;
  for (const auto& s : stays) {
    if (s.duration_min() <= max_food_dur_min) out.push_back(s);
  }
  return out;
}

std::vector<StayPoint> detect_all_stays(std::span<const DeviceTrack> tracks, const StayParams& params, int workers) {
  std::vector<std::vector<StayPoint>> per_device(tracks.size());
  parallel_for(tracks.size(), workers, [&](std::size_t i) {
    per_device[i] = detect_stays(tracks[i], params);
    link_origins(per_device[i], tracks[i], params);
  });
  std::size_t total = 0;
  for (const auto& v : per_device) total += v.size();
  std::vector<StayPoint> out;
  out.reserve(total);
  for (auto& v : per_device) {
    std::move(v.begin(), v.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace forage
