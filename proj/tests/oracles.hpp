#pragma once

// Reference implementations the indexed and parallel kernels are checked
// against. They favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "forage/geo.hpp"
#include "forage/outlets.hpp"
#include "forage/routing.hpp"
#include "forage/staypoints.hpp"

namespace oracle {

/// O(n*m) scan: for each stay, the in-radius outlet with the smallest
/// distance, ties to the smallest outlet_id.
inline std::vector<forage::FoodVisit> brute_force_attribution(std::span<const forage::StayPoint> stays,
                                                              std::span<const forage::FoodOutlet> outlets,
                                                              std::optional<double> radius_override) {
  std::vector<forage::FoodVisit> out;
  for (const auto& s : stays) {
    const forage::FoodOutlet* best = nullptr;
    double best_d = 0.0;
    for (const auto& o : outlets) {
      const double d = forage::haversine(s.centroid, o.pos);
      const double r = radius_override ? *radius_override : o.radius_m;
      if (d > r) continue;
      if (!best || d < best_d || (d == best_d && o.outlet_id < best->outlet_id)) {
        best = &o;
        best_d = d;
      }
    }
    if (!best) continue;
    forage::FoodVisit v;
    v.visit_id = "v:" + s.stay_id;
    v.device_id = s.device_id;
    v.outlet_id = best->outlet_id;
    v.stay_id = s.stay_id;
    v.start_ts = s.start_ts;
    v.end_ts = s.end_ts;
    v.distance_m = best_d;
    v.category = best->category;
    v.primary_food = best->primary_food;
    out.push_back(v);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.stay_id < b.stay_id; });
  return out;
}

struct Arc {
  std::size_t from = 0, to = 0;
  double length = 0.0;
};

/// Bellman-Ford over an arc list; infinity marks unreachable nodes.
inline std::vector<double> bellman_ford(std::size_t n, std::span<const Arc> arcs, std::size_t source) {
  std::vector<double> dist(n, forage::kUnreachable);
  dist[source] = 0.0;
  for (std::size_t round = 0; round + 1 < n || round == 0; ++round) {
    bool changed = false;
    for (const auto& a : arcs) {
      if (std::isfinite(dist[a.from]) && dist[a.from] + a.length < dist[a.to]) {
        dist[a.to] = dist[a.from] + a.length;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

/// Arcs of a RoadGraph in index space.
inline std::vector<Arc> arcs_of(const forage::RoadGraph& g) {
  std::vector<Arc> arcs;
  for (std::uint32_t u = 0; u < g.node_count(); ++u) {
    for (const auto& a : g.out_arcs(u)) arcs.push_back({u, a.to, a.length_m});
  }
  return arcs;
}

// Flat-file metrics recomputation. Reads the pipeline's CSV files with a
// plain comma split (no quoting: every id the pipeline writes is unquoted)
// and rebuilds metrics.csv for the all-outlets, store-weighted scope.

using Row = std::map<std::string, std::string>;

inline std::vector<Row> read_rows(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& l) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : l) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    f.push_back(cur);
    return f;
  };
  if (!std::getline(in, line)) return rows;
  header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line);
    Row r;
    for (std::size_t i = 0; i < header.size() && i < f.size(); ++i) r[header[i]] = f[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

struct FlatInputs {
  std::string visits_csv, homes_csv, outlets_csv, nodes_csv, edges_csv;
  double max_snap_m = 500.0;
};

inline std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string fmt_opt(std::optional<double> v, int decimals) { return v ? fmt(*v, decimals) : std::string(); }

inline std::string recompute_metrics_csv(const FlatInputs& in) {
  struct Outlet {
    std::string id, code;
    forage::LatLon pos;
  };
  std::vector<Outlet> outlets;
  for (auto& r : read_rows(in.outlets_csv)) {
    outlets.push_back({r["outlet_id"], r["category_code"], {std::stod(r["lat"]), std::stod(r["lon"])}});
  }
  std::sort(outlets.begin(), outlets.end(), [](const Outlet& a, const Outlet& b) { return a.id < b.id; });

  std::vector<std::pair<long long, forage::LatLon>> nodes;
  for (auto& r : read_rows(in.nodes_csv)) {
    nodes.push_back({std::stoll(r["node_id"]), {std::stod(r["lat"]), std::stod(r["lon"])}});
  }
  std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::map<long long, std::size_t> node_idx;
  for (std::size_t i = 0; i < nodes.size(); ++i) node_idx[nodes[i].first] = i;
  std::vector<Arc> arcs;
  for (auto& r : read_rows(in.edges_csv)) {
    const auto a = node_idx.at(std::stoll(r["from"]));
    const auto b = node_idx.at(std::stoll(r["to"]));
    const double len = std::stod(r["length_m"]);
    arcs.push_back({a, b, len});
    if (r["oneway"] == "0") arcs.push_back({b, a, len});
  }
  auto snap = [&](forage::LatLon p) -> std::optional<std::pair<std::size_t, double>> {
    std::optional<std::pair<std::size_t, double>> best;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = forage::haversine(p, nodes[i].second);
      if (d <= in.max_snap_m && (!best || d < best->second)) best = {{i, d}};
    }
    return best;
  };
  std::vector<std::optional<std::pair<std::size_t, double>>> outlet_snap;
  for (const auto& o : outlets) outlet_snap.push_back(snap(o.pos));

  struct Visit {
    std::string outlet, hb;
  };
  std::map<std::string, std::vector<Visit>> by_device;
  for (auto& r : read_rows(in.visits_csv)) by_device[r["device_id"]].push_back({r["outlet_id"], r["home_based"]});

  const std::vector<std::string> codes = {"LG", "BB", "SH", "PF", "ALL"};
  std::string out =
      "device_id,category,n_visits,n_unique_stores,mean_visited_euclid_m,mean_visited_network_m,"
      "min_visited_euclid_m,nearest_store_euclid_m,nearest_store_network_m,n_known_origin,n_home_based,"
      "home_based_share\n";
  std::map<std::string, forage::LatLon> homes;
  for (auto& r : read_rows(in.homes_csv)) homes[r["device_id"]] = {std::stod(r["lat"]), std::stod(r["lon"])};

  for (const auto& [device, home] : homes) {
    const auto hs = snap(home);
    std::vector<double> net(outlets.size(), forage::kUnreachable);
    if (hs) {
      const auto dist = bellman_ford(nodes.size(), arcs, hs->first);
      for (std::size_t i = 0; i < outlets.size(); ++i) {
        if (outlet_snap[i] && std::isfinite(dist[outlet_snap[i]->first])) {
          net[i] = (dist[outlet_snap[i]->first] + hs->second) + outlet_snap[i]->second;
        }
      }
    }
    for (const auto& code : codes) {
      auto in_slot = [&](const std::string& c) { return code == "ALL" || c == code; };
      bool present = false;
      for (const auto& o : outlets) present = present || in_slot(o.code);
      if (!present) continue;
      std::size_t n_visits = 0, n_known = 0, n_yes = 0;
      std::set<std::size_t> stores;  // outlet positions, i.e. outlet_id order
      for (const auto& v : by_device[device]) {
        std::size_t idx = 0;
        while (outlets[idx].id != v.outlet) ++idx;
        if (!in_slot(outlets[idx].code)) continue;
        ++n_visits;
        stores.insert(idx);
        if (v.hb != "unknown") {
          ++n_known;
          if (v.hb == "yes") ++n_yes;
        }
      }
      std::optional<double> mean_e, mean_n, min_e, near_e, near_n, share;
      double se = 0.0, sn = 0.0;
      std::size_t cn = 0;
      for (auto idx : stores) {
        const double e = forage::haversine(home, outlets[idx].pos);
        se += e;
        if (!min_e || e < *min_e) min_e = e;
        if (std::isfinite(net[idx])) {
          sn += net[idx];
          ++cn;
        }
      }
      if (!stores.empty()) mean_e = se / static_cast<double>(stores.size());
      if (cn > 0) mean_n = sn / static_cast<double>(cn);
      for (std::size_t i = 0; i < outlets.size(); ++i) {
        if (!in_slot(outlets[i].code)) continue;
        const double e = forage::haversine(home, outlets[i].pos);
        if (!near_e || e < *near_e) near_e = e;
        if (std::isfinite(net[i]) && (!near_n || net[i] < *near_n)) near_n = net[i];
      }
      if (n_known > 0) share = static_cast<double>(n_yes) / static_cast<double>(n_known);
      out += device + ',' + code + ',' + std::to_string(n_visits) + ',' + std::to_string(stores.size()) + ',' +
             fmt_opt(mean_e, 3) + ',' + fmt_opt(mean_n, 3) + ',' + fmt_opt(min_e, 3) + ',' + fmt_opt(near_e, 3) +
             ',' + fmt_opt(near_n, 3) + ',' + std::to_string(n_known) + ',' + std::to_string(n_yes) + ',' +
             fmt_opt(share, 6) + '\n';
    }
  }
  return out;
}

}  // namespace oracle
