#include "forage/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "forage/parallel.hpp"

namespace forage {

std::string_view scope_name(MetricsScope s) { return s == MetricsScope::All ? "all" : "primary_only"; }

std::string_view weighting_name(VisitedWeighting w) { return w == VisitedWeighting::Store ? "store" : "visit"; }

StayIndex::StayIndex(std::span<const StayPoint> stays) {
  by_id_.reserve(stays.size());
  for (const auto& s : stays) by_id_.emplace(s.stay_id, &s);
}

const StayPoint* StayIndex::find(std::string_view stay_id) const {
  auto it = by_id_.find(stay_id);
  return it == by_id_.end() ? nullptr : it->second;
}

HomeBased home_based_flag(const FoodVisit& visit, const StayIndex& stays, const HomeLocation* home, double radius_m) {
  const StayPoint* stay = stays.find(visit.stay_id);
  if (!stay || !stay->origin || !home) return HomeBased::UnknownOrigin;
  const StayPoint* origin = stays.find(*stay->origin);
  if (!origin) return HomeBased::UnknownOrigin;
  return haversine(origin->centroid, home->centroid) <= radius_m ? HomeBased::Yes : HomeBased::No;
}

void assign_home_based(std::span<FoodVisit> visits, const StayIndex& stays, const HomeMap& homes, double radius_m) {
  for (auto& v : visits) {
    auto it = homes.find(v.device_id);
    v.home_based = home_based_flag(v, stays, it == homes.end() ? nullptr : &it->second, radius_m);
  }
}

namespace {

constexpr std::size_t kSlots = 5;  // four outlet categories + All

struct OutletSnap {
  std::optional<Snap> snap;
  std::uint32_t target_slot = 0;  // position in the Dijkstra target list
};

struct Accumulator {
  std::uint32_t n_visits = 0;
  std::uint32_t n_known = 0;
  std::uint32_t n_yes = 0;
  std::vector<std::uint32_t> stores;  // catalog indices, one entry per visit
};

std::optional<double> mean_of(std::span<const double> v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

MetricsResult compute_metrics(std::span<const FoodVisit> visits, const HomeMap& homes, const OutletCatalog& full_catalog,
                              const RoadGraph& graph, MetricsScope scope, const MetricsParams& params, int workers) {
  const bool primary_only = scope == MetricsScope::PrimaryOnly;
  const OutletCatalog catalog = full_catalog.filtered(primary_only);

  // Which columns exist in this scope, and a nearest-neighbour index for each.
  std::array<bool, kSlots> present{};
  std::array<std::vector<std::uint32_t>, kSlots> members;  // catalog indices per slot
  for (std::uint32_t i = 0; i < catalog.size(); ++i) {
    members[category_index(catalog[i].category)].push_back(i);
    members[category_index(Category::All)].push_back(i);
  }
  std::array<CellIndex, kSlots> nearest_index;
  for (std::size_t s = 0; s < kSlots; ++s) {
    present[s] = !members[s].empty();
    std::vector<LatLon> pts;
    pts.reserve(members[s].size());
    for (auto idx : members[s]) pts.push_back(catalog[idx].pos);
    nearest_index[s] = CellIndex(pts, 500.0, 1000.0);
  }

  // Snap every in-scope outlet once; Dijkstra targets are the distinct nodes.
  std::vector<OutletSnap> outlet_snaps(catalog.size());
  parallel_for(catalog.size(), workers, [&](std::size_t i) {
    outlet_snaps[i].snap = snap(catalog[i].pos, graph, params.routing.max_snap_m);
  });
  std::vector<std::uint32_t> targets;
  for (const auto& os : outlet_snaps) {
    if (os.snap) targets.push_back(os.snap->node);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  for (auto& os : outlet_snaps) {
    if (os.snap) {
      os.target_slot = static_cast<std::uint32_t>(
          std::lower_bound(targets.begin(), targets.end(), os.snap->node) - targets.begin());
    }
  }

  // In-scope visits grouped by device.
  absl::flat_hash_map<std::string_view, std::vector<std::uint32_t>> by_device;
  for (std::uint32_t i = 0; i < visits.size(); ++i) {
    const auto& v = visits[i];
    if (primary_only && !v.primary_food) continue;
    if (!catalog.find(v.outlet_id)) {
      throw InputError("visit " + v.visit_id + " references outlet '" + v.outlet_id + "' not in the in-scope catalog");
    }
    by_device[v.device_id].push_back(i);
  }

  std::vector<const HomeLocation*> home_list;
  home_list.reserve(homes.size());
  for (const auto& [id, h] : homes) home_list.push_back(&h);

  std::vector<std::vector<MetricsRecord>> per_home(home_list.size());
  std::vector<RoutingDiagnostics> diags(home_list.size());

  parallel_for(home_list.size(), workers, [&](std::size_t hi) {
    const HomeLocation& home = *home_list[hi];
    thread_local DijkstraWorkspace ws;
    thread_local std::vector<double> node_dist;

    // Network distance from this home to every in-scope outlet.
    const auto home_snap = snap(home.centroid, graph, params.routing.max_snap_m);
    if (home_snap && !targets.empty()) {
      ws.run(graph, home_snap->node, targets, node_dist);
    } else {
      node_dist.assign(targets.size(), kUnreachable);
    }
    auto outlet_network = [&](std::uint32_t idx) -> std::optional<double> {
      const auto& os = outlet_snaps[idx];
      if (!home_snap || !os.snap) return std::nullopt;
      const double path = node_dist[os.target_slot];
      if (!std::isfinite(path)) return std::nullopt;
      return (path + home_snap->leg_m) + os.snap->leg_m;
    };

    std::array<Accumulator, kSlots> acc;
    if (auto it = by_device.find(home.device_id); it != by_device.end()) {
      for (auto vi : it->second) {
        const auto& v = visits[vi];
        const auto idx = static_cast<std::uint32_t>(*catalog.find(v.outlet_id));
        for (auto slot : {category_index(catalog[idx].category), category_index(Category::All)}) {
          auto& a = acc[slot];
          ++a.n_visits;
          a.stores.push_back(idx);
          if (v.home_based != HomeBased::UnknownOrigin) {
            ++a.n_known;
            if (v.home_based == HomeBased::Yes) ++a.n_yes;
          }
        }
      }
    }

    RoutingDiagnostics& diag = diags[hi];
    auto& out = per_home[hi];
    for (std::size_t slot = 0; slot < kSlots; ++slot) {
      if (!present[slot]) continue;
      auto& a = acc[slot];
      MetricsRecord r;
      r.device_id = home.device_id;
      r.category = static_cast<Category>(slot);
      r.n_visits = a.n_visits;

      std::vector<std::uint32_t> distinct = a.stores;
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      r.n_unique_stores = static_cast<std::uint32_t>(distinct.size());

      // Per distinct store distances, in outlet_id order.
      std::vector<double> euclid(distinct.size());
      std::vector<std::optional<double>> network(distinct.size());
      for (std::size_t k = 0; k < distinct.size(); ++k) {
        euclid[k] = haversine(home.centroid, catalog[distinct[k]].pos);
        network[k] = outlet_network(distinct[k]);
        if (slot == category_index(Category::All)) {
          ++diag.n_pairs;
          if (!home_snap || !outlet_snaps[distinct[k]].snap) {
            ++diag.n_unsnappable;
          } else if (!network[k]) {
            ++diag.n_unreachable;
          }
        }
      }
      std::vector<double> e_vals, n_vals;
      if (params.weighting == VisitedWeighting::Store) {
        e_vals = euclid;
        for (const auto& n : network) {
          if (n) n_vals.push_back(*n);
        }
      } else {
        std::vector<std::uint32_t> per_visit = a.stores;
        std::sort(per_visit.begin(), per_visit.end());
        for (auto idx : per_visit) {
          const auto k = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), idx) - distinct.begin());
          e_vals.push_back(euclid[k]);
          if (network[k]) n_vals.push_back(*network[k]);
        }
      }
      r.mean_visited_euclid_m = mean_of(e_vals);
      r.mean_visited_network_m = mean_of(n_vals);
      if (!euclid.empty()) r.min_visited_euclid_m = *std::min_element(euclid.begin(), euclid.end());

      if (auto hit = nearest_index[slot].nearest(home.centroid)) r.nearest_store_euclid_m = hit->distance_m;
      std::optional<double> best_net;
      for (auto idx : members[slot]) {
        if (auto d = outlet_network(idx); d && (!best_net || *d < *best_net)) best_net = d;
      }
      r.nearest_store_network_m = best_net;

      r.n_known_origin = a.n_known;
      r.n_home_based = a.n_yes;
      if (a.n_known > 0) r.home_based_share = static_cast<double>(a.n_yes) / static_cast<double>(a.n_known);
      out.push_back(std::move(r));
    }
  });

  MetricsResult result;
  for (auto& recs : per_home) {
    std::move(recs.begin(), recs.end(), std::back_inserter(result.records));
  }
  for (const auto& d : diags) result.diagnostics += d;
  return result;
}

const CategorySummary* PopulationSummary::find(Category c) const {
  for (const auto& s : categories) {
    if (s.category == c) return &s;
  }
  return nullptr;
}

PopulationSummary summarize_population(std::span<const MetricsRecord> records, MetricsScope scope,
                                       VisitedWeighting weighting) {
  struct Sum {
    double total = 0.0;
    std::uint64_t count = 0;
    void add(std::optional<double> v) {
      if (v) {
        total += *v;
        ++count;
      }
    }
    FieldMean mean() const {
      FieldMean m;
      m.count = count;
      if (count > 0) m.mean = total / static_cast<double>(count);
      return m;
    }
  };
  struct Cat {
    bool seen = false;
    std::uint64_t n = 0, visits = 0;
    Sum n_visits, n_unique, ve, vn, ne, nn, share;
  };
  std::array<Cat, kSlots> cats;
  for (const auto& r : records) {
    auto& c = cats[category_index(r.category)];
    c.seen = true;
    ++c.n;
    c.visits += r.n_visits;
    c.n_visits.add(static_cast<double>(r.n_visits));
    c.n_unique.add(static_cast<double>(r.n_unique_stores));
    c.ve.add(r.mean_visited_euclid_m);
    c.vn.add(r.mean_visited_network_m);
    c.ne.add(r.nearest_store_euclid_m);
    c.nn.add(r.nearest_store_network_m);
    c.share.add(r.home_based_share);
  }
  PopulationSummary s;
  s.scope = scope;
  s.weighting = weighting;
  for (auto cat : kReportCategories) {
    const auto& c = cats[category_index(cat)];
    if (!c.seen) continue;
    CategorySummary cs;
    cs.category = cat;
    cs.n_devices = c.n;
    cs.total_visits = c.visits;
    cs.n_visits = c.n_visits.mean();
    cs.n_unique_stores = c.n_unique.mean();
    cs.mean_visited_euclid_m = c.ve.mean();
    cs.mean_visited_network_m = c.vn.mean();
    cs.nearest_store_euclid_m = c.ne.mean();
    cs.nearest_store_network_m = c.nn.mean();
    cs.home_based_share = c.share.mean();
    s.categories.push_back(cs);
  }
  return s;
}

}  // namespace forage
