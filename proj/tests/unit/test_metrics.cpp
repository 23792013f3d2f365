#include <doctest.h>

#include <cmath>

#include "../fixtures.hpp"
#include "../oracles.hpp"
#include "forage/ingest.hpp"
#include "forage/io.hpp"
#include "forage/metrics.hpp"
#include "forage/synth.hpp"

using namespace forage;

namespace {

const LatLon H = fixture::kOrigin;

struct Scene {
  OutletCatalog catalog;
  RoadGraph graph;
  HomeMap homes;
};

// Road along the x axis every 500 m; outlets just off the road.
Scene scene() {
  std::vector<RoadNode> nodes;
  std::vector<RoadEdge> edges;
  for (int i = 0; i <= 10; ++i) {
    nodes.push_back({i, fixture::offset(H, 500.0 * i, 0)});
    if (i > 0) edges.push_back({i - 1, i, 500.0, false});
  }
  Scene s{OutletCatalog({fixture::outlet("lg1", fixture::offset(H, 1000, 20), Category::LargeGrocery),
                         fixture::outlet("lg2", fixture::offset(H, 3000, 20), Category::LargeGrocery),
                         fixture::outlet("bb1", fixture::offset(H, 2000, 20), Category::BigBox, false),
                         fixture::outlet("pf1", fixture::offset(H, 500, -10), Category::ProcessedFood)}),
          RoadGraph(nodes, edges),
          {}};
  HomeLocation h;
  h.device_id = "d1";
  h.centroid = fixture::offset(H, 0, 30);
  s.homes.emplace("d1", h);
  h.device_id = "d2";
  h.centroid = fixture::offset(H, 5000, 0);
  s.homes.emplace("d2", h);
  return s;
}

FoodVisit visit(const std::string& device, const std::string& outlet, const OutletCatalog& cat, HomeBased hb,
                std::int64_t ts) {
  FoodVisit v;
  v.device_id = device;
  v.outlet_id = outlet;
  v.stay_id = device + ":" + std::to_string(ts);
  v.visit_id = "v:" + v.stay_id;
  v.start_ts = ts;
  v.end_ts = ts + 600;
  const auto& o = cat[*cat.find(outlet)];
  v.category = o.category;
  v.primary_food = o.primary_food;
  v.home_based = hb;
  return v;
}

const MetricsRecord& rec(const MetricsResult& r, const std::string& d, Category c) {
  for (const auto& x : r.records) {
    if (x.device_id == d && x.category == c) return x;
  }
  throw std::runtime_error("record not found");
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("home based flag uses the origin stay and the 200 m radius") {
    std::vector<StayPoint> stays = {fixture::stay("d1", 0, 600, fixture::offset(H, 0, 150)),
                                    fixture::stay("d1", 1000, 1600, fixture::offset(H, 1000, 0)),
                                    fixture::stay("d1", 2000, 2600, fixture::offset(H, 0, 250)),
                                    fixture::stay("d1", 3000, 3600, fixture::offset(H, 1000, 0))};
    stays[1].origin = stays[0].stay_id;
    stays[3].origin = stays[2].stay_id;
    StayIndex idx(stays);
    HomeLocation home;
    home.centroid = fixture::offset(H, 0, -50);  // 200 m from stays[0], 300 m from stays[2]
    FoodVisit v;
    v.stay_id = stays[1].stay_id;
    CHECK(home_based_flag(v, idx, &home) == HomeBased::Yes);
    v.stay_id = stays[3].stay_id;
    CHECK(home_based_flag(v, idx, &home) == HomeBased::No);
    v.stay_id = stays[0].stay_id;
    CHECK(home_based_flag(v, idx, &home) == HomeBased::UnknownOrigin);
    v.stay_id = stays[1].stay_id;
    CHECK(home_based_flag(v, idx, nullptr) == HomeBased::UnknownOrigin);
  }

  TEST_CASE("per category metrics on a hand-built scene") {
    auto s = scene();
    std::vector<FoodVisit> visits = {visit("d1", "lg1", s.catalog, HomeBased::Yes, 0),
                                     visit("d1", "lg1", s.catalog, HomeBased::No, 1000),
                                     visit("d1", "lg2", s.catalog, HomeBased::UnknownOrigin, 2000),
                                     visit("d1", "bb1", s.catalog, HomeBased::Yes, 3000),
                                     visit("ghost", "bb1", s.catalog, HomeBased::Yes, 4000)};
    auto r = compute_metrics(visits, s.homes, s.catalog, s.graph, MetricsScope::All);
    // Two homes, three stocked categories plus All each; the ghost device
    // has no home.
    CHECK(r.records.size() == 8);
    const auto& lg = rec(r, "d1", Category::LargeGrocery);
    CHECK(lg.n_visits == 3);
    CHECK(lg.n_unique_stores == 2);
    const LatLon home = s.homes.at("d1").centroid;
    const double e1 = haversine(home, s.catalog[*s.catalog.find("lg1")].pos);
    const double e2 = haversine(home, s.catalog[*s.catalog.find("lg2")].pos);
    CHECK(*lg.mean_visited_euclid_m == (e1 + e2) / 2.0);
    CHECK(*lg.min_visited_euclid_m == e1);
    CHECK(*lg.nearest_store_euclid_m == e1);
    // Network: 1000 m or 3000 m of road plus a 30 m and a 20 m leg.
    CHECK(*lg.mean_visited_network_m == doctest::Approx(2050.0).epsilon(1e-3));
    CHECK(lg.n_known_origin == 2);
    CHECK(lg.n_home_based == 1);
    CHECK(*lg.home_based_share == 0.5);
    const auto& pf = rec(r, "d1", Category::ProcessedFood);
    CHECK(pf.n_visits == 0);
    CHECK_FALSE(pf.mean_visited_euclid_m);
    CHECK_FALSE(pf.home_based_share);
    CHECK(pf.nearest_store_euclid_m);
    const auto& all = rec(r, "d1", Category::All);
    CHECK(all.n_visits == 4);
    CHECK(all.n_unique_stores == 3);
    CHECK(r.diagnostics.n_pairs == 3);
    CHECK(r.diagnostics.n_unreachable == 0);
  }

  TEST_CASE("categories without catalog outlets get no rows") {
    auto s = scene();
    auto r = compute_metrics({}, s.homes, s.catalog, s.graph, MetricsScope::All);
    for (const auto& x : r.records) CHECK(x.category != Category::SmallHealthy);
  }

  TEST_CASE("primary only scope drops big box rows and visits") {
    auto s = scene();
    std::vector<FoodVisit> visits = {visit("d1", "bb1", s.catalog, HomeBased::Yes, 0),
                                     visit("d1", "lg1", s.catalog, HomeBased::Yes, 1000)};
    auto r = compute_metrics(visits, s.homes, s.catalog, s.graph, MetricsScope::PrimaryOnly);
    for (const auto& x : r.records) CHECK(x.category != Category::BigBox);
    CHECK(rec(r, "d1", Category::All).n_visits == 1);
    auto sum = summarize_population(r.records, MetricsScope::PrimaryOnly);
    CHECK_FALSE(sum.find(Category::BigBox));
    CHECK(sum.find(Category::LargeGrocery));
  }

  TEST_CASE("visit weighting counts repeat visits") {
    auto s = scene();
    std::vector<FoodVisit> visits = {visit("d1", "lg1", s.catalog, HomeBased::Yes, 0),
                                     visit("d1", "lg1", s.catalog, HomeBased::Yes, 1000),
                                     visit("d1", "lg2", s.catalog, HomeBased::Yes, 2000)};
    MetricsParams p;
    p.weighting = VisitedWeighting::Visit;
    auto r = compute_metrics(visits, s.homes, s.catalog, s.graph, MetricsScope::All, p);
    const LatLon home = s.homes.at("d1").centroid;
    const double e1 = haversine(home, s.catalog[*s.catalog.find("lg1")].pos);
    const double e2 = haversine(home, s.catalog[*s.catalog.find("lg2")].pos);
    CHECK(*rec(r, "d1", Category::LargeGrocery).mean_visited_euclid_m == ((e1 + e1) + e2) / 3.0);
  }

  TEST_CASE("unsnappable homes leave network fields undefined") {
    auto s = scene();
    HomeLocation far;
    far.device_id = "far";
    far.centroid = fixture::offset(H, 0, 5000);
    s.homes.emplace("far", far);
    std::vector<FoodVisit> visits = {visit("far", "lg1", s.catalog, HomeBased::No, 0)};
    auto r = compute_metrics(visits, s.homes, s.catalog, s.graph, MetricsScope::All);
    const auto& a = rec(r, "far", Category::All);
    CHECK_FALSE(a.mean_visited_network_m);
    CHECK_FALSE(a.nearest_store_network_m);
    CHECK(a.mean_visited_euclid_m);
    CHECK(r.diagnostics.n_unsnappable == 1);
  }

  TEST_CASE("visits to outlets outside the catalog are an input error") {
    auto s = scene();
    FoodVisit v = visit("d1", "lg1", s.catalog, HomeBased::No, 0);
    v.outlet_id = "missing";
    CHECK_THROWS_AS(compute_metrics(std::vector{v}, s.homes, s.catalog, s.graph, MetricsScope::All), InputError);
  }

  TEST_CASE("summary means skip undefined values and report counts") {
    std::vector<MetricsRecord> recs(3);
    for (auto& r : recs) r.category = Category::All;
    recs[0].n_visits = 4;
    recs[0].home_based_share = 0.5;
    recs[1].n_visits = 2;
    recs[2].n_visits = 0;
    recs[1].home_based_share = 0.25;
    auto s = summarize_population(recs);
    const auto* all = s.find(Category::All);
    REQUIRE(all);
    CHECK(all->n_devices == 3);
    CHECK(*all->n_visits.mean == 2.0);
    CHECK(all->home_based_share.count == 2);
    CHECK(*all->home_based_share.mean == 0.375);
    CHECK_FALSE(all->mean_visited_euclid_m.mean);
    CHECK(all->total_visits == 6);
  }

  TEST_CASE("flat file recomputation matches on a synthetic world") {
    SynthParams sp;
    sp.n_devices = 25;
    sp.n_days = 5;
    sp.seed = 3;
    auto world = generate_world(sp);
    auto tracks = tracks_from_pings(world);
    StudyConfig study;
    auto stays = detect_all_stays(tracks, StayParams{}, 1);
    auto food = filter_food_candidates(stays, 120.0);
    const std::string nodes = io::nodes_csv(world.nodes), edges = io::edges_csv(world.edges);
    const std::string outlets = io::outlets_csv(world.outlets);
    OutletCatalog catalog = load_outlets(outlets);
    RoadGraph graph = load_road_graph(nodes, edges);
    auto homes = infer_all_homes(tracks, study, HomeParams{}, 1).homes;
    // Go through the files so both sides see the same rounded inputs.
    homes = io::parse_homes(io::homes_csv(homes));
    auto visits = attribute_visits(food, catalog, build_outlet_index(catalog), std::nullopt);
    StayIndex idx(stays);
    assign_home_based(visits, idx, homes);
    const std::string visits_csv = io::visits_csv(visits);
    auto serial = compute_metrics(io::parse_visits(visits_csv), homes, catalog, graph, MetricsScope::All, {}, 1);
    auto par = compute_metrics(io::parse_visits(visits_csv), homes, catalog, graph, MetricsScope::All, {}, 4);
    const std::string got = io::metrics_csv(serial.records);
    CHECK(got == io::metrics_csv(par.records));
    oracle::FlatInputs in{visits_csv, io::homes_csv(homes), outlets, nodes, edges};
    CHECK(got == oracle::recompute_metrics_csv(in));
  }
}
