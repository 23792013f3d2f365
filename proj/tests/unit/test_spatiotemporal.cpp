#include <doctest.h>

#include <numeric>
#include <random>

#include "../fixtures.hpp"
#include "forage/spatiotemporal.hpp"

using namespace forage;

namespace {

FoodVisit at(std::int64_t ts, Category c) {
  FoodVisit v;
  v.start_ts = ts;
  v.end_ts = ts + 600;
  v.category = c;
  return v;
}

std::uint64_t sum(const auto& xs) { return std::accumulate(xs.begin(), xs.end(), std::uint64_t{0}); }

}  // namespace

TEST_SUITE("spatiotemporal") {
  TEST_CASE("visits bin by local hour, weekday and day") {
    LocalClock ny("America/New_York");
    const std::int64_t start = ny.to_utc(2022, 9, 1, 0, 0, 0);
    const std::int64_t end = ny.to_utc(2022, 9, 8, 0, 0, 0);
    std::vector<FoodVisit> v = {at(ny.to_utc(2022, 9, 1, 17, 30, 0), Category::LargeGrocery),  // Thursday
                                at(ny.to_utc(2022, 9, 3, 10, 0, 0), Category::LargeGrocery),   // Saturday
                                at(ny.to_utc(2022, 9, 3, 10, 59, 0), Category::ProcessedFood),
                                at(ny.to_utc(2022, 9, 10, 9, 0, 0), Category::BigBox)};  // past the window
    auto p = temporal_profile(v, ny, start, end);
    const auto& lg = p.of(Category::LargeGrocery);
    CHECK(lg.total == 2);
    CHECK(lg.hour_weekday[17] == 1);
    CHECK(lg.hour_weekend[10] == 1);
    CHECK(lg.day_of_week[3] == 1);
    CHECK(lg.day_of_week[5] == 1);
    CHECK(format_day(p.first_day) == "2022-09-01");
    // The window has 7 days; the late visit widens the series to 10.
    CHECK(lg.daily.size() == 10);
    CHECK(lg.daily[0] == 1);
    CHECK(lg.daily[2] == 1);
    const auto& all = p.of(Category::All);
    CHECK(all.total == 4);
    CHECK(all.hour_weekend[10] == 2);
    for (const auto& c : p.categories) {
      CHECK(sum(c.hour_weekday) + sum(c.hour_weekend) == c.total);
      CHECK(sum(c.day_of_week) == c.total);
      CHECK(sum(c.daily) == c.total);
    }
  }

  TEST_CASE("histogram bins are left closed and conserve totals") {
    std::vector<double> v = {0.0, 499.999, 500.0, 1200.0, 1999.0, 2000.0, 50000.0};
    auto h = distance_histogram(v, 500.0, 2000.0);
    REQUIRE(h.counts.size() == 4);
    CHECK(h.counts[0] == 2);
    CHECK(h.counts[1] == 1);
    CHECK(h.counts[2] == 1);
    CHECK(h.counts[3] == 1);
    CHECK(h.overflow == 2);
    CHECK(h.total == 7);
    CHECK(h.density(0) == doctest::Approx(2.0 / (7 * 500.0)));
    CHECK(h.bin_hi(3) == 2000.0);

    auto odd = distance_histogram(std::vector{1.0, 2.5}, 2.0, 3.0);
    REQUIRE(odd.counts.size() == 2);
    CHECK(odd.bin_hi(1) == 3.0);
    CHECK(odd.counts[1] == 1);

    CHECK_THROWS_AS(distance_histogram(std::vector{-1.0}, 1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(distance_histogram(v, 0.0, 10.0), std::invalid_argument);
    CHECK(distance_histogram({}, 1.0, 10.0).density(0) == 0.0);
  }

  TEST_CASE("random histograms conserve totals") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> v(std::uniform_int_distribution<int>(0, 500)(rng));
      for (auto& x : v) x = std::exponential_distribution<double>(1.0 / 3000.0)(rng);
      auto h = distance_histogram(v, 250.0 + k, 15000.0);
      CHECK(sum(h.counts) + h.overflow == v.size());
      CHECK(h.total == v.size());
    }
  }

  TEST_CASE("density grid and diagonal mass") {
    std::vector<std::pair<double, double>> pairs = {{100, 900}, {900, 100}, {600, 700}, {5000, 1}, {1, 5000}};
    auto g = density_grid(pairs, 500.0, 2000.0);
    CHECK(g.n == 4);
    CHECK(g.at(0, 1) == 1);
    CHECK(g.at(1, 0) == 1);
    CHECK(g.at(1, 1) == 1);
    CHECK(g.overflow == 2);
    CHECK(g.total == 5);
    CHECK(g.mass_below_diagonal() == 1);
    CHECK(sum(g.counts) + g.overflow == g.total);
  }

  TEST_CASE("tract aggregates average member devices") {
    auto sq = [](double x0, double y0, double x1, double y1) {
      return std::vector<LatLon>{{y0, x0}, {y0, x1}, {y1, x1}, {y1, x0}, {y0, x0}};
    };
    TractSet tracts({Tract{"t1", 100.0, {sq(0, 0, 1, 1)}, {}, {}}, Tract{"t2", std::nullopt, {sq(1, 0, 2, 1)}, {}, {}}});
    HomeMap homes;
    auto add = [&](std::string id, LatLon p) {
      HomeLocation h;
      h.device_id = id;
      h.centroid = p;
      homes.emplace(id, h);
    };
    add("a", {0.5, 0.5});
    add("b", {0.2, 0.2});
    add("c", {0.5, 1.5});
    add("z", {5, 5});
    std::vector<MetricsRecord> recs;
    for (auto [id, near, vis] : {std::tuple{"a", 100.0, 300.0}, {"b", 200.0, 700.0}, {"c", 50.0, 60.0}}) {
      MetricsRecord r;
      r.device_id = id;
      r.category = Category::All;
      r.nearest_store_euclid_m = near;
      r.mean_visited_euclid_m = vis;
      recs.push_back(r);
    }
    recs[1].mean_visited_euclid_m.reset();
    auto agg = tract_aggregates(recs, homes, tracts);
    CHECK(agg.total_homes == 4);
    CHECK(agg.homes_outside == 1);
    REQUIRE(agg.rows.size() == 2);
    const auto& t1 = agg.rows[0];
    CHECK(t1.tract_id == "t1");
    CHECK(t1.n_sampled_homes == 2);
    CHECK(*t1.sampling_rate == 0.02);
    CHECK(*t1.mean_nearest_euclid_m == 150.0);
    CHECK(*t1.mean_visited_euclid_m == 300.0);
    CHECK(*t1.diff_euclid_m == 150.0);
    CHECK_FALSE(t1.mean_nearest_network_m);
    CHECK_FALSE(agg.rows[1].sampling_rate);
    CHECK(*agg.rows[1].diff_euclid_m == 10.0);
  }
}
