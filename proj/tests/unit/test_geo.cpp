#include <doctest.h>

#include <numbers>
#include <random>

#include "../fixtures.hpp"
#include "forage/geo.hpp"

using namespace forage;

TEST_SUITE("geo") {
  TEST_CASE("haversine closed-form cases") {
    CHECK(std::abs(haversine({0, 0}, {0, 1}) - 111194.9) <= 0.1);
    CHECK(std::abs(haversine({0, 0}, {0, 180}) - std::numbers::pi * kEarthRadiusM) <= 1.0);
    CHECK(std::abs(haversine({90, 0}, {-90, 0}) - std::numbers::pi * kEarthRadiusM) <= 1.0);
    CHECK(haversine({30.3, -81.6}, {30.3, -81.6}) == 0.0);
    CHECK(haversine({10, 20}, {11, 21}) == haversine({11, 21}, {10, 20}));
  }

  TEST_CASE("local frame round trip") {
    LocalFrame f(fixture::kOrigin);
    auto p = f.unproject({1234.5, -678.9});
    auto xy = f.project(p);
    CHECK(xy.x == doctest::Approx(1234.5));
    CHECK(xy.y == doctest::Approx(-678.9));
    // The frame uses 111,320 m per degree; the sphere gives 111,194.9.
    CHECK(haversine(fixture::kOrigin, fixture::offset(fixture::kOrigin, 1000, 0)) == doctest::Approx(998.88).epsilon(1e-4));
  }

  TEST_CASE("cell index radius queries match a linear scan") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3000, 3000);
    std::vector<LatLon> pts;
    for (int i = 0; i < 400; ++i) pts.push_back(fixture::offset(fixture::kOrigin, u(rng), u(rng)));
    CellIndex idx(pts, 250.0, 800.0);
    for (int q = 0; q < 200; ++q) {
      const LatLon p = fixture::offset(fixture::kOrigin, u(rng), u(rng));
      const double r = std::uniform_real_distribution<double>(0, 800)(rng);
      std::vector<std::uint32_t> expect;
      for (std::uint32_t i = 0; i < pts.size(); ++i) {
        if (haversine(p, pts[i]) <= r) expect.push_back(i);
      }
      CHECK(idx.query_within(p, r) == expect);
      auto near = idx.nearest(p);
      REQUIRE(near);
      double best = 1e300;
      for (const auto& x : pts) best = std::min(best, haversine(p, x));
      CHECK(near->distance_m == best);
    }
    CHECK_THROWS_AS(idx.query_within(fixture::kOrigin, 801.0), std::invalid_argument);
  }

  TEST_CASE("nearest breaks exact ties by smallest id") {
    const LatLon a = fixture::offset(fixture::kOrigin, 100, 0);
    std::vector<LatLon> pts = {fixture::kOrigin, a, a};
    CellIndex idx(pts);
    auto hit = idx.nearest(fixture::offset(fixture::kOrigin, 110, 0));
    REQUIRE(hit);
    CHECK(hit->id == 1);
    CHECK_FALSE(CellIndex(std::span<const LatLon>{}).nearest(a));
  }

  TEST_CASE("nearest finds far points beyond the query radius") {
    std::vector<LatLon> pts = {fixture::offset(fixture::kOrigin, 20000, 20000)};
    CellIndex idx(pts, 250.0, 500.0);
    auto hit = idx.nearest(fixture::kOrigin);
    REQUIRE(hit);
    CHECK(hit->distance_m == haversine(fixture::kOrigin, pts[0]));
  }

  TEST_CASE("grid cells are stable") {
    LocalFrame f({30.0, -82.0});
    CHECK(to_cell({30.0, -82.0}, f, 20.0) == GridCell{0, 0});
    const auto c = to_cell(f.unproject({45.0, -5.0}), f, 20.0);
    CHECK(c.ix == 2);
    CHECK(c.iy == -1);
  }

  TEST_CASE("tract lookup with holes and shared boundaries") {
    auto sq = [](double x0, double y0, double x1, double y1) {
      return std::vector<LatLon>{{y0, x0}, {y0, x1}, {y1, x1}, {y1, x0}, {y0, x0}};
    };
    Tract a{"B", 100.0, {sq(0, 0, 1, 1), sq(0.4, 0.4, 0.6, 0.6)}, {}, {}};
    Tract b{"A", std::nullopt, {sq(1, 0, 2, 1)}, {}, {}};
    Tract hole{"C", 5.0, {sq(0.4, 0.4, 0.6, 0.6)}, {}, {}};
    TractSet set({a, b, hole});
    CHECK(point_in_tract({0.2, 0.2}, set) == "B");
    CHECK(point_in_tract({0.5, 1.5}, set) == "A");
    CHECK(point_in_tract({0.5, 0.5}, set) == "C");
    // On the shared edge x = 1 both A and B touch: smallest id wins.
    CHECK(point_in_tract({0.5, 1.0}, set) == "A");
    CHECK_FALSE(point_in_tract({5, 5}, set));
    CHECK(set.tracts().front().id == "A");
  }
}
