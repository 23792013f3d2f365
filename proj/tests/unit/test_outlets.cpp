#include <doctest.h>

#include <random>

#include "../fixtures.hpp"
#include "../oracles.hpp"
#include "forage/outlets.hpp"

using namespace forage;

TEST_SUITE("outlets") {
  TEST_CASE("default radii per category") {
    CHECK(category_default_radius(Category::LargeGrocery) == 150.0);
    CHECK(category_default_radius(Category::BigBox) == 200.0);
    CHECK(category_default_radius(Category::SmallHealthy) == 50.0);
    CHECK(category_default_radius(Category::ProcessedFood) == 50.0);
  }

  TEST_CASE("catalog orders by id and rejects duplicates") {
    OutletCatalog c({fixture::outlet("b", fixture::kOrigin, Category::BigBox, false),
                     fixture::outlet("a", fixture::kOrigin, Category::SmallHealthy)});
    CHECK(c[0].outlet_id == "a");
    CHECK(c.find("b") == 1);
    CHECK_FALSE(c.find("z"));
    CHECK(c.max_radius_m() == 200.0);
    CHECK(c.filtered(true).size() == 1);
    CHECK(c.of_category(Category::BigBox).size() == 1);
    CHECK_THROWS_AS(OutletCatalog({fixture::outlet("a", fixture::kOrigin, Category::BigBox),
                                   fixture::outlet("a", fixture::kOrigin, Category::BigBox)}),
                    InputError);
  }

  TEST_CASE("nearest in-radius outlet wins, radius is closed") {
    const LatLon s = fixture::kOrigin;
    const LatLon lg = fixture::offset(s, 120, 0);
    const LatLon sh = fixture::offset(s, 0, 60);
    OutletCatalog cat({fixture::outlet("lg", lg, Category::LargeGrocery), fixture::outlet("sh", sh, Category::SmallHealthy)});
    auto idx = build_outlet_index(cat);
    std::vector<StayPoint> stays = {fixture::stay("d", 0, 600, s)};
    // The small outlet is closer but outside its 50 m radius.
    auto v = attribute_visits(stays, cat, idx, std::nullopt);
    REQUIRE(v.size() == 1);
    CHECK(v[0].outlet_id == "lg");
    CHECK(v[0].category == Category::LargeGrocery);
    CHECK(v[0].visit_id == "v:" + stays[0].stay_id);
    // With a uniform 100 m radius only the small outlet qualifies.
    v = attribute_visits(stays, cat, idx, 100.0);
    REQUIRE(v.size() == 1);
    CHECK(v[0].outlet_id == "sh");
    const double d = haversine(s, sh);
    CHECK(attribute_visits(stays, cat, idx, d).size() == 1);
    CHECK(attribute_visits(stays, cat, idx, std::nextafter(d, 0.0)).empty());
  }

  TEST_CASE("equidistant outlets tie to the smallest id") {
    const LatLon p = fixture::offset(fixture::kOrigin, 30, 0);
    OutletCatalog cat({fixture::outlet("z9", p, Category::ProcessedFood), fixture::outlet("a1", p, Category::ProcessedFood)});
    auto v = attribute_visits(std::vector{fixture::stay("d", 0, 600, fixture::kOrigin)}, cat, build_outlet_index(cat),
                              std::nullopt);
    REQUIRE(v.size() == 1);
    CHECK(v[0].outlet_id == "a1");
  }

  TEST_CASE("indexed attribution equals brute force for every worker count") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 20; ++round) {
      OutletCatalog cat(fixture::random_outlets(rng, 60, 2000));
      std::vector<StayPoint> stays;
      std::uniform_real_distribution<double> u(-100, 2100);
      for (int i = 0; i < 150; ++i) {
        stays.push_back(fixture::stay("d" + std::to_string(i % 7), 1000 * i, 1000 * i + 600,
                                      fixture::offset(fixture::kOrigin, u(rng), u(rng))));
      }
      const std::optional<double> ov = round % 2 ? std::optional(75.0 + round) : std::nullopt;
      auto idx = build_outlet_index(cat);
      auto expect = oracle::brute_force_attribution(stays, cat.outlets(), ov);
      for (int w : {1, 4}) {
        auto got = attribute_visits(stays, cat, idx, ov, w);
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
          CHECK(got[i].stay_id == expect[i].stay_id);
          CHECK(got[i].outlet_id == expect[i].outlet_id);
          CHECK(got[i].distance_m == expect[i].distance_m);
        }
      }
    }
  }

  TEST_CASE("primary filter") {
    std::vector<FoodVisit> v(3);
    v[0].primary_food = true;
    v[2].primary_food = true;
    CHECK(filter_primary(v, true).size() == 2);
    CHECK(filter_primary(v, false).size() == 3);
  }

  TEST_CASE("home based names round trip") {
    for (auto h : {HomeBased::Yes, HomeBased::No, HomeBased::UnknownOrigin}) {
      CHECK(home_based_from_name(home_based_name(h)) == h);
    }
  }
}
