#include <doctest.h>

#include <set>

#include "forage/home.hpp"
#include "forage/synth.hpp"

using namespace forage;

namespace {

SynthParams small() {
  SynthParams p;
  p.n_devices = 20;
  p.n_days = 4;
  p.seed = 17;
  return p;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("world is deterministic and worker independent") {
    auto a = generate_world(small(), 1);
    auto b = generate_world(small(), 4);
    REQUIRE(a.pings.size() == b.pings.size());
    for (std::size_t i = 0; i < a.pings.size(); ++i) {
      CHECK(a.pings[i].ts == b.pings[i].ts);
      CHECK(a.pings[i].pos == b.pings[i].pos);
    }
    auto p = small();
    p.seed = 18;
    auto c = generate_world(p, 1);
    CHECK(c.pings.size() != a.pings.size());
  }

  TEST_CASE("world structure") {
    auto w = generate_world(small());
    CHECK(w.device_ids.size() == 20);
    CHECK(w.truth.devices.size() == 20);
    CHECK(w.outlets.size() == 80);
    const std::size_t n = 41;  // 10 km at 250 m spacing
    CHECK(w.nodes.size() == n * n);
    CHECK(w.edges.size() == 2 * n * (n - 1));
    CHECK(w.tracts.size() == 16);
    std::set<std::string> ids;
    for (const auto& o : w.outlets) ids.insert(o.outlet_id);
    CHECK(ids.size() == w.outlets.size());
    for (const auto& o : w.outlets) {
      if (o.category == Category::LargeGrocery) CHECK(o.primary_food);
      if (o.category == Category::BigBox) CHECK_FALSE(o.primary_food);
    }
    for (std::size_t i = 1; i < w.pings.size(); ++i) {
      const auto& x = w.pings[i - 1];
      const auto& y = w.pings[i];
      CHECK((x.ts < y.ts || (x.ts == y.ts && x.device <= y.device)));
    }
  }

  TEST_CASE("planted dwells are chronological and food dwells name outlets") {
    auto w = generate_world(small());
    std::size_t food = 0;
    for (const auto& d : w.truth.devices) {
      for (std::size_t k = 0; k < d.dwells.size(); ++k) {
        const auto& x = d.dwells[k];
        CHECK(x.start_ts < x.end_ts);
        if (k > 0) CHECK(d.dwells[k - 1].end_ts < x.start_ts);
        CHECK(x.duration_min() < 720.0);
        if (x.kind == DwellKind::Food) {
          ++food;
          CHECK(x.outlet_id);
          CHECK(x.duration_min() <= 90.0);
        }
        if (x.origin) CHECK(*x.origin < k);
      }
    }
    CHECK(food > 0);
  }

  TEST_CASE("noise stays within the cap") {
    auto p = small();
    p.noise_sigma_m = 0.0;
    auto w = generate_world(p);
    const auto& truth = w.truth.devices[0];
    auto tracks = tracks_from_pings(w);
    // With zero noise every fix inside the first dwell sits on the home.
    const auto& first = truth.dwells.front();
    for (const auto& pt : tracks[0].points) {
      if (pt.ts > first.start_ts && pt.ts < first.end_ts) CHECK(haversine(pt.pos, truth.home) < 1e-6);
    }
  }

  TEST_CASE("degrade drops pings deterministically") {
    auto w = generate_world(small());
    DegradeParams d;
    d.dropout_p = 0.5;
    auto a = degrade(w.pings, d);
    auto b = degrade(w.pings, d);
    CHECK(a.size() == b.size());
    const double kept = static_cast<double>(a.size()) / static_cast<double>(w.pings.size());
    CHECK(kept == doctest::Approx(0.5).epsilon(0.05));
    d.dropout_p = 0.0;
    const std::int64_t t0 = w.pings.front().ts;
    d.blackouts = periodic_blackouts(t0, t0 + 86400, 6 * 3600, 3600);
    CHECK(d.blackouts.size() == 4);
    for (const auto& p : degrade(w.pings, d)) {
      for (const auto& [s, e] : d.blackouts) CHECK_FALSE((p.ts >= s && p.ts < e));
    }
    d.dropout_p = 1.0;
    CHECK_THROWS(degrade(w.pings, d));
  }

  TEST_CASE("interval iou") {
    CHECK(interval_iou(0, 10, 0, 10) == 1.0);
    CHECK(interval_iou(0, 10, 5, 15) == doctest::Approx(1.0 / 3.0));
    CHECK(interval_iou(0, 10, 20, 30) == 0.0);
  }

  TEST_CASE("evaluation against the world's own truth") {
    auto w = generate_world(small());
    auto tracks = tracks_from_pings(w);
    auto stays = detect_all_stays(tracks, StayParams{}, 1);
    auto homes = infer_all_homes(tracks, StudyConfig{}, HomeParams{}, 1).homes;
    auto r = evaluate(stays, {}, homes, w.truth);
    CHECK(r.n_devices == 20);
    CHECK(*r.home_hit_rate >= 0.95);
    CHECK(*r.stay_recall >= 0.9);
    CHECK(r.n_detected_visits == 0);
    CHECK_FALSE(r.visit_precision);
    CHECK(*r.visit_recall == 0.0);
  }

  TEST_CASE("parameter validation") {
    auto p = small();
    p.road_spacing_m = 0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = small();
    p.holiday = "Sept 5";
    CHECK_THROWS_AS(p.validate(), InputError);
    p = small();
    p.fallback_share = 1.5;
    CHECK_THROWS_AS(p.validate(), InputError);
    CHECK(dwell_kind_from_name("food") == DwellKind::Food);
  }
}
