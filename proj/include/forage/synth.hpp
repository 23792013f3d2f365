#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forage/geo.hpp"
#include "forage/home.hpp"
#include "forage/outlets.hpp"
#include "forage/routing.hpp"
#include "forage/staypoints.hpp"
#include "forage/track.hpp"

namespace forage {

struct SynthParams {
  std::uint64_t seed = 42;
  std::uint32_t n_devices = 100;
  std::uint32_t n_outlets_per_category = 20;
  double grid_extent_m = 10000.0;  ///< side of the square world
  double road_spacing_m = 250.0;
  LatLon origin{30.20, -81.80};  ///< south-west corner of the world
  std::int64_t start_ts = 1662004800;  ///< first local midnight generated
  std::uint32_t n_days = 14;
  std::string timezone = "America/New_York";
  std::int64_t cadence_s = 60;
  double noise_sigma_m = 15.0;
  double noise_cap_m = 35.0;
  double speed_m_per_min = 500.0;
  double fallback_share = 0.15;  ///< devices whose phone is off at night
  double worker_share = 0.7;
  double weekday_food_rate = 0.6;  ///< chance of an after-work food stop
  double evening_trip_rate = 0.2;  ///< chance of a home-based evening food trip
  double weekend_food_rate = 0.8;
  std::optional<std::string> holiday = "2022-09-05";  ///< local date with few food stops
  double holiday_factor = 0.15;
  double outlet_min_separation_m = 250.0;
  double place_clearance_m = 250.0;  ///< homes, workplaces, errands vs outlets
  std::uint32_t tract_k = 4;
  double other_accuracy_rate = 0.0;  ///< extra low-accuracy rows per fix

  void validate() const;
};

enum class DwellKind : std::uint8_t { Home, Work, Other, Food };

std::string_view dwell_kind_name(DwellKind k);
std::optional<DwellKind> dwell_kind_from_name(std::string_view s);

struct PlantedDwell {
  DwellKind kind = DwellKind::Home;
  std::optional<std::string> outlet_id;
  LatLon pos;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  std::optional<std::uint32_t> origin;  ///< index of the dwell the trip here started from

  double duration_min() const { return static_cast<double>(end_ts - start_ts) / 60.0; }
};

struct DeviceTruth {
  std::string device_id;
  LatLon home;
  bool night_tracked = true;
  std::vector<PlantedDwell> dwells;  ///< chronological
};

struct GroundTruth {
  std::uint64_t seed = 0;
  std::vector<DeviceTruth> devices;  ///< sorted by device_id
};

struct SynthPing {
  std::uint32_t device = 0;  ///< index into SynthWorld::device_ids
  std::int64_t ts = 0;
  LatLon pos;
  Accuracy accuracy = Accuracy::High;
};

struct SynthWorld {
  std::vector<std::string> device_ids;
  std::vector<SynthPing> pings;  ///< sorted by (ts, device, accuracy)
  std::vector<FoodOutlet> outlets;
  std::vector<RoadNode> nodes;
  std::vector<RoadEdge> edges;
  std::vector<Tract> tracts;
  GroundTruth truth;
  BBox extent;
};

/// Deterministic for a given seed: every device draws from its own sub-seed,
/// so the result does not depend on the worker count.
SynthWorld generate_world(const SynthParams& params, int workers = 1);

/// Groups pings into per-device tracks (High accuracy only), matching what
/// ingest would produce from the same rows.
std::vector<DeviceTrack> tracks_from_pings(const SynthWorld& world);

struct DegradeParams {
  double dropout_p = 0.0;
  std::vector<std::pair<std::int64_t, std::int64_t>> blackouts;  ///< [start, end) UTC
  std::uint64_t seed = 7;
};

/// Keeps a ping unless a hash of (seed, device, ts) falls below dropout_p or
/// the ping lies in a blackout window.
std::vector<SynthPing> degrade(std::span<const SynthPing> pings, const DegradeParams& params);

/// Blackouts of length_s starting every period_s from first over [first, last).
std::vector<std::pair<std::int64_t, std::int64_t>> periodic_blackouts(std::int64_t first, std::int64_t last,
                                                                      std::int64_t period_s, std::int64_t length_s);

struct EvalParams {
  double home_hit_m = 40.0;
  double min_iou = 0.5;
  double max_centroid_m = 100.0;
  double min_stay_min = 5.0;
  double max_stay_min = 120.0;
};

/// Rates are nullopt when their denominator is empty.
struct EvalReport {
  std::uint64_t n_devices = 0;
  std::uint64_t n_homes_inferred = 0;
  std::uint64_t n_homes_hit = 0;
  std::optional<double> home_hit_rate;
  std::optional<double> home_coverage;

  std::uint64_t n_planted_stays = 0;
  std::uint64_t n_detected_stays = 0;
  std::uint64_t n_recalled_stays = 0;
  std::uint64_t n_precise_stays = 0;
  std::optional<double> stay_precision;
  std::optional<double> stay_recall;

  std::uint64_t n_planted_visits = 0;
  std::uint64_t n_detected_visits = 0;
  std::uint64_t n_recalled_visits = 0;
  std::uint64_t n_precise_visits = 0;
  std::optional<double> visit_precision;
  std::optional<double> visit_recall;
  std::optional<double> visit_frequency_ratio;  ///< detected visits / planted food dwells

  std::uint64_t n_known_origin_visits = 0;
  std::uint64_t n_home_based_visits = 0;
  std::optional<double> measured_home_based_share;  ///< over known-origin visits only
  std::optional<double> true_home_based_share;
};

double interval_iou(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1);

/// Matches detected stays and visits to planted dwells of the same device.
/// Stay recall counts planted dwells of min..max_stay_min; stay precision
/// counts detected stays up to max_stay_min matched against any planted
/// dwell. A match needs interval IoU >= min_iou and centroid within
/// max_centroid_m; visits must also name the planted outlet.
EvalReport evaluate(std::span<const StayPoint> stays, std::span<const FoodVisit> visits, const HomeMap& homes,
                    const GroundTruth& truth, const EvalParams& params = {});

}  // namespace forage
