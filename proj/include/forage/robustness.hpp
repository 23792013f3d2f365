#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forage/home.hpp"
#include "forage/metrics.hpp"
#include "forage/outlets.hpp"
#include "forage/routing.hpp"
#include "forage/staypoints.hpp"

namespace forage {

enum class SweepAxis : std::uint8_t { Radius, Inclusion };

std::string_view sweep_axis_name(SweepAxis a);

struct SweepResult {
  SweepAxis axis = SweepAxis::Radius;
  std::string label;  ///< "r=100m", "all", "primary_only"
  std::optional<double> radius_m;
  MetricsScope scope = MetricsScope::All;
  std::vector<FoodVisit> visits;
  PopulationSummary summary;
};

/// Everything a sweep setting needs. Stays are detected once and reused;
/// only attribution and metrics are recomputed per setting.
struct SweepInputs {
  std::span<const StayPoint> all_stays;   ///< origin lookup for home-based flags
  std::span<const StayPoint> food_stays;  ///< food candidates (<= max_food_dur_min)
  const HomeMap& homes;
  const OutletCatalog& catalog;
  const RoadGraph& graph;
  MetricsParams params;
  int workers = 1;
};

/// One result per radius, in the given order, each attributing with a
/// uniform radius across all categories.
std::vector<SweepResult> radius_sweep(const SweepInputs& in, std::span<const double> radii);

/// Two results, "all" then "primary_only", both with per-category default
/// radii.
std::vector<SweepResult> inclusion_comparison(const SweepInputs& in);

}  // namespace forage
