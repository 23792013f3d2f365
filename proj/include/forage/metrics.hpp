#pragma once

#include <absl/container/flat_hash_map.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forage/common.hpp"
#include "forage/home.hpp"
#include "forage/outlets.hpp"
#include "forage/routing.hpp"
#include "forage/staypoints.hpp"

namespace forage {

enum class MetricsScope : std::uint8_t { All, PrimaryOnly };
enum class VisitedWeighting : std::uint8_t { Store, Visit };

std::string_view scope_name(MetricsScope s);
std::string_view weighting_name(VisitedWeighting w);

struct MetricsParams {
  double home_based_radius_m = 200.0;
  VisitedWeighting weighting = VisitedWeighting::Store;
  RoutingParams routing;
};

/// Per-device, per-category food acquisition metrics. Distances are home to
/// store; "visited" means are over distinct visited stores by default.
struct MetricsRecord {
  std::string device_id;
  Category category = Category::All;
  std::uint32_t n_visits = 0;
  std::uint32_t n_unique_stores = 0;
  std::optional<double> mean_visited_euclid_m;
  std::optional<double> mean_visited_network_m;
  std::optional<double> min_visited_euclid_m;
  std::optional<double> nearest_store_euclid_m;
  std::optional<double> nearest_store_network_m;
  std::uint32_t n_known_origin = 0;
  std::uint32_t n_home_based = 0;
  std::optional<double> home_based_share;
};

struct MetricsResult {
  std::vector<MetricsRecord> records;  ///< sorted by (device_id, category)
  RoutingDiagnostics diagnostics;
};

/// stay_id -> stay lookup.
class StayIndex {
 public:
  explicit StayIndex(std::span<const StayPoint> stays);
  const StayPoint* find(std::string_view stay_id) const;

 private:
  absl::flat_hash_map<std::string_view, const StayPoint*> by_id_;
};

/// UnknownOrigin when the visit's stay has no origin link (or no home is
/// known); otherwise Yes iff the origin stay centroid is within radius_m of
/// the home.
HomeBased home_based_flag(const FoodVisit& visit, const StayIndex& stays, const HomeLocation* home,
                          double radius_m = 200.0);

/// Fills visit.home_based for every visit.
void assign_home_based(std::span<FoodVisit> visits, const StayIndex& stays, const HomeMap& homes,
                       double radius_m = 200.0);

/// One record per (home device, category with a non-empty in-scope catalog)
/// plus an All row. Devices without a home are skipped. Network distances
/// come from one batched Dijkstra per home.
MetricsResult compute_metrics(std::span<const FoodVisit> visits, const HomeMap& homes, const OutletCatalog& catalog,
                              const RoadGraph& graph, MetricsScope scope, const MetricsParams& params = {},
                              int workers = 1);

struct FieldMean {
  std::optional<double> mean;
  std::uint64_t count = 0;
};

struct CategorySummary {
  Category category = Category::All;
  std::uint64_t n_devices = 0;
  FieldMean n_visits;
  FieldMean n_unique_stores;
  FieldMean mean_visited_euclid_m;
  FieldMean mean_visited_network_m;
  FieldMean nearest_store_euclid_m;
  FieldMean nearest_store_network_m;
  FieldMean home_based_share;
  std::uint64_t total_visits = 0;
};

/// Wide layout: one column per category present in the records.
struct PopulationSummary {
  MetricsScope scope = MetricsScope::All;
  VisitedWeighting weighting = VisitedWeighting::Store;
  std::vector<CategorySummary> categories;

  const CategorySummary* find(Category c) const;
};

/// Unweighted means over devices; undefined values are left out of their
/// field's mean and the field reports how many devices contributed.
PopulationSummary summarize_population(std::span<const MetricsRecord> records, MetricsScope scope = MetricsScope::All,
                                       VisitedWeighting weighting = VisitedWeighting::Store);

}  // namespace forage
