#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forage/home.hpp"
#include "forage/ingest.hpp"
#include "forage/metrics.hpp"
#include "forage/outlets.hpp"
#include "forage/robustness.hpp"
#include "forage/spatiotemporal.hpp"
#include "forage/staypoints.hpp"
#include "forage/synth.hpp"

/// File formats shared by the pipeline stages. Coordinates in derived files
/// use 7 decimals, distances 3, shares and rates 6; undefined values are
/// empty CSV fields or JSON null.
namespace forage::io {

std::string fixed(double v, int decimals);
/// Shortest text that parses back to the same double.
std::string shortest(double v);

/// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view content);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

// Raw inputs, in the formats ingest reads.
void write_pings(std::ostream& os, std::span<const DeviceTrack> tracks);
void write_synth_pings(std::ostream& os, std::span<const SynthPing> pings, std::span<const std::string> device_ids);
std::string outlets_csv(std::span<const FoodOutlet> outlets);
std::string nodes_csv(std::span<const RoadNode> nodes);
std::string edges_csv(std::span<const RoadEdge> edges);
std::string tracts_geojson(std::span<const Tract> tracts);

nlohmann::ordered_json truth_json(const GroundTruth& truth);
GroundTruth parse_truth(std::string_view json_text);

// Stage outputs and their readers.
std::string homes_csv(const HomeMap& homes);
HomeMap parse_homes(std::string_view csv_text);

std::string stays_csv(std::span<const StayPoint> stays);
std::vector<StayPoint> parse_stays(std::string_view csv_text);

std::string visits_csv(std::span<const FoodVisit> visits);
std::vector<FoodVisit> parse_visits(std::string_view csv_text);

std::string metrics_csv(std::span<const MetricsRecord> records);
std::vector<MetricsRecord> parse_metrics(std::string_view csv_text);

nlohmann::ordered_json ingest_report_json(const PingParseResult& pings, std::size_t n_outlets, std::size_t n_nodes,
                                          std::size_t n_arcs, std::size_t n_tracts);
nlohmann::ordered_json coverage_json(const CoverageReport& r);
nlohmann::ordered_json diagnostics_json(const RoutingDiagnostics& d);
nlohmann::ordered_json summary_json(const PopulationSummary& s);
nlohmann::ordered_json eval_json(const EvalReport& r);

std::string temporal_profile_csv(const TemporalProfile& p);
std::string tract_aggregates_csv(const TractAggregation& agg);
/// One block of rows per category; the overflow bin has an empty bin_hi.
std::string histogram_csv(std::span<const std::pair<Category, Histogram>> hists);
std::string density_grid_csv(std::span<const std::pair<Category, DensityGrid>> grids);
std::string sweep_csv(std::span<const SweepResult> results);

}  // namespace forage::io
