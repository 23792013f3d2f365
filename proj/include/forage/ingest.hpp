#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "forage/geo.hpp"
#include "forage/outlets.hpp"
#include "forage/routing.hpp"
#include "forage/track.hpp"

namespace forage {

enum class DropReason : std::uint8_t {
  Malformed = 0,
  LowAccuracy,
  OutOfWindow,
  OutOfBbox,
  Duplicate,
};
inline constexpr std::size_t kDropReasonCount = 5;

std::string_view drop_reason_name(DropReason r);

struct DropCounts {
  std::array<std::uint64_t, kDropReasonCount> by_reason{};

  std::uint64_t& operator[](DropReason r) { return by_reason[static_cast<std::size_t>(r)]; }
  std::uint64_t operator[](DropReason r) const { return by_reason[static_cast<std::size_t>(r)]; }
  std::uint64_t total() const;
  DropCounts& operator+=(const DropCounts& o);
};

struct PingParseResult {
  std::vector<DeviceTrack> devices;  ///< sorted by device_id
  std::uint64_t total_rows = 0;
  std::uint64_t retained = 0;
  DropCounts dropped;
};

/// Parses ping CSV text (header required; columns device_id, lat, lon, ts,
/// accuracy, optional geohash, any order). Rows are checked in order:
/// malformed, low accuracy, outside window, outside bbox; survivors are
/// grouped per device, sorted by ts and deduplicated keeping the first
/// (device_id, ts) row in file order. Chunks parse in parallel; the result
/// is identical for every worker count. Throws InputError when the header
/// is missing.
PingParseResult parse_pings(std::string_view csv_text, const StudyConfig& cfg, int workers = 1);
PingParseResult parse_pings_file(const std::filesystem::path& path, const StudyConfig& cfg, int workers = 1);

/// Columns outlet_id, name, lat, lon, category_code (LG/BB/SH/PF),
/// primary_food (0/1), optional radius_m. Any schema violation is fatal and
/// names the 1-based data row.
OutletCatalog load_outlets(std::string_view csv_text);
OutletCatalog load_outlets_file(const std::filesystem::path& path);

/// nodes: node_id,lat,lon; edges: from,to,length_m,oneway. oneway=0 edges
/// are inserted in both directions.
RoadGraph load_road_graph(std::string_view nodes_csv, std::string_view edges_csv);
RoadGraph load_road_graph_files(const std::filesystem::path& nodes, const std::filesystem::path& edges);

/// GeoJSON FeatureCollection of Polygon/MultiPolygon features with a
/// tract_id property and an optional numeric population.
TractSet load_tracts(std::string_view geojson_text);
TractSet load_tracts_file(const std::filesystem::path& path);

}  // namespace forage
