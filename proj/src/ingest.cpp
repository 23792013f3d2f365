#include "forage/ingest.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <nlohmann/json.hpp>
#include <numeric>

#include "forage/csv.hpp"
#include "forage/parallel.hpp"

namespace forage {

std::string_view drop_reason_name(DropReason r) {
  switch (r) {
    case DropReason::Malformed: return "malformed";
    case DropReason::LowAccuracy: return "low_accuracy";
    case DropReason::OutOfWindow: return "out_of_window";
    case DropReason::OutOfBbox: return "out_of_bbox";
    case DropReason::Duplicate: return "duplicate";
  }
  return "unknown";
}

std::uint64_t DropCounts::total() const {
  return std::accumulate(by_reason.begin(), by_reason.end(), std::uint64_t{0});
}

DropCounts& DropCounts::operator+=(const DropCounts& o) {
  for (std::size_t i = 0; i < kDropReasonCount; ++i) by_reason[i] += o.by_reason[i];
  return *this;
}

void StudyConfig::validate() const {
  if (!(window_start < window_end)) throw InputError("study.window_start must be < study.window_end");
  if (!(bbox.lat_min < bbox.lat_max) || !(bbox.lon_min < bbox.lon_max) || bbox.lat_min < -90.0 ||
      bbox.lat_max > 90.0 || bbox.lon_min < -180.0 || bbox.lon_max > 180.0) {
    throw InputError("study.bbox must be [lat_min, lon_min, lat_max, lon_max] with min < max");
  }
  if (!(grid_cell_m > 0.0)) throw InputError("study.grid_cell_m must be > 0");
  if (timezone.empty()) throw InputError("study.timezone must not be empty");
}

namespace {

struct RawRow {
  std::string_view device;
  std::int64_t ts;
  LatLon pos;
};

struct ChunkResult {
  std::vector<RawRow> rows;
  std::deque<std::string> owned;  // unescaped device ids from quoted lines
  DropCounts dropped;
  std::uint64_t total = 0;
};

struct PingColumns {
  std::size_t device, lat, lon, ts, accuracy, count;
};

bool is_high_accuracy(std::string_view s) {
  if (s.size() != 4) return false;
  static constexpr std::string_view kHigh = "high";
  for (std::size_t i = 0; i < 4; ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != kHigh[i]) return false;
  }
  return true;
}

void parse_chunk(std::string_view text, const PingColumns& cols, const StudyConfig& cfg, ChunkResult& out) {
  csv::LineReader lines(text);
  csv::Splitter splitter;
  std::string_view line;
  while (lines.next(line)) {
    if (csv::trim(line).empty()) continue;
    ++out.total;
    const auto f = splitter.split(line);
    if (f.size() != cols.count) {
      ++out.dropped[DropReason::Malformed];
      continue;
    }
    const std::string_view device = csv::trim(f[cols.device]);
    const std::string_view acc = csv::trim(f[cols.accuracy]);
    double lat = 0.0, lon = 0.0;
    std::int64_t ts = 0;
    if (device.empty() || acc.empty() || !csv::parse_double(f[cols.lat], lat) ||
        !csv::parse_double(f[cols.lon], lon) || !csv::parse_int(f[cols.ts], ts) || lat < -90.0 ||
        lat > 90.0 || lon < -180.0 || lon > 180.0) {
      ++out.dropped[DropReason::Malformed];
      continue;
    }
    if (!is_high_accuracy(acc)) {
      ++out.dropped[DropReason::LowAccuracy];
      continue;
    }
    if (!cfg.in_window(ts)) {
      ++out.dropped[DropReason::OutOfWindow];
      continue;
    }
    const LatLon pos{lat, lon};
    if (!cfg.bbox.contains(pos)) {
      ++out.dropped[DropReason::OutOfBbox];
      continue;
    }
    std::string_view dev = device;
    // A view into the source text is only valid for unquoted lines.
    if (line.find('"') != std::string_view::npos) dev = out.owned.emplace_back(device);
    out.rows.push_back({dev, ts, pos});
  }
}

std::vector<std::string_view> split_chunks(std::string_view body, std::size_t n_chunks) {
  std::vector<std::string_view> chunks;
  if (body.empty()) return chunks;
  const std::size_t target = std::max<std::size_t>(1, body.size() / std::max<std::size_t>(1, n_chunks));
  std::size_t start = 0;
  while (start < body.size()) {
    std::size_t end = std::min(body.size(), start + target);
    if (end < body.size()) {
      const auto nl = body.find('\n', end);
      end = nl == std::string_view::npos ? body.size() : nl + 1;
    }
    chunks.push_back(body.substr(start, end - start));
    start = end;
  }
  return chunks;
}

[[noreturn]] void row_error(std::string_view file, std::size_t row, const std::string& what) {
  throw InputError(std::string(file) + " row " + std::to_string(row) + ": " + what);
}

std::size_t require_column(const csv::Header& h, std::string_view file, std::string_view name) {
  auto c = h.find(name);
  if (!c) throw InputError(std::string(file) + ": missing header column '" + std::string(name) + "'");
  return *c;
}

}  // namespace

PingParseResult parse_pings(std::string_view text, const StudyConfig& cfg, int workers) {
  csv::LineReader reader(text);
  std::string_view header_line;
  csv::Splitter splitter;
  if (!reader.next(header_line)) throw InputError("pings: missing header row");
  const csv::Header header(splitter.split(header_line));
  const auto dev = header.find("device_id");
  const auto lat = header.find("lat");
  const auto lon = header.find("lon");
  const auto ts = header.find("ts");
  const auto acc = header.find("accuracy");
  if (!dev || !lat || !lon || !ts || !acc) {
    throw InputError("pings: missing header row (need device_id,lat,lon,ts,accuracy)");
  }
  const PingColumns cols{*dev, *lat, *lon, *ts, *acc, header.size()};

  const auto header_end = text.find('\n');
  const std::string_view body = header_end == std::string_view::npos ? std::string_view{} : text.substr(header_end + 1);
  const auto chunks = split_chunks(body, workers > 1 ? static_cast<std::size_t>(workers) * 4 : 1);
  std::vector<ChunkResult> parsed(chunks.size());
  parallel_for(chunks.size(), workers, [&](std::size_t i) { parse_chunk(chunks[i], cols, cfg, parsed[i]); });

  PingParseResult result;
  for (const auto& c : parsed) {
    result.total_rows += c.total;
    result.dropped += c.dropped;
  }

  // Device ids in first-appearance order, then ranked lexicographically.
  absl::flat_hash_map<std::string_view, std::uint32_t> first_seen;
  std::vector<std::string_view> names;
  std::vector<std::uint32_t> counts;
  for (const auto& c : parsed) {
    for (const auto& r : c.rows) {
      auto [it, inserted] = first_seen.try_emplace(r.device, static_cast<std::uint32_t>(names.size()));
      if (inserted) {
        names.push_back(r.device);
        counts.push_back(0);
      }
      ++counts[it->second];
    }
  }
  std::vector<std::uint32_t> order(names.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return names[a] < names[b]; });
  std::vector<std::uint32_t> rank(names.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  result.devices.resize(names.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    result.devices[i].device_id = std::string(names[order[i]]);
    result.devices[i].points.reserve(counts[order[i]]);
  }
  for (const auto& c : parsed) {
    for (const auto& r : c.rows) {
      result.devices[rank[first_seen.find(r.device)->second]].points.push_back({r.ts, r.pos});
    }
  }
  parsed.clear();

  std::vector<std::uint64_t> dups(result.devices.size(), 0);
  parallel_for(result.devices.size(), workers, [&](std::size_t i) {
    auto& pts = result.devices[i].points;
    std::stable_sort(pts.begin(), pts.end(), [](const TrackPoint& a, const TrackPoint& b) { return a.ts < b.ts; });
    const auto last = std::unique(pts.begin(), pts.end(), [](const TrackPoint& a, const TrackPoint& b) { return a.ts == b.ts; });
    dups[i] = static_cast<std::uint64_t>(pts.end() - last);
    pts.erase(last, pts.end());
  });
  for (auto d : dups) result.dropped[DropReason::Duplicate] += d;
  for (const auto& d : result.devices) result.retained += d.points.size();
  return result;
}

PingParseResult parse_pings_file(const std::filesystem::path& path, const StudyConfig& cfg, int workers) {
  const std::string text = csv::read_file(path);
  return parse_pings(text, cfg, workers);
}

OutletCatalog load_outlets(std::string_view text) {
  static constexpr std::string_view kFile = "outlets.csv";
  csv::LineReader reader(text);
  csv::Splitter splitter;
  std::string_view line;
  if (!reader.next(line)) throw InputError("outlets.csv: missing header row");
  const csv::Header header(splitter.split(line));
  const std::size_t c_id = require_column(header, kFile, "outlet_id");
  const std::size_t c_name = require_column(header, kFile, "name");
  const std::size_t c_lat = require_column(header, kFile, "lat");
  const std::size_t c_lon = require_column(header, kFile, "lon");
  const std::size_t c_cat = require_column(header, kFile, "category_code");
  const std::size_t c_primary = require_column(header, kFile, "primary_food");
  const auto c_radius = header.find("radius_m");

  std::vector<FoodOutlet> outlets;
  absl::flat_hash_map<std::string, std::size_t> seen;
  std::size_t row = 0;
  while (reader.next(line)) {
    if (csv::trim(line).empty()) continue;
    ++row;
    const auto f = splitter.split(line);
    if (f.size() != header.size()) {
      row_error(kFile, row, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    }
    FoodOutlet o;
    o.outlet_id = std::string(csv::trim(f[c_id]));
    o.name = std::string(csv::trim(f[c_name]));
    if (o.outlet_id.empty()) row_error(kFile, row, "missing outlet_id");
    if (!csv::parse_double(f[c_lat], o.pos.lat) || o.pos.lat < -90.0 || o.pos.lat > 90.0) {
      row_error(kFile, row, "missing or invalid lat");
    }
    if (!csv::parse_double(f[c_lon], o.pos.lon) || o.pos.lon < -180.0 || o.pos.lon > 180.0) {
      row_error(kFile, row, "missing or invalid lon");
    }
    const auto code = csv::trim(f[c_cat]);
    const auto cat = category_from_code(code);
    if (!cat) row_error(kFile, row, "unknown category_code '" + std::string(code) + "'");
    o.category = *cat;
    const auto primary = csv::trim(f[c_primary]);
    if (primary == "1") {
      o.primary_food = true;
    } else if (primary == "0") {
      o.primary_food = false;
    } else {
      row_error(kFile, row, "primary_food must be 0 or 1");
    }
    o.radius_m = category_default_radius(o.category);
    if (c_radius && !csv::trim(f[*c_radius]).empty()) {
      if (!csv::parse_double(f[*c_radius], o.radius_m) || !(o.radius_m > 0.0)) {
        row_error(kFile, row, "radius_m must be > 0");
      }
    }
    if (!seen.emplace(o.outlet_id, row).second) {
      row_error(kFile, row, "duplicate outlet_id '" + o.outlet_id + "'");
    }
    outlets.push_back(std::move(o));
  }
  return OutletCatalog(std::move(outlets));
}

OutletCatalog load_outlets_file(const std::filesystem::path& path) { return load_outlets(csv::read_file(path)); }

RoadGraph load_road_graph(std::string_view nodes_csv, std::string_view edges_csv) {
  csv::Splitter splitter;
  std::string_view line;

  std::vector<RoadNode> nodes;
  {
    static constexpr std::string_view kFile = "nodes.csv";
    csv::LineReader reader(nodes_csv);
    if (!reader.next(line)) throw InputError("nodes.csv: missing header row");
    const csv::Header header(splitter.split(line));
    const std::size_t c_id = require_column(header, kFile, "node_id");
    const std::size_t c_lat = require_column(header, kFile, "lat");
    const std::size_t c_lon = require_column(header, kFile, "lon");
    std::size_t row = 0;
    while (reader.next(line)) {
      if (csv::trim(line).empty()) continue;
      ++row;
      const auto f = splitter.split(line);
      RoadNode n;
      if (f.size() != header.size() || !csv::parse_int(f[c_id], n.id) || !csv::parse_double(f[c_lat], n.pos.lat) ||
          !csv::parse_double(f[c_lon], n.pos.lon) || std::abs(n.pos.lat) > 90.0 || std::abs(n.pos.lon) > 180.0) {
        row_error(kFile, row, "malformed node row");
      }
      nodes.push_back(n);
    }
  }

  std::vector<RoadEdge> edges;
  {
    static constexpr std::string_view kFile = "edges.csv";
    csv::LineReader reader(edges_csv);
    if (!reader.next(line)) throw InputError("edges.csv: missing header row");
    const csv::Header header(splitter.split(line));
    const std::size_t c_from = require_column(header, kFile, "from");
    const std::size_t c_to = require_column(header, kFile, "to");
    const std::size_t c_len = require_column(header, kFile, "length_m");
    const std::size_t c_oneway = require_column(header, kFile, "oneway");
    std::size_t row = 0;
    while (reader.next(line)) {
      if (csv::trim(line).empty()) continue;
      ++row;
      const auto f = splitter.split(line);
      RoadEdge e;
      std::int64_t oneway = 0;
      if (f.size() != header.size() || !csv::parse_int(f[c_from], e.from) || !csv::parse_int(f[c_to], e.to) ||
          !csv::parse_double(f[c_len], e.length_m) || !csv::parse_int(f[c_oneway], oneway) ||
          (oneway != 0 && oneway != 1)) {
        throw InputError("edges.csv edge " + std::to_string(row) + ": malformed edge row");
      }
      e.oneway = oneway == 1;
      edges.push_back(e);
    }
  }
  return RoadGraph(std::move(nodes), edges);
}

RoadGraph load_road_graph_files(const std::filesystem::path& nodes, const std::filesystem::path& edges) {
  return load_road_graph(csv::read_file(nodes), csv::read_file(edges));
}

namespace {

std::vector<LatLon> parse_ring(const nlohmann::json& ring, std::size_t feature) {
  if (!ring.is_array()) throw InputError("tracts feature " + std::to_string(feature) + ": ring is not an array");
  std::vector<LatLon> out;
  out.reserve(ring.size());
  for (const auto& pt : ring) {
    if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number()) {
      throw InputError("tracts feature " + std::to_string(feature) + ": bad coordinate");
    }
    out.push_back({pt[1].get<double>(), pt[0].get<double>()});
  }
  // GeoJSON rings repeat the first vertex at the end.
  if (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

}  // namespace

TractSet load_tracts(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("tracts: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array()) {
    throw InputError("tracts: expected a FeatureCollection with a features array");
  }
  std::vector<Tract> tracts;
  absl::flat_hash_map<std::string, std::size_t> seen;
  std::size_t index = 0;
  for (const auto& feat : doc["features"]) {
    ++index;
    const std::string where = "tracts feature " + std::to_string(index);
    const auto props = feat.find("properties");
    if (props == feat.end() || !props->is_object() || !props->contains("tract_id")) {
      throw InputError(where + ": missing tract_id");
    }
    Tract t;
    const auto& id = (*props)["tract_id"];
    if (id.is_string()) {
      t.id = id.get<std::string>();
    } else if (id.is_number_integer()) {
      t.id = std::to_string(id.get<std::int64_t>());
    } else {
      throw InputError(where + ": tract_id must be a string or integer");
    }
    if (t.id.empty()) throw InputError(where + ": empty tract_id");
    if (auto pop = props->find("population"); pop != props->end() && pop->is_number()) {
      t.population = pop->get<double>();
    }
    const auto geom = feat.find("geometry");
    if (geom == feat.end() || !geom->is_object()) throw InputError(where + ": missing geometry");
    const std::string type = geom->value("type", "");
    const auto& coords = (*geom)["coordinates"];
    if (type == "Polygon") {
      for (const auto& ring : coords) t.rings.push_back(parse_ring(ring, index));
    } else if (type == "MultiPolygon") {
      for (const auto& poly : coords) {
        for (const auto& ring : poly) t.rings.push_back(parse_ring(ring, index));
      }
    } else {
      throw InputError(where + ": unsupported geometry type '" + type + "'");
    }
    if (!seen.emplace(t.id, index).second) throw InputError(where + ": duplicate tract_id '" + t.id + "'");
    tracts.push_back(std::move(t));
  }
  return TractSet(std::move(tracts));
}

TractSet load_tracts_file(const std::filesystem::path& path) { return load_tracts(csv::read_file(path)); }

}  // namespace forage
