#include "forage/io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "forage/csv.hpp"
#include "forage/local_time.hpp"

namespace forage::io {

using oj = nlohmann::ordered_json;

std::string fixed(double v, int decimals) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  std::string s(buf, res.ptr);
  // "-0.000" reads badly and breaks byte comparisons between equal values.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InputError("cannot write " + path.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw InputError("cannot write " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const oj& j) { write_file(path, j.dump(2) + "\n"); }

namespace {

std::string opt_fixed(const std::optional<double>& v, int decimals) { return v ? fixed(*v, decimals) : std::string(); }

oj opt_json(const std::optional<double>& v) { return v ? oj(*v) : oj(nullptr); }

void append_int(std::string& out, std::int64_t v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_shortest(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_fixed(std::string& out, double v, int decimals) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  out.append(buf, res.ptr);
}

constexpr std::size_t kFlushBytes = 1 << 20;

// Column lookup with row-numbered errors for one derived CSV file.
class Table {
 public:
  Table(std::string_view text, std::string file, std::initializer_list<std::string_view> required)
      : reader_(text), file_(std::move(file)) {
    std::string_view line;
    if (!reader_.next(line)) throw InputError(file_ + ": missing header");
    auto names = splitter_.split(line);
    csv::Header header(names);
    for (auto name : required) {
      auto idx = header.find(name);
      if (!idx) throw InputError(file_ + ": missing column '" + std::string(name) + "'");
      cols_.push_back(*idx);
    }
    width_ = header.size();
  }

  bool next() {
    std::string_view line;
    while (reader_.next(line)) {
      if (csv::trim(line).empty()) continue;
      ++row_;
      fields_ = splitter_.split(line);
      if (fields_.size() != width_) fail("expected " + std::to_string(width_) + " fields");
      return true;
    }
    return false;
  }

  std::string_view str(std::size_t col) const { return csv::trim(fields_[cols_[col]]); }
  double num(std::size_t col) const {
    double v = 0.0;
    if (!csv::parse_double(str(col), v)) fail("bad number '" + std::string(str(col)) + "'");
    return v;
  }
  std::optional<double> opt_num(std::size_t col) const {
    if (str(col).empty()) return std::nullopt;
    return num(col);
  }
  std::int64_t integer(std::size_t col) const {
    std::int64_t v = 0;
    if (!csv::parse_int(str(col), v)) fail("bad integer '" + std::string(str(col)) + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(file_ + " row " + std::to_string(row_) + ": " + what);
  }

 private:
  csv::LineReader reader_;
  csv::Splitter splitter_;
  std::string file_;
  std::vector<std::size_t> cols_;
  std::size_t width_ = 0;
  std::size_t row_ = 0;
  std::span<const std::string_view> fields_;
};

}  // namespace

void write_pings(std::ostream& os, std::span<const DeviceTrack> tracks) {
  std::string buf = "device_id,lat,lon,ts,accuracy\n";
  for (const auto& t : tracks) {
    for (const auto& p : t.points) {
      buf += t.device_id;
      buf += ',';
      append_shortest(buf, p.pos.lat);
      buf += ',';
      append_shortest(buf, p.pos.lon);
      buf += ',';
      append_int(buf, p.ts);
      buf += ",high\n";
      if (buf.size() > kFlushBytes) {
        os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
      }
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_synth_pings(std::ostream& os, std::span<const SynthPing> pings, std::span<const std::string> device_ids) {
  std::string buf = "device_id,lat,lon,ts,accuracy\n";
  for (const auto& p : pings) {
    buf += device_ids[p.device];
    buf += ',';
    append_fixed(buf, p.pos.lat, 7);
    buf += ',';
    append_fixed(buf, p.pos.lon, 7);
    buf += ',';
    append_int(buf, p.ts);
    buf += p.accuracy == Accuracy::High ? ",high\n" : ",low\n";
    if (buf.size() > kFlushBytes) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::string outlets_csv(std::span<const FoodOutlet> outlets) {
  std::string out = "outlet_id,name,lat,lon,category_code,primary_food\n";
  for (const auto& o : outlets) {
    out += csv::escape(o.outlet_id) + ',' + csv::escape(o.name) + ',' + fixed(o.pos.lat, 7) + ',' +
           fixed(o.pos.lon, 7) + ',' + std::string(category_code(o.category)) + ',' + (o.primary_food ? "1" : "0") +
           '\n';
  }
  return out;
}

std::string nodes_csv(std::span<const RoadNode> nodes) {
  std::string out = "node_id,lat,lon\n";
  for (const auto& n : nodes) {
    append_int(out, n.id);
    out += ',' + fixed(n.pos.lat, 7) + ',' + fixed(n.pos.lon, 7) + '\n';
  }
  return out;
}

std::string edges_csv(std::span<const RoadEdge> edges) {
  std::string out = "from,to,length_m,oneway\n";
  for (const auto& e : edges) {
    append_int(out, e.from);
    out += ',';
    append_int(out, e.to);
    out += ',' + fixed(e.length_m, 3) + ',' + (e.oneway ? "1" : "0") + '\n';
  }
  return out;
}

std::string tracts_geojson(std::span<const Tract> tracts) {
  oj features = oj::array();
  for (const auto& t : tracts) {
    oj rings = oj::array();
    for (const auto& ring : t.rings) {
      oj coords = oj::array();
      for (const auto& v : ring) coords.push_back({v.lon, v.lat});
      if (!ring.empty()) coords.push_back({ring.front().lon, ring.front().lat});
      rings.push_back(std::move(coords));
    }
    oj props;
    props["tract_id"] = t.id;
    props["population"] = opt_json(t.population);
    features.push_back(
        {{"type", "Feature"}, {"properties", props}, {"geometry", {{"type", "Polygon"}, {"coordinates", rings}}}});
  }
  oj fc = {{"type", "FeatureCollection"}, {"features", features}};
  return fc.dump() + "\n";
}

oj truth_json(const GroundTruth& truth) {
  oj devices = oj::array();
  for (const auto& d : truth.devices) {
    oj dwells = oj::array();
    for (const auto& w : d.dwells) {
      dwells.push_back({{"kind", dwell_kind_name(w.kind)},
                        {"outlet_id", w.outlet_id ? oj(*w.outlet_id) : oj(nullptr)},
                        {"lat", w.pos.lat},
                        {"lon", w.pos.lon},
                        {"start_ts", w.start_ts},
                        {"end_ts", w.end_ts},
                        {"origin", w.origin ? oj(*w.origin) : oj(nullptr)}});
    }
    devices.push_back({{"device_id", d.device_id},
                       {"home", {{"lat", d.home.lat}, {"lon", d.home.lon}}},
                       {"night_tracked", d.night_tracked},
                       {"dwells", std::move(dwells)}});
  }
  return {{"seed", truth.seed}, {"devices", std::move(devices)}};
}

GroundTruth parse_truth(std::string_view json_text) {
  GroundTruth t;
  try {
    const auto j = nlohmann::json::parse(json_text);
    t.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& d : j.at("devices")) {
      DeviceTruth dt;
      dt.device_id = d.at("device_id").get<std::string>();
      dt.home = {d.at("home").at("lat").get<double>(), d.at("home").at("lon").get<double>()};
      dt.night_tracked = d.at("night_tracked").get<bool>();
      for (const auto& w : d.at("dwells")) {
        PlantedDwell pd;
        auto kind = dwell_kind_from_name(w.at("kind").get<std::string>());
        if (!kind) throw InputError("truth.json: unknown dwell kind in device " + dt.device_id);
        pd.kind = *kind;
        if (!w.at("outlet_id").is_null()) pd.outlet_id = w.at("outlet_id").get<std::string>();
        pd.pos = {w.at("lat").get<double>(), w.at("lon").get<double>()};
        pd.start_ts = w.at("start_ts").get<std::int64_t>();
        pd.end_ts = w.at("end_ts").get<std::int64_t>();
        if (!w.at("origin").is_null()) pd.origin = w.at("origin").get<std::uint32_t>();
        dt.dwells.push_back(std::move(pd));
      }
      t.devices.push_back(std::move(dt));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("truth.json: ") + e.what());
  }
  std::sort(t.devices.begin(), t.devices.end(),
            [](const DeviceTruth& a, const DeviceTruth& b) { return a.device_id < b.device_id; });
  return t;
}

std::string homes_csv(const HomeMap& homes) {
  std::string out = "device_id,lat,lon,method,support\n";
  for (const auto& [id, h] : homes) {
    out += csv::escape(id) + ',' + fixed(h.centroid.lat, 7) + ',' + fixed(h.centroid.lon, 7) + ',' +
           std::string(home_method_name(h.method)) + ',' + std::to_string(h.support) + '\n';
  }
  return out;
}

HomeMap parse_homes(std::string_view csv_text) {
  Table t(csv_text, "homes.csv", {"device_id", "lat", "lon", "method", "support"});
  HomeMap homes;
  while (t.next()) {
    HomeLocation h;
    h.device_id = std::string(t.str(0));
    h.centroid = {t.num(1), t.num(2)};
    auto m = home_method_from_name(t.str(3));
    if (!m) t.fail("unknown method '" + std::string(t.str(3)) + "'");
    h.method = *m;
    h.support = static_cast<std::uint32_t>(t.integer(4));
    if (!homes.emplace(h.device_id, h).second) t.fail("duplicate device_id " + h.device_id);
  }
  return homes;
}

std::string stays_csv(std::span<const StayPoint> stays) {
  std::string out = "stay_id,device_id,lat,lon,start_ts,end_ts,n_pings,origin_stay_id\n";
  for (const auto& s : stays) {
    out += csv::escape(s.stay_id) + ',' + csv::escape(s.device_id) + ',' + fixed(s.centroid.lat, 7) + ',' +
           fixed(s.centroid.lon, 7) + ',';
    append_int(out, s.start_ts);
    out += ',';
    append_int(out, s.end_ts);
    out += ',' + std::to_string(s.n_pings) + ',' + (s.origin ? csv::escape(*s.origin) : std::string()) + '\n';
  }
  return out;
}

std::vector<StayPoint> parse_stays(std::string_view csv_text) {
  Table t(csv_text, "stays.csv",
          {"stay_id", "device_id", "lat", "lon", "start_ts", "end_ts", "n_pings", "origin_stay_id"});
  std::vector<StayPoint> stays;
  while (t.next()) {
    StayPoint s;
    s.stay_id = std::string(t.str(0));
    s.device_id = std::string(t.str(1));
    s.centroid = {t.num(2), t.num(3)};
    s.start_ts = t.integer(4);
    s.end_ts = t.integer(5);
    if (s.end_ts < s.start_ts) t.fail("end_ts before start_ts");
    s.n_pings = static_cast<std::uint32_t>(t.integer(6));
    if (!t.str(7).empty()) s.origin = std::string(t.str(7));
    stays.push_back(std::move(s));
  }
  return stays;
}

std::string visits_csv(std::span<const FoodVisit> visits) {
  std::string out = "visit_id,device_id,outlet_id,stay_id,start_ts,end_ts,distance_m,home_based,category,primary_food\n";
  for (const auto& v : visits) {
    out += csv::escape(v.visit_id) + ',' + csv::escape(v.device_id) + ',' + csv::escape(v.outlet_id) + ',' +
           csv::escape(v.stay_id) + ',';
    append_int(out, v.start_ts);
    out += ',';
    append_int(out, v.end_ts);
    out += ',' + fixed(v.distance_m, 3) + ',' + std::string(home_based_name(v.home_based)) + ',' +
           std::string(category_code(v.category)) + ',' + (v.primary_food ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<FoodVisit> parse_visits(std::string_view csv_text) {
  Table t(csv_text, "visits.csv",
          {"visit_id", "device_id", "outlet_id", "stay_id", "start_ts", "end_ts", "distance_m", "home_based",
           "category", "primary_food"});
  std::vector<FoodVisit> visits;
  while (t.next()) {
    FoodVisit v;
    v.visit_id = std::string(t.str(0));
    v.device_id = std::string(t.str(1));
    v.outlet_id = std::string(t.str(2));
    v.stay_id = std::string(t.str(3));
    v.start_ts = t.integer(4);
    v.end_ts = t.integer(5);
    v.distance_m = t.num(6);
    auto hb = home_based_from_name(t.str(7));
    if (!hb) t.fail("bad home_based '" + std::string(t.str(7)) + "'");
    v.home_based = *hb;
    auto cat = category_from_code(t.str(8));
    if (!cat) t.fail("bad category '" + std::string(t.str(8)) + "'");
    v.category = *cat;
    if (t.str(9) != "0" && t.str(9) != "1") t.fail("primary_food must be 0 or 1");
    v.primary_food = t.str(9) == "1";
    visits.push_back(std::move(v));
  }
  return visits;
}

std::string metrics_csv(std::span<const MetricsRecord> records) {
  std::string out =
      "device_id,category,n_visits,n_unique_stores,mean_visited_euclid_m,mean_visited_network_m,"
      "min_visited_euclid_m,nearest_store_euclid_m,nearest_store_network_m,n_known_origin,n_home_based,"
      "home_based_share\n";
  for (const auto& r : records) {
    out += csv::escape(r.device_id) + ',' + std::string(category_code(r.category)) + ',' +
           std::to_string(r.n_visits) + ',' + std::to_string(r.n_unique_stores) + ',' +
           opt_fixed(r.mean_visited_euclid_m, 3) + ',' + opt_fixed(r.mean_visited_network_m, 3) + ',' +
           opt_fixed(r.min_visited_euclid_m, 3) + ',' + opt_fixed(r.nearest_store_euclid_m, 3) + ',' +
           opt_fixed(r.nearest_store_network_m, 3) + ',' + std::to_string(r.n_known_origin) + ',' +
           std::to_string(r.n_home_based) + ',' + opt_fixed(r.home_based_share, 6) + '\n';
  }
  return out;
}

std::vector<MetricsRecord> parse_metrics(std::string_view csv_text) {
  Table t(csv_text, "metrics.csv",
          {"device_id", "category", "n_visits", "n_unique_stores", "mean_visited_euclid_m", "mean_visited_network_m",
           "min_visited_euclid_m", "nearest_store_euclid_m", "nearest_store_network_m", "n_known_origin",
           "n_home_based", "home_based_share"});
  std::vector<MetricsRecord> records;
  while (t.next()) {
    MetricsRecord r;
    r.device_id = std::string(t.str(0));
    auto cat = t.str(1) == "ALL" ? std::optional(Category::All) : category_from_code(t.str(1));
    if (!cat) t.fail("bad category '" + std::string(t.str(1)) + "'");
    r.category = *cat;
    r.n_visits = static_cast<std::uint32_t>(t.integer(2));
    r.n_unique_stores = static_cast<std::uint32_t>(t.integer(3));
    r.mean_visited_euclid_m = t.opt_num(4);
    r.mean_visited_network_m = t.opt_num(5);
    r.min_visited_euclid_m = t.opt_num(6);
    r.nearest_store_euclid_m = t.opt_num(7);
    r.nearest_store_network_m = t.opt_num(8);
    r.n_known_origin = static_cast<std::uint32_t>(t.integer(9));
    r.n_home_based = static_cast<std::uint32_t>(t.integer(10));
    r.home_based_share = t.opt_num(11);
    records.push_back(std::move(r));
  }
  return records;
}

oj ingest_report_json(const PingParseResult& pings, std::size_t n_outlets, std::size_t n_nodes, std::size_t n_arcs,
                      std::size_t n_tracts) {
  oj dropped;
  for (std::size_t i = 0; i < kDropReasonCount; ++i) {
    dropped[std::string(drop_reason_name(static_cast<DropReason>(i)))] = pings.dropped.by_reason[i];
  }
  return {{"total_rows", pings.total_rows},
          {"retained", pings.retained},
          {"dropped", dropped},
          {"n_devices", pings.devices.size()},
          {"n_outlets", n_outlets},
          {"n_nodes", n_nodes},
          {"n_arcs", n_arcs},
          {"n_tracts", n_tracts}};
}

oj coverage_json(const CoverageReport& r) {
  return {{"n_devices", r.n_devices},
          {"n_nighttime", r.n_nighttime},
          {"n_weekend_fallback", r.n_fallback},
          {"n_none", r.n_none}};
}

oj diagnostics_json(const RoutingDiagnostics& d) {
  return {{"n_pairs", d.n_pairs}, {"n_unsnappable", d.n_unsnappable}, {"n_unreachable", d.n_unreachable}};
}

oj summary_json(const PopulationSummary& s) {
  auto field = [](const FieldMean& f) { return oj{{"mean", opt_json(f.mean)}, {"n", f.count}}; };
  oj cats = oj::array();
  for (const auto& c : s.categories) {
    cats.push_back({{"category", category_code(c.category)},
                    {"name", category_name(c.category)},
                    {"n_devices", c.n_devices},
                    {"total_visits", c.total_visits},
                    {"n_visits", field(c.n_visits)},
                    {"n_unique_stores", field(c.n_unique_stores)},
                    {"mean_visited_euclid_m", field(c.mean_visited_euclid_m)},
                    {"mean_visited_network_m", field(c.mean_visited_network_m)},
                    {"nearest_store_euclid_m", field(c.nearest_store_euclid_m)},
                    {"nearest_store_network_m", field(c.nearest_store_network_m)},
                    {"home_based_share", field(c.home_based_share)}});
  }
  return {{"scope", scope_name(s.scope)}, {"weighting", weighting_name(s.weighting)}, {"categories", cats}};
}

oj eval_json(const EvalReport& r) {
  return {{"n_devices", r.n_devices},
          {"home",
           {{"n_inferred", r.n_homes_inferred},
            {"n_hit", r.n_homes_hit},
            {"hit_rate", opt_json(r.home_hit_rate)},
            {"coverage", opt_json(r.home_coverage)}}},
          {"stays",
           {{"n_planted", r.n_planted_stays},
            {"n_detected", r.n_detected_stays},
            {"n_recalled", r.n_recalled_stays},
            {"n_precise", r.n_precise_stays},
            {"precision", opt_json(r.stay_precision)},
            {"recall", opt_json(r.stay_recall)}}},
          {"visits",
           {{"n_planted", r.n_planted_visits},
            {"n_detected", r.n_detected_visits},
            {"n_matched", r.n_recalled_visits},
            {"precision", opt_json(r.visit_precision)},
            {"recall", opt_json(r.visit_recall)},
            {"frequency_ratio", opt_json(r.visit_frequency_ratio)}}},
          {"home_based",
           {{"n_known_origin", r.n_known_origin_visits},
            {"n_home_based", r.n_home_based_visits},
            {"measured_share", opt_json(r.measured_home_based_share)},
            {"true_share", opt_json(r.true_home_based_share)}}}};
}

std::string temporal_profile_csv(const TemporalProfile& p) {
  std::string out = "category,view,key,count,share\n";
  for (auto cat : kReportCategories) {
    const auto& c = p.of(cat);
    const std::string code(category_code(cat));
    auto row = [&](std::string_view view, const std::string& key, std::uint64_t n) {
      out += code + ',' + std::string(view) + ',' + key + ',' + std::to_string(n) + ',';
      if (c.total > 0) out += fixed(static_cast<double>(n) / static_cast<double>(c.total), 6);
      out += '\n';
    };
    for (int h = 0; h < 24; ++h) row("hour_weekday", std::to_string(h), c.hour_weekday[static_cast<std::size_t>(h)]);
    for (int h = 0; h < 24; ++h) row("hour_weekend", std::to_string(h), c.hour_weekend[static_cast<std::size_t>(h)]);
    for (int d = 0; d < 7; ++d) row("day_of_week", std::string(weekday_name(d)), c.day_of_week[static_cast<std::size_t>(d)]);
    for (std::size_t i = 0; i < c.daily.size(); ++i) {
      row("daily", format_day(p.first_day + static_cast<std::int64_t>(i)), c.daily[i]);
    }
  }
  return out;
}

std::string tract_aggregates_csv(const TractAggregation& agg) {
  std::string out =
      "tract_id,category,n_sampled_homes,population,sampling_rate,mean_nearest_euclid_m,mean_visited_euclid_m,"
      "diff_euclid_m,mean_nearest_network_m,mean_visited_network_m,diff_network_m\n";
  for (const auto& r : agg.rows) {
    out += csv::escape(r.tract_id) + ',' + std::string(category_code(r.category)) + ',' +
           std::to_string(r.n_sampled_homes) + ',' + (r.population ? shortest(*r.population) : std::string()) + ',' +
           opt_fixed(r.sampling_rate, 6) + ',' + opt_fixed(r.mean_nearest_euclid_m, 3) + ',' +
           opt_fixed(r.mean_visited_euclid_m, 3) + ',' + opt_fixed(r.diff_euclid_m, 3) + ',' +
           opt_fixed(r.mean_nearest_network_m, 3) + ',' + opt_fixed(r.mean_visited_network_m, 3) + ',' +
           opt_fixed(r.diff_network_m, 3) + '\n';
  }
  return out;
}

std::string histogram_csv(std::span<const std::pair<Category, Histogram>> hists) {
  std::string out = "category,bin,bin_lo,bin_hi,count,density\n";
  for (const auto& [cat, h] : hists) {
    const std::string code(category_code(cat));
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      out += code + ',' + std::to_string(k) + ',' + shortest(h.bin_lo(k)) + ',' + shortest(h.bin_hi(k)) + ',' +
             std::to_string(h.counts[k]) + ',' + shortest(h.density(k)) + '\n';
    }
    out += code + ",overflow," + shortest(h.max_value) + ",," + std::to_string(h.overflow) + ",\n";
  }
  return out;
}

std::string density_grid_csv(std::span<const std::pair<Category, DensityGrid>> grids) {
  std::string out = "category,ix,iy,x_lo,y_lo,count\n";
  for (const auto& [cat, g] : grids) {
    const std::string code(category_code(cat));
    for (std::size_t iy = 0; iy < g.n; ++iy) {
      for (std::size_t ix = 0; ix < g.n; ++ix) {
        out += code + ',' + std::to_string(ix) + ',' + std::to_string(iy) + ',' +
               shortest(static_cast<double>(ix) * g.cell) + ',' + shortest(static_cast<double>(iy) * g.cell) + ',' +
               std::to_string(g.at(ix, iy)) + '\n';
      }
    }
  }
  return out;
}

std::string sweep_csv(std::span<const SweepResult> results) {
  std::string out = "axis,setting,category,metric,value,n\n";
  for (const auto& r : results) {
    const std::string prefix = std::string(sweep_axis_name(r.axis)) + ',' + csv::escape(r.label) + ',';
    for (const auto& c : r.summary.categories) {
      const std::string head = prefix + std::string(category_code(c.category)) + ',';
      out += head + "total_visits," + std::to_string(c.total_visits) + ',' + std::to_string(c.n_devices) + '\n';
      auto field = [&](std::string_view name, const FieldMean& f, int decimals) {
        out += head + std::string(name) + ',' + opt_fixed(f.mean, decimals) + ',' + std::to_string(f.count) + '\n';
      };
      field("n_visits", c.n_visits, 6);
      field("n_unique_stores", c.n_unique_stores, 6);
      field("mean_visited_euclid_m", c.mean_visited_euclid_m, 3);
      field("mean_visited_network_m", c.mean_visited_network_m, 3);
      field("nearest_store_euclid_m", c.nearest_store_euclid_m, 3);
      field("nearest_store_network_m", c.nearest_store_network_m, 3);
      field("home_based_share", c.home_based_share, 6);
    }
  }
  return out;
}

}  // namespace forage::io
