#include "forage/config.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "forage/csv.hpp"

namespace forage {

namespace {

using json = nlohmann::json;

std::string join(std::string_view path, std::string_view key) {
  return path.empty() ? std::string(key) : std::string(path) + "." + std::string(key);
}

[[noreturn]] void type_error(const std::string& key, std::string_view what) {
  throw InputError("config: key '" + key + "' must be " + std::string(what));
}

// One JSON object; every key read is recorded so leftovers can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) type_error(path_.empty() ? "<root>" : path_, "an object");
  }

  const json* raw(std::string_view key) {
    seen_.emplace(key);
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  Section sub(std::string_view key) {
    static const json kEmpty = json::object();
    const json* v = raw(key);
    return Section(v ? *v : kEmpty, join(path_, key));
  }

  void num(std::string_view key, double& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number()) type_error(join(path_, key), "a number");
      out = v->get<double>();
    }
  }
  void opt_num(std::string_view key, std::optional<double>& out) {
    if (const json* v = raw(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        type_error(join(path_, key), "a number or null");
      }
    }
  }
  template <class Int>
  void integer(std::string_view key, Int& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_integer()) type_error(join(path_, key), "an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_integer() && v->get<std::int64_t>() < 0) type_error(join(path_, key), "a non-negative integer");
      }
      out = v->get<Int>();
    }
  }
  void boolean(std::string_view key, bool& out) {
    if (const json* v = raw(key)) {
      if (!v->is_boolean()) type_error(join(path_, key), "true or false");
      out = v->get<bool>();
    }
  }
  void str(std::string_view key, std::string& out) {
    if (const json* v = raw(key)) {
      if (!v->is_string()) type_error(join(path_, key), "a string");
      out = v->get<std::string>();
    }
  }
  void opt_str(std::string_view key, std::optional<std::string>& out) {
    if (const json* v = raw(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        type_error(join(path_, key), "a string or null");
      }
    }
  }
  void num_list(std::string_view key, std::vector<double>& out) {
    if (const json* v = raw(key)) {
      if (!v->is_array()) type_error(join(path_, key), "an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) type_error(join(path_, key), "an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  void intervals(std::string_view key, std::vector<std::pair<std::int64_t, std::int64_t>>& out) {
    if (const json* v = raw(key)) {
      if (!v->is_array()) type_error(join(path_, key), "an array of [start, end] pairs");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
          type_error(join(path_, key), "an array of [start, end] integer pairs");
        }
        out.emplace_back(e[0].get<std::int64_t>(), e[1].get<std::int64_t>());
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw InputError("config: unknown key '" + join(path_, it.key()) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

void read_latlon(Section s, LatLon& p) {
  s.num("lat", p.lat);
  s.num("lon", p.lon);
  s.finish();
}

}  // namespace

void PipelineConfig::validate() const {
  study.validate();
  if (workers < 1) throw InputError("config: key 'workers' must be >= 1");
  if (home.night_start_hour < 0 || home.night_start_hour > 23 || home.night_end_hour < 0 || home.night_end_hour > 23) {
    throw InputError("config: key 'home.night_start_hour' and 'home.night_end_hour' must be in 0..23");
  }
  if (!(stays.dist_threshold_m > 0.0)) throw InputError("config: key 'stays.dist_threshold_m' must be > 0");
  if (stays.min_dur_min < 0.0 || stays.max_dur_min < stays.min_dur_min) {
    throw InputError("config: key 'stays.max_dur_min' must be >= stays.min_dur_min >= 0");
  }
  if (stays.max_track_gap_s < 0) throw InputError("config: key 'stays.max_track_gap_s' must be >= 0");
  if (attribution.radius_m && !(*attribution.radius_m > 0.0)) {
    throw InputError("config: key 'attribution.radius_m' must be > 0");
  }
  if (!(metrics.routing.max_snap_m > 0.0)) throw InputError("config: key 'routing.max_snap_m' must be > 0");
  if (!(aggregate.hist_bin_m > 0.0) || !(aggregate.hist_max_m > 0.0)) {
    throw InputError("config: key 'aggregate.hist_bin_m' and 'aggregate.hist_max_m' must be > 0");
  }
  if (!(aggregate.grid_cell_m > 0.0) || !(aggregate.grid_max_m > 0.0)) {
    throw InputError("config: key 'aggregate.grid_cell_m' and 'aggregate.grid_max_m' must be > 0");
  }
  if (!(aggregate.rate_bin > 0.0) || !(aggregate.rate_max > 0.0)) {
    throw InputError("config: key 'aggregate.rate_bin' and 'aggregate.rate_max' must be > 0");
  }
  for (double r : sweep.radii) {
    if (!(r > 0.0)) throw InputError("config: key 'sweep.radii' must hold positive radii");
  }
  if (degrade.params.dropout_p < 0.0 || degrade.params.dropout_p >= 1.0) {
    throw InputError("config: key 'degrade.dropout_p' must be in [0, 1)");
  }
  if (degrade.blackout_period_s < 0 || degrade.blackout_length_s < 0 ||
      (degrade.blackout_period_s > 0 && degrade.blackout_length_s == 0)) {
    throw InputError("config: key 'degrade.blackout_length_s' must be > 0 when a period is set");
  }
  synth.validate();
}

PipelineConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
  PipelineConfig cfg;
  Section r(root, "");
  r.integer("workers", cfg.workers);
  {
    Section s = r.sub("study");
    s.integer("window_start", cfg.study.window_start);
    s.integer("window_end", cfg.study.window_end);
    {
      Section b = s.sub("bbox");
      b.num("lat_min", cfg.study.bbox.lat_min);
      b.num("lon_min", cfg.study.bbox.lon_min);
      b.num("lat_max", cfg.study.bbox.lat_max);
      b.num("lon_max", cfg.study.bbox.lon_max);
      b.finish();
    }
    s.str("timezone", cfg.study.timezone);
    s.num("grid_cell_m", cfg.study.grid_cell_m);
    s.finish();
  }
  {
    Section s = r.sub("home");
    s.integer("min_night_pings", cfg.home.min_night_pings);
    s.integer("min_weekend_pings", cfg.home.min_weekend_pings);
    s.integer("night_start_hour", cfg.home.night_start_hour);
    s.integer("night_end_hour", cfg.home.night_end_hour);
    s.finish();
  }
  {
    Section s = r.sub("stays");
    s.num("dist_threshold_m", cfg.stays.dist_threshold_m);
    s.num("min_dur_min", cfg.stays.min_dur_min);
    s.num("max_dur_min", cfg.stays.max_dur_min);
    s.integer("max_track_gap_s", cfg.stays.max_track_gap_s);
    s.num("max_food_dur_min", cfg.stays.max_food_dur_min);
    s.finish();
  }
  {
    Section s = r.sub("attribution");
    s.opt_num("radius_m", cfg.attribution.radius_m);
    s.boolean("primary_only", cfg.attribution.primary_only);
    s.finish();
  }
  {
    Section s = r.sub("routing");
    s.num("max_snap_m", cfg.metrics.routing.max_snap_m);
    s.finish();
  }
  {
    Section s = r.sub("metrics");
    s.num("home_based_radius_m", cfg.metrics.home_based_radius_m);
    std::string w(weighting_name(cfg.metrics.weighting));
    s.str("visited_weighting", w);
    if (w == "store") {
      cfg.metrics.weighting = VisitedWeighting::Store;
    } else if (w == "visit") {
      cfg.metrics.weighting = VisitedWeighting::Visit;
    } else {
      type_error("metrics.visited_weighting", "\"store\" or \"visit\"");
    }
    s.finish();
  }
  {
    Section s = r.sub("aggregate");
    s.num("hist_bin_m", cfg.aggregate.hist_bin_m);
    s.num("hist_max_m", cfg.aggregate.hist_max_m);
    s.num("grid_cell_m", cfg.aggregate.grid_cell_m);
    s.num("grid_max_m", cfg.aggregate.grid_max_m);
    std::string v = cfg.aggregate.grid_use_min ? "min" : "mean";
    s.str("grid_visited", v);
    if (v != "mean" && v != "min") type_error("aggregate.grid_visited", "\"mean\" or \"min\"");
    cfg.aggregate.grid_use_min = v == "min";
    s.num("rate_bin", cfg.aggregate.rate_bin);
    s.num("rate_max", cfg.aggregate.rate_max);
    s.finish();
  }
  {
    Section s = r.sub("sweep");
    s.num_list("radii", cfg.sweep.radii);
    s.finish();
  }
  {
    Section s = r.sub("synth");
    auto& p = cfg.synth;
    s.integer("seed", p.seed);
    s.integer("n_devices", p.n_devices);
    s.integer("n_outlets_per_category", p.n_outlets_per_category);
    s.num("grid_extent_m", p.grid_extent_m);
    s.num("road_spacing_m", p.road_spacing_m);
    read_latlon(s.sub("origin"), p.origin);
    s.integer("n_days", p.n_days);
    s.integer("cadence_s", p.cadence_s);
    s.num("noise_sigma_m", p.noise_sigma_m);
    s.num("noise_cap_m", p.noise_cap_m);
    s.num("speed_m_per_min", p.speed_m_per_min);
    s.num("fallback_share", p.fallback_share);
    s.num("worker_share", p.worker_share);
    s.num("weekday_food_rate", p.weekday_food_rate);
    s.num("evening_trip_rate", p.evening_trip_rate);
    s.num("weekend_food_rate", p.weekend_food_rate);
    s.opt_str("holiday", p.holiday);
    s.num("holiday_factor", p.holiday_factor);
    s.num("outlet_min_separation_m", p.outlet_min_separation_m);
    s.num("place_clearance_m", p.place_clearance_m);
    s.integer("tract_k", p.tract_k);
    s.num("other_accuracy_rate", p.other_accuracy_rate);
    s.finish();
  }
  {
    Section s = r.sub("degrade");
    s.num("dropout_p", cfg.degrade.params.dropout_p);
    s.integer("seed", cfg.degrade.params.seed);
    s.intervals("blackouts", cfg.degrade.params.blackouts);
    s.integer("blackout_period_s", cfg.degrade.blackout_period_s);
    s.integer("blackout_length_s", cfg.degrade.blackout_length_s);
    s.finish();
  }
  {
    Section s = r.sub("evaluate");
    s.num("home_hit_m", cfg.evaluate.home_hit_m);
    s.num("min_iou", cfg.evaluate.min_iou);
    s.num("max_centroid_m", cfg.evaluate.max_centroid_m);
    s.finish();
  }
  {
    Section s = r.sub("paths");
    s.opt_str("pings", cfg.paths.pings);
    s.opt_str("outlets", cfg.paths.outlets);
    s.opt_str("nodes", cfg.paths.nodes);
    s.opt_str("edges", cfg.paths.edges);
    s.opt_str("tracts", cfg.paths.tracts);
    s.opt_str("truth", cfg.paths.truth);
    s.finish();
  }
  r.finish();
  cfg.synth.timezone = cfg.study.timezone;
  cfg.synth.start_ts = cfg.study.window_start;
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(csv::read_file(path));
}

nlohmann::ordered_json config_to_json(const PipelineConfig& cfg) {
  using oj = nlohmann::ordered_json;
  auto opt = [](const auto& v) -> oj { return v ? oj(*v) : oj(nullptr); };
  oj j;
  j["study"] = {{"window_start", cfg.study.window_start},
                {"window_end", cfg.study.window_end},
                {"bbox",
                 {{"lat_min", cfg.study.bbox.lat_min},
                  {"lon_min", cfg.study.bbox.lon_min},
                  {"lat_max", cfg.study.bbox.lat_max},
                  {"lon_max", cfg.study.bbox.lon_max}}},
                {"timezone", cfg.study.timezone},
                {"grid_cell_m", cfg.study.grid_cell_m}};
  j["home"] = {{"min_night_pings", cfg.home.min_night_pings},
               {"min_weekend_pings", cfg.home.min_weekend_pings},
               {"night_start_hour", cfg.home.night_start_hour},
               {"night_end_hour", cfg.home.night_end_hour}};
  j["stays"] = {{"dist_threshold_m", cfg.stays.dist_threshold_m},
                {"min_dur_min", cfg.stays.min_dur_min},
                {"max_dur_min", cfg.stays.max_dur_min},
                {"max_track_gap_s", cfg.stays.max_track_gap_s},
                {"max_food_dur_min", cfg.stays.max_food_dur_min}};
  j["attribution"] = {{"radius_m", opt(cfg.attribution.radius_m)}, {"primary_only", cfg.attribution.primary_only}};
  j["routing"] = {{"max_snap_m", cfg.metrics.routing.max_snap_m}};
  j["metrics"] = {{"home_based_radius_m", cfg.metrics.home_based_radius_m},
                  {"visited_weighting", weighting_name(cfg.metrics.weighting)}};
  j["aggregate"] = {{"hist_bin_m", cfg.aggregate.hist_bin_m},   {"hist_max_m", cfg.aggregate.hist_max_m},
                    {"grid_cell_m", cfg.aggregate.grid_cell_m}, {"grid_max_m", cfg.aggregate.grid_max_m},
                    {"grid_visited", cfg.aggregate.grid_use_min ? "min" : "mean"},
                    {"rate_bin", cfg.aggregate.rate_bin},       {"rate_max", cfg.aggregate.rate_max}};
  j["sweep"] = {{"radii", cfg.sweep.radii}};
  const auto& p = cfg.synth;
  j["synth"] = {{"seed", p.seed},
                {"n_devices", p.n_devices},
                {"n_outlets_per_category", p.n_outlets_per_category},
                {"grid_extent_m", p.grid_extent_m},
                {"road_spacing_m", p.road_spacing_m},
                {"origin", {{"lat", p.origin.lat}, {"lon", p.origin.lon}}},
                {"n_days", p.n_days},
                {"cadence_s", p.cadence_s},
                {"noise_sigma_m", p.noise_sigma_m},
                {"noise_cap_m", p.noise_cap_m},
                {"speed_m_per_min", p.speed_m_per_min},
                {"fallback_share", p.fallback_share},
                {"worker_share", p.worker_share},
                {"weekday_food_rate", p.weekday_food_rate},
                {"evening_trip_rate", p.evening_trip_rate},
                {"weekend_food_rate", p.weekend_food_rate},
                {"holiday", opt(p.holiday)},
                {"holiday_factor", p.holiday_factor},
                {"outlet_min_separation_m", p.outlet_min_separation_m},
                {"place_clearance_m", p.place_clearance_m},
                {"tract_k", p.tract_k},
                {"other_accuracy_rate", p.other_accuracy_rate}};
  oj blackouts = oj::array();
  for (const auto& [a, b] : cfg.degrade.params.blackouts) blackouts.push_back({a, b});
  j["degrade"] = {{"dropout_p", cfg.degrade.params.dropout_p},
                  {"seed", cfg.degrade.params.seed},
                  {"blackouts", blackouts},
                  {"blackout_period_s", cfg.degrade.blackout_period_s},
                  {"blackout_length_s", cfg.degrade.blackout_length_s}};
  j["evaluate"] = {{"home_hit_m", cfg.evaluate.home_hit_m},
                   {"min_iou", cfg.evaluate.min_iou},
                   {"max_centroid_m", cfg.evaluate.max_centroid_m}};
  j["paths"] = {{"pings", opt(cfg.paths.pings)},   {"outlets", opt(cfg.paths.outlets)},
                {"nodes", opt(cfg.paths.nodes)},   {"edges", opt(cfg.paths.edges)},
                {"tracts", opt(cfg.paths.tracts)}, {"truth", opt(cfg.paths.truth)}};
  return j;
}

std::string config_hash(const PipelineConfig& cfg) {
  const std::string dump = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace forage
