#include "forage/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <fstream>

#include "forage/csv.hpp"
#include "forage/ingest.hpp"
#include "forage/io.hpp"
#include "forage/robustness.hpp"
#include "forage/spatiotemporal.hpp"

namespace forage {

namespace fs = std::filesystem;
using oj = nlohmann::ordered_json;

bool is_stage(std::string_view name) {
  return std::find(std::begin(kStages), std::end(kStages), name) != std::end(kStages);
}

namespace {

// Bookkeeping for one stage: input checks, output writes and the manifest.
class StageRun {
 public:
  StageRun(std::string_view name, const PipelineConfig& cfg, fs::path out)
      : name_(name), cfg_(cfg), out_(std::move(out)), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(out_);
  }

  fs::path input(const std::optional<std::string>& configured, std::string_view default_name) const {
    return configured ? fs::path(*configured) : out_ / default_name;
  }

  const fs::path& require(const fs::path& p) {
    if (!fs::is_regular_file(p)) {
      throw InputError(name_ + ": missing input file " + p.string());
    }
    inputs_.push_back({{"path", p.string()}, {"bytes", fs::file_size(p)}});
    return p;
  }

  std::string read(const fs::path& p) { return csv::read_file(require(p)); }

  void write(std::string_view file, std::string_view content) {
    io::write_file(out_ / file, content);
    record(file, content);
  }

  template <class Fn>
  void write_stream(std::string_view file, std::uint64_t rows, Fn&& fn) {
    const fs::path path = out_ / file;
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw InputError("cannot write " + path.string());
      fn(os);
      if (!os) throw InputError("cannot write " + path.string());
    }
    fs::rename(tmp, path);
    outputs_.push_back({{"path", std::string(file)}, {"rows", rows}});
  }

  void write_json(std::string_view file, const oj& j) {
    io::write_json(out_ / file, j);
    outputs_.push_back({{"path", std::string(file)}, {"rows", nullptr}});
  }

  void finish() {
    io::write_json(out_ / "config.resolved.json", config_to_json(cfg_));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    oj manifest = {{"stage", name_},
                   {"config_hash", config_hash(cfg_)},
                   {"workers", cfg_.workers},
                   {"wall_time_s", secs},
                   {"inputs", inputs_},
                   {"outputs", outputs_}};
    io::write_json(out_ / "_run" / (name_ + ".json"), manifest);
    spdlog::info("{}: done in {:.2f} s", name_, secs);
  }

  const fs::path& out() const { return out_; }

 private:
  void record(std::string_view file, std::string_view content) {
    oj rows = nullptr;
    if (file.ends_with(".csv")) {
      const auto lines = static_cast<std::uint64_t>(std::count(content.begin(), content.end(), '\n'));
      rows = lines > 0 ? lines - 1 : 0;
    }
    outputs_.push_back({{"path", std::string(file)}, {"rows", rows}});
  }

  std::string name_;
  const PipelineConfig& cfg_;
  fs::path out_;
  std::chrono::steady_clock::time_point start_;
  oj inputs_ = oj::array();
  oj outputs_ = oj::array();
};

struct RawInputs {
  fs::path pings, outlets, nodes, edges, tracts, truth;
};

RawInputs raw_inputs(const StageRun& run, const PipelineConfig& cfg) {
  return {run.input(cfg.paths.pings, "pings.csv"),   run.input(cfg.paths.outlets, "outlets.csv"),
          run.input(cfg.paths.nodes, "nodes.csv"),   run.input(cfg.paths.edges, "edges.csv"),
          run.input(cfg.paths.tracts, "tracts.geojson"), run.input(cfg.paths.truth, "truth.json")};
}

PingParseResult read_clean_pings(StageRun& run, const PipelineConfig& cfg) {
  const std::string text = run.read(run.out() / "pings_clean.csv");
  return parse_pings(text, cfg.study, cfg.workers);
}

void stage_ingest(const PipelineConfig& cfg, const fs::path& out) {
  StageRun run("ingest", cfg, out);
  const auto in = raw_inputs(run, cfg);
  PingParseResult pings;
  {
    const std::string text = run.read(in.pings);
    pings = parse_pings(text, cfg.study, cfg.workers);
  }
  const auto catalog = load_outlets(run.read(in.outlets));
  const auto graph = load_road_graph(run.read(in.nodes), run.read(in.edges));
  const auto tracts = load_tracts(run.read(in.tracts));
  spdlog::info("ingest: {} of {} rows retained, {} devices", pings.retained, pings.total_rows, pings.devices.size());
  run.write_stream("pings_clean.csv", pings.retained, [&](std::ostream& os) { io::write_pings(os, pings.devices); });
  run.write_json("ingest_report.json", io::ingest_report_json(pings, catalog.size(), graph.node_count(),
                                                              graph.arc_count(), tracts.size()));
  run.finish();
}

void stage_homes(const PipelineConfig& cfg, const fs::path& out) {
  StageRun run("homes", cfg, out);
  const auto pings = read_clean_pings(run, cfg);
  const auto inf = infer_all_homes(pings.devices, cfg.study, cfg.home, cfg.workers);
  spdlog::info("homes: {} of {} devices have a home", inf.homes.size(), inf.report.n_devices);
  run.write("homes.csv", io::homes_csv(inf.homes));
  run.write_json("home_coverage.json", io::coverage_json(inf.report));
  run.finish();
}

void stage_stays(const PipelineConfig& cfg, const fs::path& out) {
  StageRun run("stays", cfg, out);
  const auto pings = read_clean_pings(run, cfg);
  const auto stays = detect_all_stays(pings.devices, cfg.stays, cfg.workers);
  spdlog::info("stays: {} stays", stays.size());
  run.write("stays.csv", io::stays_csv(stays));
  run.finish();
}

void stage_visits(const PipelineConfig& cfg, const fs::path& out) {
  StageRun run("visits", cfg, out);
  const auto in = raw_inputs(run, cfg);
  const auto stays = io::parse_stays(run.read(out / "stays.csv"));
  const auto homes = io::parse_homes(run.read(out / "homes.csv"));
  const auto catalog = load_outlets(run.read(in.outlets));

  const auto food = filter_food_candidates(stays, cfg.stays.max_food_dur_min);
  const double max_r = std::max(catalog.max_radius_m(), cfg.attribution.radius_m.value_or(0.0));
  const auto index = build_outlet_index(catalog, std::max(max_r, 1000.0));
  auto visits = attribute_visits(food, catalog, index, cfg.attribution.radius_m, cfg.workers);
  assign_home_based(visits, StayIndex(stays), homes, cfg.metrics.home_based_radius_m);
  if (cfg.attribution.primary_only) visits = filter_primary(visits, true);
  spdlog::info("visits: {} visits from {} food-candidate stays", visits.size(), food.size());
  run.write("visits.csv", io::visits_csv(visits));
  run.finish();
}

void stage_metrics(const PipelineConfig& cfg, const fs::path& out) {
  StageRun run("metrics", cfg, out);
  const auto in = raw_inputs(run, cfg);
  const auto visits = io::parse_visits(run.read(out / "visits.csv"));
  const auto homes = io::parse_homes(run.read(out / "homes.csv"));
  const auto catalog = load_outlets(run.read(in.outlets));
  const auto graph = load_road_graph(run.read(in.nodes), run.read(in.edges));
  const auto scope = cfg.attribution.primary_only ? MetricsScope::PrimaryOnly : MetricsScope::All;
  const auto result = compute_metrics(visits, homes, catalog, graph, scope, cfg.metrics, cfg.workers);
  const auto summary = summarize_population(result.records, scope, cfg.metrics.weighting);
  spdlog::info("metrics: {} records, {} unsnappable and {} unreachable of {} pairs", result.records.size(),
               result.diagnostics.n_unsnappable, result.diagnostics.n_unreachable, result.diagnostics.n_pairs);
  run.write("metrics.csv", io::metrics_csv(result.records));
  run.write_json("summary.json", io::summary_json(summary));
  run.write_json("routing_diagnostics.json", io::diagnostics_json(result.diagnostics));
  run.finish();
}

void stage_aggregate(const PipelineConfig& cfg, const fs::path& out) {
  StageRun run("aggregate", cfg, out);
  const auto in = raw_inputs(run, cfg);
  const auto visits = io::parse_visits(run.read(out / "visits.csv"));
  const auto records = io::parse_metrics(run.read(out / "metrics.csv"));
  const auto homes = io::parse_homes(run.read(out / "homes.csv"));
  const auto tracts = load_tracts(run.read(in.tracts));
  const LocalClock clock(cfg.study.timezone);
  const auto& ag = cfg.aggregate;

  run.write("temporal_profile.csv",
            io::temporal_profile_csv(temporal_profile(visits, clock, cfg.study.window_start, cfg.study.window_end)));

  const auto tract_agg = tract_aggregates(records, homes, tracts);
  run.write("tract_aggregates.csv", io::tract_aggregates_csv(tract_agg));

  std::vector<Category> cats;
  for (const auto& r : records) {
    if (std::find(cats.begin(), cats.end(), r.category) == cats.end()) cats.push_back(r.category);
  }
  std::sort(cats.begin(), cats.end());

  auto hist_of = [&](std::string_view file, auto field) {
    std::vector<std::pair<Category, Histogram>> hists;
    for (auto c : cats) {
      std::vector<double> values;
      for (const auto& r : records) {
        if (r.category != c) continue;
        if (auto v = field(r)) values.push_back(*v);
      }
      hists.emplace_back(c, distance_histogram(values, ag.hist_bin_m, ag.hist_max_m));
    }
    run.write(file, io::histogram_csv(hists));
  };
  hist_of("hist_nearest_euclid.csv", [](const MetricsRecord& r) { return r.nearest_store_euclid_m; });
  hist_of("hist_visited_euclid.csv", [](const MetricsRecord& r) { return r.mean_visited_euclid_m; });
  hist_of("hist_nearest_network.csv", [](const MetricsRecord& r) { return r.nearest_store_network_m; });
  hist_of("hist_visited_network.csv", [](const MetricsRecord& r) { return r.mean_visited_network_m; });

  std::vector<double> rates;
  for (const auto& r : tract_agg.rows) {
    if (r.category == Category::All && r.sampling_rate) rates.push_back(*r.sampling_rate);
  }
  const std::pair<Category, Histogram> rate_hist[] = {
      {Category::All, distance_histogram(rates, ag.rate_bin, ag.rate_max)}};
  run.write("hist_sampling_rate.csv", io::histogram_csv(rate_hist));

  std::vector<std::pair<Category, DensityGrid>> grids;
  oj grid_report = oj::array();
  for (auto c : cats) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& r : records) {
      if (r.category != c || r.n_visits == 0) continue;
      const auto& y = ag.grid_use_min ? r.min_visited_euclid_m : r.mean_visited_euclid_m;
      if (r.nearest_store_euclid_m && y) pairs.emplace_back(*r.nearest_store_euclid_m, *y);
    }
    grids.emplace_back(c, density_grid(pairs, ag.grid_cell_m, ag.grid_max_m));
    const auto& g = grids.back().second;
    grid_report.push_back({{"category", category_code(c)},
                           {"n_pairs", g.total},
                           {"overflow", g.overflow},
                           {"below_diagonal", g.mass_below_diagonal()}});
  }
  run.write("density_grid.csv", io::density_grid_csv(grids));
  run.write_json("aggregate_report.json", {{"total_homes", tract_agg.total_homes},
                                           {"homes_outside_tracts", tract_agg.homes_outside},
                                           {"density_grid_visited", ag.grid_use_min ? "min" : "mean"},
                                           {"density_grid", grid_report}});
  run.finish();
}

void stage_sweep(const PipelineConfig& cfg, const fs::path& out) {
  StageRun run("sweep", cfg, out);
  const auto in = raw_inputs(run, cfg);
  const auto stays = io::parse_stays(run.read(out / "stays.csv"));
  const auto homes = io::parse_homes(run.read(out / "homes.csv"));
  const auto catalog = load_outlets(run.read(in.outlets));
  const auto graph = load_road_graph(run.read(in.nodes), run.read(in.edges));
  const auto food = filter_food_candidates(stays, cfg.stays.max_food_dur_min);
  const SweepInputs sin{stays, food, homes, catalog, graph, cfg.metrics, cfg.workers};
  run.write("sweep_radius.csv", io::sweep_csv(radius_sweep(sin, cfg.sweep.radii)));
  run.write("sweep_inclusion.csv", io::sweep_csv(inclusion_comparison(sin)));
  run.finish();
}

void stage_evaluate(const PipelineConfig& cfg, const fs::path& out) {
  StageRun run("evaluate", cfg, out);
  const auto in = raw_inputs(run, cfg);
  const auto stays = io::parse_stays(run.read(out / "stays.csv"));
  const auto visits = io::parse_visits(run.read(out / "visits.csv"));
  const auto homes = io::parse_homes(run.read(out / "homes.csv"));
  const auto truth = io::parse_truth(run.read(in.truth));
  const auto report = evaluate(stays, visits, homes, truth, cfg.evaluate);
  run.write_json("eval_report.json", io::eval_json(report));
  run.finish();
}

void stage_synth(const PipelineConfig& cfg, const fs::path& out) {
  StageRun run("synth", cfg, out);
  auto world = generate_world(cfg.synth, cfg.workers);
  if (!cfg.study.bbox.contains(world.extent.south_west()) ||
      !cfg.study.bbox.contains({world.extent.lat_max, world.extent.lon_max})) {
    spdlog::warn("synth: world extent is not inside study.bbox; ingest will drop pings");
  }
  if (cfg.degrade.active()) {
    DegradeParams dp = cfg.degrade.params;
    if (cfg.degrade.blackout_period_s > 0) {
      const auto periodic = periodic_blackouts(cfg.synth.start_ts, cfg.study.window_end, cfg.degrade.blackout_period_s,
                                               cfg.degrade.blackout_length_s);
      dp.blackouts.insert(dp.blackouts.end(), periodic.begin(), periodic.end());
    }
    const auto before = world.pings.size();
    world.pings = degrade(world.pings, dp);
    spdlog::info("synth: degrade kept {} of {} pings", world.pings.size(), before);
  }
  spdlog::info("synth: {} devices, {} pings, {} outlets, {} nodes", world.device_ids.size(), world.pings.size(),
               world.outlets.size(), world.nodes.size());
  run.write_stream("pings.csv", world.pings.size(),
                   [&](std::ostream& os) { io::write_synth_pings(os, world.pings, world.device_ids); });
  run.write("outlets.csv", io::outlets_csv(world.outlets));
  run.write("nodes.csv", io::nodes_csv(world.nodes));
  run.write("edges.csv", io::edges_csv(world.edges));
  run.write("tracts.geojson", io::tracts_geojson(world.tracts));
  run.write_json("truth.json", io::truth_json(world.truth));
  run.finish();
}

}  // namespace

void run_stage(std::string_view stage, const PipelineConfig& cfg, const fs::path& out) {
  cfg.validate();
  if (stage == "ingest") return stage_ingest(cfg, out);
  if (stage == "homes") return stage_homes(cfg, out);
  if (stage == "stays") return stage_stays(cfg, out);
  if (stage == "visits") return stage_visits(cfg, out);
  if (stage == "metrics") return stage_metrics(cfg, out);
  if (stage == "aggregate") return stage_aggregate(cfg, out);
  if (stage == "sweep") return stage_sweep(cfg, out);
  if (stage == "evaluate") return stage_evaluate(cfg, out);
  if (stage == "synth") return stage_synth(cfg, out);
  if (stage == "all") {
    for (auto s : {"ingest", "homes", "stays", "visits", "metrics", "aggregate", "sweep"}) run_stage(s, cfg, out);
    const fs::path truth = cfg.paths.truth ? fs::path(*cfg.paths.truth) : out / "truth.json";
    if (fs::is_regular_file(truth)) run_stage("evaluate", cfg, out);
    return;
  }
  throw InputError("unknown stage '" + std::string(stage) + "'");
}

}  // namespace forage
