// forage: staged food-acquisition analytics over GPS pings.
//
//   forage synth --out run/ --seed 7
//   forage all --out run/ --workers 8

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <sstream>

#include "forage/pipeline.hpp"

namespace {

std::vector<double> parse_radii(const std::string& text) {
  std::vector<double> radii;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !(r > 0.0)) {
      throw forage::InputError("--radii: '" + item + "' is not a positive number");
    }
    radii.push_back(r);
  }
  if (radii.empty()) throw forage::InputError("--radii: no radii given");
  return radii;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_pattern("[%l] %v");
  if (const char* level = std::getenv("FORAGE_LOG")) spdlog::cfg::helpers::load_levels(level);

  CLI::App app{"Food-acquisition metrics from GPS pings"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir = "forage_out", radii, timezone;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  bool primary_only = false, visit_weighted = false;

  for (auto stage : forage::kStages) {
    auto* sub = app.add_subcommand(std::string(stage), "run the " + std::string(stage) + " stage");
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--workers", workers, "worker threads (default: config, else 1)")->check(CLI::PositiveNumber);
    sub->add_option("--timezone", timezone, "IANA time zone for local-time rules");
    if (stage == "synth" || stage == "all") sub->add_option("--seed", seed, "synthetic world seed");
    if (stage == "sweep" || stage == "all") sub->add_option("--radii", radii, "comma-separated sweep radii in meters");
    if (stage == "visits" || stage == "metrics" || stage == "sweep" || stage == "all" || stage == "aggregate") {
      sub->add_flag("--primary-only", primary_only, "restrict to primary food-selling outlets");
    }
    if (stage == "metrics" || stage == "sweep" || stage == "all" || stage == "aggregate") {
      sub->add_flag("--visit-weighted", visit_weighted, "weight visited-store means by visit");
    }
  }
  CLI11_PARSE(app, argc, argv);
  const std::string stage = app.get_subcommands().front()->get_name();

  try {
    forage::PipelineConfig cfg = config_path.empty() ? forage::PipelineConfig{} : forage::load_config(config_path);
    if (workers > 0) cfg.workers = workers;
    if (seed) cfg.synth.seed = *seed;
    if (!radii.empty()) cfg.sweep.radii = parse_radii(radii);
    if (!timezone.empty()) cfg.study.timezone = cfg.synth.timezone = timezone;
    if (primary_only) cfg.attribution.primary_only = true;
    if (visit_weighted) cfg.metrics.weighting = forage::VisitedWeighting::Visit;
    forage::run_stage(stage, cfg, out_dir);
  } catch (const forage::InputError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", stage, e.what());
    return 1;
  }
  return 0;
}
