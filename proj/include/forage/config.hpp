#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forage/home.hpp"
#include "forage/metrics.hpp"
#include "forage/staypoints.hpp"
#include "forage/synth.hpp"
#include "forage/track.hpp"

namespace forage {

struct AttributionConfig {
  std::optional<double> radius_m;  ///< uniform override; per-category defaults when unset
  bool primary_only = false;
};

struct AggregateConfig {
  double hist_bin_m = 500.0;
  double hist_max_m = 20000.0;
  double grid_cell_m = 500.0;
  double grid_max_m = 20000.0;
  bool grid_use_min = false;  ///< y axis: minimum instead of mean visited distance
  double rate_bin = 0.01;
  double rate_max = 0.5;
};

struct SweepConfig {
  std::vector<double> radii{50.0, 100.0, 150.0, 200.0};
};

struct DegradeConfig {
  DegradeParams params;
  std::int64_t blackout_period_s = 0;  ///< 0 disables periodic blackouts
  std::int64_t blackout_length_s = 0;

  bool active() const { return params.dropout_p > 0.0 || !params.blackouts.empty() || blackout_period_s > 0; }
};

/// Input file overrides; unset paths resolve inside the output directory.
struct PathsConfig {
  std::optional<std::string> pings, outlets, nodes, edges, tracts, truth;
};

struct PipelineConfig {
  StudyConfig study;
  HomeParams home;
  StayParams stays;
  AttributionConfig attribution;
  MetricsParams metrics;
  AggregateConfig aggregate;
  SweepConfig sweep;
  SynthParams synth;  ///< timezone and start_ts follow the study section
  DegradeConfig degrade;
  EvalParams evaluate;
  PathsConfig paths;
  int workers = 1;

  /// Throws InputError naming the offending key.
  void validate() const;
};

/// Parses a JSON config. Missing keys keep their defaults; unknown keys and
/// type mismatches throw InputError with the dotted key path.
PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Fully resolved config as JSON. `workers` is left out so that runs with
/// different worker counts echo identical files.
nlohmann::ordered_json config_to_json(const PipelineConfig& cfg);

/// Hex FNV-1a of the resolved config dump.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace forage
