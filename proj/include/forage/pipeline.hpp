#pragma once

#include <filesystem>
#include <span>
#include <string_view>

#include "forage/config.hpp"

namespace forage {

/// Stage names accepted by run_stage.
inline constexpr std::string_view kStages[] = {"ingest", "homes",  "stays",    "visits", "metrics",
                                               "aggregate", "sweep", "evaluate", "synth",  "all"};

bool is_stage(std::string_view name);

/// Runs one stage against `out`: reads the files earlier stages left there
/// (or the configured raw input paths), writes this stage's outputs, echoes
/// config.resolved.json and records a manifest under `out/_run/`. A missing
/// input file raises InputError naming it. `all` runs ingest through sweep
/// and then evaluate when a truth file is present.
void run_stage(std::string_view stage, const PipelineConfig& cfg, const std::filesystem::path& out);

}  // namespace forage
