#include "forage/robustness.hpp"

#include <cmath>

namespace forage {

std::string_view sweep_axis_name(SweepAxis a) { return a == SweepAxis::Radius ? "radius" : "inclusion"; }

namespace {

SweepResult run_setting(const SweepInputs& in, const StayIndex& stay_index, const CellIndex& index, SweepAxis axis,
                        std::string label, std::optional<double> radius, MetricsScope scope) {
  SweepResult r;
  r.axis = axis;
  r.label = std::move(label);
  r.radius_m = radius;
  r.scope = scope;
  r.visits = attribute_visits(in.food_stays, in.catalog, index, radius, in.workers);
  assign_home_based(r.visits, stay_index, in.homes, in.params.home_based_radius_m);
  if (scope == MetricsScope::PrimaryOnly) r.visits = filter_primary(r.visits, true);
  const auto metrics = compute_metrics(r.visits, in.homes, in.catalog, in.graph, scope, in.params, in.workers);
  r.summary = summarize_population(metrics.records, scope, in.params.weighting);
  return r;
}

std::string radius_label(double r) {
  const double rounded = std::round(r);
  if (rounded == r) return "r=" + std::to_string(static_cast<long long>(rounded)) + "m";
  return "r=" + std::to_string(r) + "m";
}

}  // namespace

std::vector<SweepResult> radius_sweep(const SweepInputs& in, std::span<const double> radii) {
  double max_r = in.catalog.max_radius_m();
  for (double r : radii) max_r = std::max(max_r, r);
  const CellIndex index = build_outlet_index(in.catalog, max_r);
  const StayIndex stay_index(in.all_stays);
  std::vector<SweepResult> out;
  out.reserve(radii.size());
  for (double r : radii) {
    out.push_back(run_setting(in, stay_index, index, SweepAxis::Radius, radius_label(r), r, MetricsScope::All));
  }
  return out;
}

std::vector<SweepResult> inclusion_comparison(const SweepInputs& in) {
  const CellIndex index = build_outlet_index(in.catalog);
  const StayIndex stay_index(in.all_stays);
  std::vector<SweepResult> out;
  out.push_back(run_setting(in, stay_index, index, SweepAxis::Inclusion, "all", std::nullopt, MetricsScope::All));
  out.push_back(run_setting(in, stay_index, index, SweepAxis::Inclusion, "primary_only", std::nullopt,
                            MetricsScope::PrimaryOnly));
  return out;
}

}  // namespace forage
