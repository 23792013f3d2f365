#include "forage/outlets.hpp"

#include <algorithm>

#include "forage/parallel.hpp"

namespace forage {

double category_default_radius(Category c) {
  switch (c) {
    case Category::LargeGrocery: return 150.0;
    case Category::BigBox: return 200.0;
    case Category::SmallHealthy: return 50.0;
    case Category::ProcessedFood: return 50.0;
    case Category::All: break;
  }
  throw std::invalid_argument("no default radius for category All");
}

OutletCatalog::OutletCatalog(std::vector<FoodOutlet> outlets) : outlets_(std::move(outlets)) {
  std::sort(outlets_.begin(), outlets_.end(),
            [](const FoodOutlet& a, const FoodOutlet& b) { return a.outlet_id < b.outlet_id; });
  by_id_.reserve(outlets_.size());
  for (std::uint32_t i = 0; i < outlets_.size(); ++i) {
    const auto& o = outlets_[i];
    if (!(o.radius_m > 0.0)) throw InputError("outlet '" + o.outlet_id + "' has non-positive radius");
    if (o.category == Category::All) throw InputError("outlet '" + o.outlet_id + "' has no concrete category");
    if (!by_id_.emplace(o.outlet_id, i).second) throw InputError("duplicate outlet_id '" + o.outlet_id + "'");
    max_radius_m_ = std::max(max_radius_m_, o.radius_m);
  }
}

std::optional<std::size_t> OutletCatalog::find(std::string_view outlet_id) const {
  auto it = by_id_.find(absl::string_view(outlet_id.data(), outlet_id.size()));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

OutletCatalog OutletCatalog::filtered(bool primary_only) const {
  if (!primary_only) return *this;
  std::vector<FoodOutlet> kept;
  for (const auto& o : outlets_) {
    if (o.primary_food) kept.push_back(o);
  }
  return OutletCatalog(std::move(kept));
}

OutletCatalog OutletCatalog::of_category(Category c) const {
  if (c == Category::All) return *this;
  std::vector<FoodOutlet> kept;
  for (const auto& o : outlets_) {
    if (o.category == c) kept.push_back(o);
  }
  return OutletCatalog(std::move(kept));
}

std::string_view home_based_name(HomeBased h) {
  switch (h) {
    case HomeBased::Yes: return "yes";
    case HomeBased::No: return "no";
    case HomeBased::UnknownOrigin: return "unknown";
  }
  return "unknown";
}

std::optional<HomeBased> home_based_from_name(std::string_view s) {
  if (s == "yes") return HomeBased::Yes;
  if (s == "no") return HomeBased::No;
  if (s == "unknown") return HomeBased::UnknownOrigin;
  return std::nullopt;
}

CellIndex build_outlet_index(const OutletCatalog& catalog, double max_radius_m) {
  std::vector<LatLon> pts;
  pts.reserve(catalog.size());
  for (const auto& o : catalog.outlets()) pts.push_back(o.pos);
  return CellIndex(pts, 250.0, std::max(max_radius_m, catalog.max_radius_m()));
}

std::vector<FoodVisit> attribute_visits(std::span<const StayPoint> stays, const OutletCatalog& catalog,
                                        const CellIndex& index, std::optional<double> radius_override,
                                        int workers) {
  std::vector<std::optional<FoodVisit>> slots(stays.size());
  const double search_r = radius_override ? *radius_override : catalog.max_radius_m();
  if (!catalog.empty() && search_r > 0.0) {
    parallel_for(stays.size(), workers, [&](std::size_t i) {
      const StayPoint& s = stays[i];
      std::optional<CellIndex::Hit> best;
      // Hits come back in ascending id (= outlet_id) order, so strict < keeps
      // the smallest outlet_id on distance ties.
      for (const auto& h : index.query_within_dist(s.centroid, search_r)) {
        const double r = radius_override ? *radius_override : catalog[h.id].radius_m;
        if (h.distance_m > r) continue;
        if (!best || h.distance_m < best->distance_m) best = h;
      }
      if (!best) return;
      const FoodOutlet& o = catalog[best->id];
      FoodVisit v;
      v.visit_id = "v:" + s.stay_id;
      v.device_id = s.device_id;
      v.outlet_id = o.outlet_id;
      v.stay_id = s.stay_id;
      v.start_ts = s.start_ts;
      v.end_ts = s.end_ts;
      v.distance_m = best->distance_m;
      v.category = o.category;
      v.primary_food = o.primary_food;
      slots[i] = std::move(v);
    });
  }
  std::vector<FoodVisit> visits;
  for (auto& v : slots) {
    if (v) visits.push_back(std::move(*v));
  }
  std::sort(visits.begin(), visits.end(), [](const FoodVisit& a, const FoodVisit& b) { return a.stay_id < b.stay_id; });
  return visits;
}

std::vector<FoodVisit> filter_primary(std::span<const FoodVisit> visits, bool primary_only) {
  std::vector<FoodVisit> out;
  out.reserve(visits.size());
  for (const auto& v : visits) {
    if (!primary_only || v.primary_food) out.push_back(v);
  }
  return out;
}

}  // namespace forage
