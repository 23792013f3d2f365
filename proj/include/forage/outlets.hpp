#pragma once

#include <absl/container/flat_hash_map.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forage/common.hpp"
#include "forage/geo.hpp"
#include "forage/staypoints.hpp"

namespace forage {

struct FoodOutlet {
  std::string outlet_id;
  std::string name;
  LatLon pos;
  Category category = Category::LargeGrocery;
  bool primary_food = false;
  double radius_m = 0.0;
};

/// Attribution radius per category: 150 m large groceries, 200 m big-box,
/// 50 m small healthy and processed-food outlets.
double category_default_radius(Category c);

/// Immutable outlet set, ordered by outlet_id so that position order is id
/// order.
class OutletCatalog {
 public:
  OutletCatalog() = default;
  /// Throws InputError on duplicate outlet_id or non-positive radius.
  explicit OutletCatalog(std::vector<FoodOutlet> outlets);

  const std::vector<FoodOutlet>& outlets() const { return outlets_; }
  std::size_t size() const { return outlets_.size(); }
  bool empty() const { return outlets_.empty(); }
  const FoodOutlet& operator[](std::size_t i) const { return outlets_[i]; }

  std::optional<std::size_t> find(std::string_view outlet_id) const;
  double max_radius_m() const { return max_radius_m_; }

  OutletCatalog filtered(bool primary_only) const;
  OutletCatalog of_category(Category c) const;

 private:
  std::vector<FoodOutlet> outlets_;
  absl::flat_hash_map<std::string, std::uint32_t> by_id_;
  double max_radius_m_ = 0.0;
};

enum class HomeBased : std::uint8_t { Yes, No, UnknownOrigin };

std::string_view home_based_name(HomeBased h);
std::optional<HomeBased> home_based_from_name(std::string_view s);

struct FoodVisit {
  std::string visit_id;
  std::string device_id;
  std::string outlet_id;
  std::string stay_id;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  double distance_m = 0.0;  ///< stay centroid to outlet
  HomeBased home_based = HomeBased::UnknownOrigin;
  Category category = Category::LargeGrocery;
  bool primary_food = false;
};

/// Cell index over outlet positions.
CellIndex build_outlet_index(const OutletCatalog& catalog, double max_radius_m = 1000.0);

/// One visit per stay at most: the in-radius outlet closest to the stay
/// centroid, ties to the smallest outlet_id. The effective radius is the
/// override when given, otherwise the outlet's own radius. Output is sorted
/// by stay_id.
std::vector<FoodVisit> attribute_visits(std::span<const StayPoint> stays, const OutletCatalog& catalog,
                                        const CellIndex& index, std::optional<double> radius_override,
                                        int workers = 1);

std::vector<FoodVisit> filter_primary(std::span<const FoodVisit> visits, bool primary_only);

}  // namespace forage
