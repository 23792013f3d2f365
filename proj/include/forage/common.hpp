#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace forage {

/// Fatal problem with an input file or config. The message names the
/// offending file, row or key.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

/// Outlet taxonomy. `All` is only used for aggregate metric rows.
enum class Category : std::uint8_t {
  LargeGrocery = 0,
  BigBox = 1,
  SmallHealthy = 2,
  ProcessedFood = 3,
  All = 4,
};

inline constexpr std::array<Category, 4> kOutletCategories = {
    Category::LargeGrocery, Category::BigBox, Category::SmallHealthy, Category::ProcessedFood};

inline constexpr std::array<Category, 5> kReportCategories = {
    Category::LargeGrocery, Category::BigBox, Category::SmallHealthy, Category::ProcessedFood,
    Category::All};

std::string_view category_name(Category c);
/// Two-letter code used in outlets.csv: LG, BB, SH, PF.
std::string_view category_code(Category c);
std::optional<Category> category_from_code(std::string_view code);
std::optional<Category> category_from_name(std::string_view name);

inline constexpr std::size_t category_index(Category c) { return static_cast<std::size_t>(c); }

}  // namespace forage
