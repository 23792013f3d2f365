#include "forage/common.hpp"

namespace forage {

std::string_view category_name(Category c) {
  switch (c) {
    case Category::LargeGrocery: return "LargeGrocery";
    case Category::BigBox: return "BigBox";
    case Category::SmallHealthy: return "SmallHealthy";
    case Category::ProcessedFood: return "ProcessedFood";
    case Category::All: return "All";
  }
  return "Unknown";
}

std::string_view category_code(Category c) {
  switch (c) {
    case Category::LargeGrocery: return "LG";
    case Category::BigBox: return "BB";
    case Category::SmallHealthy: return "SH";
    case Category::ProcessedFood: return "PF";
    case Category::All: return "ALL";
  }
  return "??";
}

std::optional<Category> category_from_code(std::string_view code) {
  for (auto c : kOutletCategories) {
    if (category_code(c) == code) return c;
  }
  return std::nullopt;
}

std::optional<Category> category_from_name(std::string_view name) {
  for (auto c : kReportCategories) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

}  // namespace forage
