#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forage/geo.hpp"
#include "forage/home.hpp"
#include "forage/local_time.hpp"
#include "forage/metrics.hpp"
#include "forage/outlets.hpp"

namespace forage {

struct CategoryProfile {
  std::array<std::uint64_t, 24> hour_weekday{};
  std::array<std::uint64_t, 24> hour_weekend{};
  std::array<std::uint64_t, 7> day_of_week{};  ///< Monday first
  std::vector<std::uint64_t> daily;           ///< one entry per local day from TemporalProfile::first_day
  std::uint64_t total = 0;
};

struct TemporalProfile {
  std::int64_t first_day = 0;  ///< civil day number of daily[0]
  std::array<CategoryProfile, 5> categories;  ///< indexed by category_index, All last

  const CategoryProfile& of(Category c) const { return categories[category_index(c)]; }
};

/// Bins each visit by the local hour and weekday of its start. The daily
/// series spans every local day of [window_start, window_end) and is widened
/// if a visit falls outside, so all three views always sum to the total.
TemporalProfile temporal_profile(std::span<const FoodVisit> visits, const LocalClock& clock, std::int64_t window_start,
                                 std::int64_t window_end);

struct TractAggregate {
  std::string tract_id;
  Category category = Category::All;
  std::uint64_t n_sampled_homes = 0;
  std::optional<double> population;
  std::optional<double> sampling_rate;
  std::optional<double> mean_nearest_euclid_m;
  std::optional<double> mean_visited_euclid_m;
  std::optional<double> diff_euclid_m;
  std::optional<double> mean_nearest_network_m;
  std::optional<double> mean_visited_network_m;
  std::optional<double> diff_network_m;
};

struct TractAggregation {
  std::vector<TractAggregate> rows;  ///< tract order, then category order
  std::uint64_t total_homes = 0;
  std::uint64_t homes_outside = 0;
};

/// Assigns every home to its tract and averages the metric records of the
/// devices in each tract (unweighted). Tracts without population omit the
/// sampling rate.
TractAggregation tract_aggregates(std::span<const MetricsRecord> records, const HomeMap& homes, const TractSet& tracts);

struct Histogram {
  double bin_width = 0.0;
  double max_value = 0.0;
  std::vector<std::uint64_t> counts;  ///< [k*w, (k+1)*w), last bin ends at max_value
  std::uint64_t overflow = 0;         ///< values >= max_value
  std::uint64_t total = 0;

  double bin_lo(std::size_t k) const { return static_cast<double>(k) * bin_width; }
  double bin_hi(std::size_t k) const;
  /// count / (total * bin_width); zero when empty.
  double density(std::size_t k) const;
};

/// Left-closed right-open bins; throws std::invalid_argument for a
/// non-positive width or a negative value.
Histogram distance_histogram(std::span<const double> values, double bin_width, double max_value);

struct DensityGrid {
  double cell = 0.0;
  double max_value = 0.0;
  std::size_t n = 0;                  ///< cells per axis
  std::vector<std::uint64_t> counts;  ///< row-major, index iy * n + ix
  std::uint64_t overflow = 0;         ///< pairs with either coordinate >= max
  std::uint64_t total = 0;

  std::uint64_t at(std::size_t ix, std::size_t iy) const { return counts[iy * n + ix]; }
  /// Pairs that landed in a cell strictly below the diagonal (iy < ix).
  std::uint64_t mass_below_diagonal() const;
};

/// 2D histogram of (x = nearest, y = visited) distance pairs.
DensityGrid density_grid(std::span<const std::pair<double, double>> pairs, double cell, double max_value);

}  // namespace forage
