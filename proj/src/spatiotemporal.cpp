#include "forage/spatiotemporal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forage {

TemporalProfile temporal_profile(std::span<const FoodVisit> visits, const LocalClock& clock, std::int64_t window_start,
                                 std::int64_t window_end) {
  std::int64_t first = clock.at(window_start).day;
  std::int64_t last = clock.at(std::max(window_start, window_end - 1)).day;
  for (const auto& v : visits) {
    const auto d = clock.at(v.start_ts).day;
    first = std::min(first, d);
    last = std::max(last, d);
  }
  TemporalProfile p;
  p.first_day = first;
  const auto n_days = static_cast<std::size_t>(last - first + 1);
  for (auto& c : p.categories) c.daily.assign(n_days, 0);

  for (const auto& v : visits) {
    const LocalTime lt = clock.at(v.start_ts);
    for (auto slot : {category_index(v.category), category_index(Category::All)}) {
      auto& c = p.categories[slot];
      auto& hours = lt.is_weekend() ? c.hour_weekend : c.hour_weekday;
      ++hours[static_cast<std::size_t>(lt.hour)];
      ++c.day_of_week[static_cast<std::size_t>(lt.weekday)];
      ++c.daily[static_cast<std::size_t>(lt.day - first)];
      ++c.total;
    }
  }
  return p;
}

namespace {

struct MeanAcc {
  double sum = 0.0;
  std::uint64_t n = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<double> get() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

std::optional<double> diff(const std::optional<double>& visited, const std::optional<double>& nearest) {
  if (!visited || !nearest) return std::nullopt;
  return *visited - *nearest;
}

}  // namespace

TractAggregation tract_aggregates(std::span<const MetricsRecord> records, const HomeMap& homes, const TractSet& tracts) {
  TractAggregation out;
  std::vector<std::uint64_t> home_count(tracts.size(), 0);
  absl::flat_hash_map<std::string_view, std::size_t> tract_of;
  for (const auto& [id, h] : homes) {
    ++out.total_homes;
    if (auto t = tracts.locate(h.centroid)) {
      ++home_count[*t];
      tract_of.emplace(id, *t);
    } else {
      ++out.homes_outside;
    }
  }

  std::array<bool, 5> present{};
  for (const auto& r : records) present[category_index(r.category)] = true;
  if (records.empty()) present[category_index(Category::All)] = true;

  struct Acc {
    MeanAcc ne, ve, nn, vn;
  };
  std::vector<std::array<Acc, 5>> acc(tracts.size());
  for (const auto& r : records) {
    auto it = tract_of.find(r.device_id);
    if (it == tract_of.end()) continue;
    auto& a = acc[it->second][category_index(r.category)];
    a.ne.add(r.nearest_store_euclid_m);
    a.ve.add(r.mean_visited_euclid_m);
    a.nn.add(r.nearest_store_network_m);
    a.vn.add(r.mean_visited_network_m);
  }

  for (std::size_t t = 0; t < tracts.size(); ++t) {
    const Tract& tract = tracts.tracts()[t];
    for (auto cat : kReportCategories) {
      if (!present[category_index(cat)]) continue;
      const auto& a = acc[t][category_index(cat)];
      TractAggregate row;
      row.tract_id = tract.id;
      row.category = cat;
      row.n_sampled_homes = home_count[t];
      row.population = tract.population;
      if (tract.population && *tract.population > 0.0) {
        row.sampling_rate = static_cast<double>(home_count[t]) / *tract.population;
      }
      row.mean_nearest_euclid_m = a.ne.get();
      row.mean_visited_euclid_m = a.ve.get();
      row.diff_euclid_m = diff(row.mean_visited_euclid_m, row.mean_nearest_euclid_m);
      row.mean_nearest_network_m = a.nn.get();
      row.mean_visited_network_m = a.vn.get();
      row.diff_network_m = diff(row.mean_visited_network_m, row.mean_nearest_network_m);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

double Histogram::bin_hi(std::size_t k) const {
  return std::min(max_value, static_cast<double>(k + 1) * bin_width);
}

double Histogram::density(std::size_t k) const {
  if (total == 0) return 0.0;
  return static_cast<double>(counts[k]) / (static_cast<double>(total) * (bin_hi(k) - bin_lo(k)));
}

Histogram distance_histogram(std::span<const double> values, double bin_width, double max_value) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("histogram bin width must be > 0");
  if (!(max_value > 0.0)) throw std::invalid_argument("histogram max must be > 0");
  Histogram h;
  h.bin_width = bin_width;
  h.max_value = max_value;
  h.counts.assign(static_cast<std::size_t>(std::ceil(max_value / bin_width)), 0);
  for (double v : values) {
    if (v < 0.0 || std::isnan(v)) throw std::invalid_argument("histogram values must be non-negative");
    ++h.total;
    if (v >= max_value) {
      ++h.overflow;
      continue;
    }
    auto k = static_cast<std::size_t>(std::floor(v / bin_width));
    k = std::min(k, h.counts.size() - 1);
    ++h.counts[k];
  }
  return h;
}

std::uint64_t DensityGrid::mass_below_diagonal() const {
  std::uint64_t m = 0;
  for (std::size_t iy = 0; iy < n; ++iy) {
    for (std::size_t ix = iy + 1; ix < n; ++ix) m += at(ix, iy);
  }
  return m;
}

DensityGrid density_grid(std::span<const std::pair<double, double>> pairs, double cell, double max_value) {
  if (!(cell > 0.0) || !(max_value > 0.0)) throw std::invalid_argument("density grid cell and max must be > 0");
  DensityGrid g;
  g.cell = cell;
  g.max_value = max_value;
  g.n = static_cast<std::size_t>(std::ceil(max_value / cell));
  g.counts.assign(g.n * g.n, 0);
  for (const auto& [x, y] : pairs) {
    ++g.total;
    if (x < 0.0 || y < 0.0 || x >= max_value || y >= max_value) {
      ++g.overflow;
      continue;
    }
    const auto ix = std::min(g.n - 1, static_cast<std::size_t>(std::floor(x / cell)));
    const auto iy = std::min(g.n - 1, static_cast<std::size_t>(std::floor(y / cell)));
    ++g.counts[iy * g.n + ix];
  }
  return g;
}

}  // namespace forage
