#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "forage/common.hpp"
#include "forage/geo.hpp"

namespace forage {

struct RoadNode {
  std::int64_t id = 0;
  LatLon pos;
};

struct RoadEdge {
  std::int64_t from = 0;
  std::int64_t to = 0;
  double length_m = 0.0;
  bool oneway = false;
};

/// Directed road graph in CSR form. Node indices follow ascending node id.
class RoadGraph {
 public:
  struct Arc {
    std::uint32_t to = 0;
    double length_m = 0.0;
  };

  RoadGraph() = default;
  /// Throws InputError on duplicate node ids, dangling endpoints or
  /// non-positive lengths (messages carry the edge index).
  RoadGraph(std::vector<RoadNode> nodes, std::span<const RoadEdge> edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }
  const RoadNode& node(std::uint32_t idx) const { return nodes_[idx]; }
  std::optional<std::uint32_t> index_of(std::int64_t id) const;
  std::span<const Arc> out_arcs(std::uint32_t idx) const {
    return {arcs_.data() + offsets_[idx], arcs_.data() + offsets_[idx + 1]};
  }
  const CellIndex& node_index() const { return index_; }

 private:
  std::vector<RoadNode> nodes_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Arc> arcs_;
  CellIndex index_;
};

struct RoutingParams {
  double max_snap_m = 500.0;
};

struct Snap {
  std::uint32_t node = 0;  ///< node index
  double leg_m = 0.0;      ///< straight-line access leg
};

/// Nearest node within max_snap_m; exact ties (within 1e-9 m) go to the
/// smallest node id.
std::optional<Snap> snap(LatLon p, const RoadGraph& graph, double max_snap_m = 500.0);

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Reusable Dijkstra state; keeps per-call cost proportional to the nodes
/// actually touched.
class DijkstraWorkspace {
 public:
  explicit DijkstraWorkspace(std::size_t n_nodes = 0);
  void reset(std::size_t n_nodes);

  /// Shortest-path lengths from source to each target (kUnreachable when no
  /// path). Stops as soon as every target is settled.
  void run(const RoadGraph& graph, std::uint32_t source, std::span<const std::uint32_t> targets,
           std::vector<double>& out);

 private:
  std::vector<double> dist_;
  std::vector<std::uint8_t> state_;  // 0 untouched, 1 queued, 2 settled
  std::vector<std::uint8_t> is_target_;
  std::vector<std::uint32_t> touched_;
};

std::vector<double> one_to_many(std::uint32_t source, std::span<const std::uint32_t> targets,
                                const RoadGraph& graph);

/// Path length between the snapped endpoints plus both access legs, summed
/// as (path + home_leg) + outlet_leg. nullopt when a snap fails or no path.
std::optional<double> network_distance(LatLon home, LatLon outlet, const RoadGraph& graph,
                                       const RoutingParams& params = {});

struct RoutingDiagnostics {
  std::uint64_t n_pairs = 0;
  std::uint64_t n_unsnappable = 0;
  std::uint64_t n_unreachable = 0;

  RoutingDiagnostics& operator+=(const RoutingDiagnostics& o) {
    n_pairs += o.n_pairs;
    n_unsnappable += o.n_unsnappable;
    n_unreachable += o.n_unreachable;
    return *this;
  }
};

}  // namespace forage
