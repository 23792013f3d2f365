#include "forage/routing.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace forage {

RoadGraph::RoadGraph(std::vector<RoadNode> nodes, std::span<const RoadEdge> edges) : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end(), [](const RoadNode& a, const RoadNode& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].id == nodes_[i - 1].id) {
      throw InputError("nodes.csv: duplicate node_id " + std::to_string(nodes_[i].id));
    }
  }

  struct Directed {
    std::uint32_t from, to;
    double len;
  };
  std::vector<Directed> directed;
  directed.reserve(edges.size() * 2);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    const std::string where = "edges.csv edge " + std::to_string(k + 1);
    const auto a = index_of(e.from);
    const auto b = index_of(e.to);
    if (!a) throw InputError(where + ": unknown node " + std::to_string(e.from));
    if (!b) throw InputError(where + ": unknown node " + std::to_string(e.to));
    if (!(e.length_m > 0.0) || !std::isfinite(e.length_m)) throw InputError(where + ": length_m must be > 0");
    directed.push_back({*a, *b, e.length_m});
    if (!e.oneway) directed.push_back({*b, *a, e.length_m});
  }

  offsets_.assign(nodes_.size() + 1, 0);
  for (const auto& d : directed) ++offsets_[d.from + 1];
  for (std::size_t i = 0; i < nodes_.size(); ++i) offsets_[i + 1] += offsets_[i];
  arcs_.resize(directed.size());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& d : directed) arcs_[fill[d.from]++] = {d.to, d.len};

  std::vector<LatLon> pts;
  pts.reserve(nodes_.size());
  for (const auto& n : nodes_) pts.push_back(n.pos);
  index_ = CellIndex(pts, 250.0, 5000.0);
}

std::optional<std::uint32_t> RoadGraph::index_of(std::int64_t id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id, [](const RoadNode& n, std::int64_t v) { return n.id < v; });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - nodes_.begin());
}

std::optional<Snap> snap(LatLon p, const RoadGraph& graph, double max_snap_m) {
  if (graph.node_count() == 0) return std::nullopt;
  std::vector<CellIndex::Hit> hits;
  const auto& index = graph.node_index();
  if (max_snap_m <= index.max_radius_m()) {
    hits = index.query_within_dist(p, max_snap_m);
  } else {
    for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
      const double d = haversine(p, graph.node(i).pos);
      if (d <= max_snap_m) hits.push_back({i, d});
    }
  }
  if (hits.empty()) return std::nullopt;
  double best_d = hits.front().distance_m;
  for (const auto& h : hits) best_d = std::min(best_d, h.distance_m);
  // Hits are in ascending index order and indices follow node id order.
  for (const auto& h : hits) {
    if (h.distance_m <= best_d + 1e-9) return Snap{h.id, h.distance_m};
  }
  return std::nullopt;
}

DijkstraWorkspace::DijkstraWorkspace(std::size_t n_nodes) { reset(n_nodes); }

void DijkstraWorkspace::reset(std::size_t n_nodes) {
  dist_.assign(n_nodes, kUnreachable);
  state_.assign(n_nodes, 0);
  is_target_.assign(n_nodes, 0);
  touched_.clear();
}

void DijkstraWorkspace::run(const RoadGraph& graph, std::uint32_t source, std::span<const std::uint32_t> targets,
                            std::vector<double>& out) {
  if (dist_.size() != graph.node_count()) reset(graph.node_count());
  std::size_t remaining = 0;
  for (auto t : targets) {
    if (!is_target_[t]) {
      is_target_[t] = 1;
      ++remaining;
    }
  }

  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist_[source] = 0.0;
  state_[source] = 1;
  touched_.push_back(source);
  heap.push({0.0, source});
  while (!heap.empty() && remaining > 0) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (state_[u] == 2 || d > dist_[u]) continue;
    state_[u] = 2;
    if (is_target_[u]) --remaining;
    for (const auto& arc : graph.out_arcs(u)) {
      const double nd = d + arc.length_m;
      if (nd < dist_[arc.to]) {
        if (state_[arc.to] == 0) touched_.push_back(arc.to);
        dist_[arc.to] = nd;
        state_[arc.to] = 1;
        heap.push({nd, arc.to});
      }
    }
  }

  out.resize(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto t = targets[i];
    out[i] = state_[t] == 2 ? dist_[t] : kUnreachable;
  }

  for (auto t : targets) is_target_[t] = 0;
  for (auto v : touched_) {
    dist_[v] = kUnreachable;
    state_[v] = 0;
  }
  touched_.clear();
}

std::vector<double> one_to_many(std::uint32_t source, std::span<const std::uint32_t> targets, const RoadGraph& graph) {
  DijkstraWorkspace ws(graph.node_count());
  std::vector<double> out;
  ws.run(graph, source, targets, out);
  return out;
}

std::optional<double> network_distance(LatLon home, LatLon outlet, const RoadGraph& graph, const RoutingParams& params) {
  const auto hs = snap(home, graph, params.max_snap_m);
  const auto os = snap(outlet, graph, params.max_snap_m);
  if (!hs || !os) return std::nullopt;
  const std::uint32_t target = os->node;
  const auto d = one_to_many(hs->node, std::span<const std::uint32_t>(&target, 1), graph);
  if (!std::isfinite(d[0])) return std::nullopt;
  return (d[0] + hs->leg_m) + os->leg_m;
}

}  // namespace forage
