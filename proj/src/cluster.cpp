#include "percolab/cluster.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_map>

#include "percolab/errors.hpp"

namespace percolab {

bool Cluster::contains(VertexId v) const {
  return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

namespace {

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0, 1]");
}

template <class IsOpen>
Cluster explore(const Graph& g, IsOpen&& is_open, VertexId root, int radius_limit) {
  if (root >= g.vertex_count()) throw ArgumentError("root out of range");
  if (g.on_boundary(root)) throw ArgumentError("root lies on the boundary halo");
  Cluster c;
  c.root = root;
  std::unordered_map<VertexId, int> dist;
  std::deque<VertexId> queue{root};
  dist.emplace(root, 0);
  c.vertices.push_back(root);
  while (!queue.empty() && !(c.censored && radius_limit < 0)) {
    const VertexId u = queue.front();
    queue.pop_front();
    const int du = dist[u];
    if (radius_limit >= 0 && du >= radius_limit) continue;
    if (g.on_boundary(u)) continue;
    for (const auto& [w, e] : g.incident(u)) {
      if (!is_open(e) || dist.contains(w)) continue;
      dist.emplace(w, du + 1);
      c.vertices.push_back(w);
      c.intrinsic_radius = std::max(c.intrinsic_radius, du + 1);
      if (g.on_boundary(w)) {
        c.censored = true;
        if (radius_limit < 0) break;
        continue;
      }
      queue.push_back(w);
    }
  }
  for (VertexId u : c.vertices) {
    for (const auto& [w, e] : g.incident(u)) {
      if (w < u && dist.contains(w)) continue;  // counted from the other side
      c.touched_edges.push_back(e);
      if (is_open(e) && dist.contains(w)) {
        c.open_edges.push_back(e);
      } else {
        c.boundary_edges.push_back(e);
      }
    }
  }
  std::sort(c.vertices.begin(), c.vertices.end());
  std::sort(c.touched_edges.begin(), c.touched_edges.end());
  std::sort(c.open_edges.begin(), c.open_edges.end());
  std::sort(c.boundary_edges.begin(), c.boundary_edges.end());
  if (radius_limit >= 0) c.truncated_at = radius_limit;
  return c;
}

}  // namespace

Cluster explore_cluster(const Graph& g, const EdgeLabelSample& labels, double p, VertexId root) {
  check_p(p);
  return explore(g, [&](EdgeId e) { return labels.open(e, p); }, root, -1);
}

Cluster cluster_from_open_set(const Graph& g, const std::vector<std::uint8_t>& open, VertexId root) {
  if (open.size() != g.edge_count()) throw ArgumentError("open indicator has wrong length");
  return explore(g, [&](EdgeId e) { return open[e] != 0; }, root, -1);
}

Cluster open_component(const Graph& g, const std::vector<std::uint8_t>& open, VertexId root) {
  if (open.size() != g.edge_count()) throw ArgumentError("open indicator has wrong length");
  Cluster c = explore(g, [&](EdgeId e) { return open[e] != 0; }, root,
                      std::numeric_limits<int>::max());
  c.truncated_at.reset();
  return c;
}

Cluster explore_ball(const Graph& g, const EdgeLabelSample& labels, double p, VertexId root,
                     int radius) {
  check_p(p);
  if (radius < 0) throw ParameterError("ball radius must be >= 0");
  return explore(g, [&](EdgeId e) { return labels.open(e, p); }, root, radius);
}

double fluctuation(const Cluster& cluster, double p) {
  if (cluster.censored) throw StateError("fluctuation of a censored cluster is undefined");
  return p * static_cast<double>(cluster.boundary_edges.size()) -
         (1.0 - p) * static_cast<double>(cluster.open_edges.size());
}

ClusterSummary measure_cluster(const Graph& g, const EdgeLabelSample& labels, double p,
                               VertexId root, ClusterScratch& s, bool with_radius,
                               VertexId target) {
  if (g.on_boundary(root)) throw ArgumentError("root lies on the boundary halo");
  ClusterSummary out;
  s.visited.clear();
  s.stack.clear();
  s.order.clear();
  s.visited.insert(root);
  s.stack.push_back(root);
  std::uint64_t open_incidences = 0;
  while (!s.stack.empty()) {
    const VertexId u = s.stack.back();
    s.stack.pop_back();
    s.order.push_back(u);
    for (const auto& [w, e] : g.incident(u)) {
      if (!labels.open(e, p)) continue;
      ++open_incidences;
      if (!s.visited.insert(w)) continue;
      if (g.on_boundary(w)) {
        out.censored = true;
        out.hit_target = (target != kNoVertex && s.visited.contains(target));
        return out;
      }
      s.stack.push_back(w);
    }
  }
  std::uint64_t incidences = 0, internal_twice = 0;
  for (VertexId u : s.order) {
    incidences += g.degree(u);
    for (const auto& h : g.incident(u)) internal_twice += s.visited.contains(h.neighbor);
  }
  out.vertices = static_cast<std::uint32_t>(s.order.size());
  out.open = static_cast<std::uint32_t>(open_incidences / 2);
  out.touched = static_cast<std::uint32_t>(incidences - internal_twice / 2);
  out.hit_target = (target != kNoVertex && s.visited.contains(target));
  if (with_radius) {
    // BFS layers over the finished cluster; reuses `order` as the queue.
    s.order.clear();
    s.depth.clear();
    detail::FlatSet& seen = s.visited;
    seen.clear();
    seen.insert(root);
    s.order.push_back(root);
    s.depth.push_back(0);
    for (std::size_t head = 0; head < s.order.size(); ++head) {
      const VertexId u = s.order[head];
      const std::uint32_t du = s.depth[head];
      out.radius = std::max(out.radius, du);
      for (const auto& [w, e] : g.incident(u)) {
        if (labels.open(e, p) && seen.insert(w)) {
          s.order.push_back(w);
          s.depth.push_back(du + 1);
        }
      }
    }
  }
  return out;
}

}  // namespace percolab
