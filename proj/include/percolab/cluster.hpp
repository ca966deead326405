#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "percolab/flat_set.hpp"
#include "percolab/graph.hpp"
#include "percolab/rng.hpp"

namespace percolab {

/// Explored open component of a root vertex.
///
/// `touched_edges` is E(K), the edges with at least one endpoint in the
/// cluster; `open_edges` is E_o(K); `boundary_edges` is ∂K = E(K) \ E_o(K).
/// All id vectors are sorted. When `censored` is set the exploration hit
/// the halo and the edge sets describe a partial exploration only.
struct Cluster {
  VertexId root = 0;
  std::vector<VertexId> vertices;
  std::vector<EdgeId> open_edges;
  std::vector<EdgeId> touched_edges;
  std::vector<EdgeId> boundary_edges;
  int intrinsic_radius = 0;
  bool censored = false;
  /// Set by explore_ball: vertices beyond this intrinsic radius were not
  /// expanded, so degrees are exact only up to it.
  std::optional<int> truncated_at;

  std::size_t size() const noexcept { return vertices.size(); }
  std::size_t touched_count() const noexcept { return touched_edges.size(); }
  bool contains(VertexId v) const;
};

/// Breadth-first exploration over edges with label < p. Stops at the first
/// halo vertex reached and returns the partial cluster with censored = true.
/// Throws ArgumentError if root is a halo vertex.
Cluster explore_cluster(const Graph& g, const EdgeLabelSample& labels, double p, VertexId root);

/// Same exploration on an explicit open-edge indicator (one entry per edge).
Cluster cluster_from_open_set(const Graph& g, const std::vector<std::uint8_t>& open, VertexId root);

/// Whole open component of root on an explicit indicator. Unlike
/// explore_cluster it does not stop at the halo: halo vertices are included
/// as terminals but never expanded.
Cluster open_component(const Graph& g, const std::vector<std::uint8_t>& open, VertexId root);

/// Intrinsic ball of radius `radius` around root in the open subgraph.
/// Halo vertices are included but not expanded; censored reports halo
/// contact. Vertices at distance <= radius - 1 have exact open degree.
Cluster explore_ball(const Graph& g, const EdgeLabelSample& labels, double p, VertexId root,
                     int radius);

/// h_p(H) = p|∂H| - (1-p)|E_o(H)|. Throws StateError on censored clusters.
double fluctuation(const Cluster& cluster, double p);

/// Per-trial scalar summary of a cluster, produced by the fast explorer.
struct ClusterSummary {
  bool censored = false;
  std::uint32_t touched = 0;   // E_v
  std::uint32_t vertices = 0;  // |K_v|
  std::uint32_t open = 0;      // |E_o(K_v)|
  std::uint32_t radius = 0;    // R_v
  bool hit_target = false;     // optional co-cluster target was reached

  std::uint32_t boundary() const noexcept { return touched - open; }
};

/// Reusable scratch for the fast explorer; one per worker thread.
class ClusterScratch {
 public:
  detail::FlatSet visited;
  std::vector<VertexId> stack;
  std::vector<VertexId> order;
  std::vector<std::uint32_t> depth;
};

/// Depth-first exploration that aborts at the first halo contact and
/// returns only scalar sizes. The censored flag and, for uncensored
/// clusters, every size agree with explore_cluster; only the visiting
/// order differs. `with_radius` adds a BFS pass for R_v.
ClusterSummary measure_cluster(const Graph& g, const EdgeLabelSample& labels, double p,
                               VertexId root, ClusterScratch& scratch, bool with_radius = false,
                               VertexId target = kNoVertex);

}  // namespace percolab
