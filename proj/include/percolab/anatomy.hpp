#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "percolab/cluster.hpp"
#include "percolab/graph.hpp"
#include "percolab/rng.hpp"

namespace percolab {

/// Tree of 2-edge-connected blocks of a cluster, one tree edge per bridge.
struct BridgeTree {
  std::vector<std::vector<VertexId>> blocks;  // sorted global vertex ids
  std::vector<std::vector<std::uint32_t>> tree_adjacency;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> tree_edges;
  std::vector<EdgeId> bridge_map;  // tree edge index -> bridge of H
  std::uint32_t root_block = 0;

  std::size_t node_count() const noexcept { return blocks.size(); }
  /// Degree-one nodes other than the root block.
  std::vector<std::uint32_t> leaves() const;
};

/// Throws StateError on a censored cluster.
BridgeTree bridge_tree(const Graph& g, const Cluster& cluster);

/// Same on an arbitrary connected open edge set containing root.
BridgeTree bridge_tree(const Graph& g, std::span<const EdgeId> open_edges, VertexId root);

/// Most tree edges covered by root-to-leaf geodesics of exactly k leaves;
/// 0 when the tree has fewer than k leaves. Throws ArgumentError if k < 1.
///
/// The greedy "add the leaf bringing the most new edges" order is read off
/// the long-path decomposition: every leaf owns the chain from itself up to
/// the first ancestor where it stops being the deepest descendant, and the
/// greedy picks chains longest first.
std::uint64_t lf_k(const BridgeTree& tree, int k);

/// max over 1 <= l <= k of lf_k(tree, l).
std::uint64_t br_k(const BridgeTree& tree, int k);
std::uint64_t br_k(const Graph& g, const Cluster& cluster, int k);

/// Open edges of the cluster whose removal cuts some w in w_set off the
/// root. Computed edge by edge from the definition. Throws ArgumentError
/// when w_set leaves the cluster.
std::vector<EdgeId> piv(const Graph& g, const Cluster& cluster, std::span<const VertexId> w_set);

// ---------------------------------------------------------------------------

struct MengerResult {
  std::uint32_t paths = 0;
  std::vector<EdgeId> min_cut;                   // sorted open edge ids
  std::vector<std::vector<VertexId>> path_list;  // each runs from S to the halo
};

/// Maximum number of edge-disjoint open paths from s_set to the halo, with
/// a minimum open edge cut of the same size. Edges joining two halo vertices
/// play no role. The cut/flow certificate is checked on every call and a
/// mismatch raises StateError.
///
/// Throws StateError if the graph has no halo and ArgumentError if s_set
/// meets the halo.
MengerResult menger_paths(const Graph& g, const std::vector<std::uint8_t>& open,
                          std::span<const VertexId> s_set);
MengerResult menger_paths(const Graph& g, const EdgeLabelSample& labels, double p,
                          std::span<const VertexId> s_set);

/// Checks |cut| = paths, that the cut separates s_set from the halo in the
/// open graph, and that the paths are edge-disjoint open S-to-halo paths.
bool menger_certificate_holds(const Graph& g, const std::vector<std::uint8_t>& open,
                              std::span<const VertexId> s_set, const MengerResult& r);

struct EulerCheck {
  std::int64_t bound = 0;
  std::uint32_t achieved = 0;
  bool ok = true;
};

/// For an open component that is a tree with every leaf on the halo:
/// bound = sum over a_set of (deg - 2), achieved = Menger count from a_set.
/// Throws StateError when the component has a cycle or an interior leaf.
EulerCheck euler_paths_check(const Graph& g, const std::vector<std::uint8_t>& open, VertexId root,
                             std::span<const VertexId> a_set);

/// Interior vertices whose incident edges, once closed, leave at least three
/// open pieces that reach the halo.
std::vector<VertexId> furcation_set(const Graph& g, const std::vector<std::uint8_t>& open);

struct BurtonKeaneStatistic {
  std::uint64_t trials = 0;
  double mean_menger = 0.0;
  double stderr_menger = 0.0;
  std::uint64_t edges_of_s = 0;  // |E(S)|
  double ratio() const { return edges_of_s ? mean_menger / static_cast<double>(edges_of_s) : 0.0; }
};

BurtonKeaneStatistic burton_keane_statistic(const Graph& g, double p, std::uint64_t trials,
                                            std::uint64_t seed, std::span<const VertexId> s_set,
                                            unsigned workers = 0);

/// Longest open path inside the intrinsic ball of the given radius whose
/// internal vertices have open degree exactly 2 in the whole cluster. Halo
/// vertices are never internal. A cluster that is a bare cycle yields 0.
std::uint32_t longest_pipe(const Graph& g, const std::vector<std::uint8_t>& open, VertexId root,
                           int radius_limit);
std::uint32_t longest_pipe(const Graph& g, const EdgeLabelSample& labels, double p, VertexId root,
                           int radius_limit);

// ---------------------------------------------------------------------------

struct ClusterAnatomy {
  bool censored = false;
  std::uint64_t touched = 0;  // E_v
  std::uint64_t vertices = 0;
  int radius = 0;
  std::uint64_t bridges = 0;
  std::map<int, std::uint64_t> br;  // k -> Br_k
  std::uint64_t furcations = 0;
  std::uint32_t longest_pipe = 0;
};

/// Full anatomy of the root cluster for one label sample. For censored
/// clusters only the flag is meaningful.
ClusterAnatomy anatomize(const Graph& g, const EdgeLabelSample& labels, double p, VertexId root,
                         int k_max);

nlohmann::json to_json(const ClusterAnatomy& a);

}  // namespace percolab
