#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace percolab {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);

struct Edge {
  VertexId u;
  VertexId v;

  VertexId other(VertexId w) const noexcept { return w == u ? v : u; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct HalfEdge {
  VertexId neighbor;
  EdgeId edge;
};

struct FamilyTag {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

/// Finite simple graph stored in compressed adjacency form, with a marked
/// boundary halo. A finite exhaustion of an infinite graph treats any
/// contact with the halo as escape to infinity.
///
/// Immutable after construction; safe for concurrent readers.
class Graph {
 public:
  Graph() = default;

  /// Validates and builds the adjacency structure. Throws FormatError on
  /// out-of-range endpoints, self-loops, parallel edges or bad boundary ids.
  Graph(std::size_t vertex_count, std::vector<Edge> edges,
        std::vector<VertexId> boundary, FamilyTag family = {});

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::span<const HalfEdge> incident(VertexId v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const noexcept {
    return offsets_[v + 1] - offsets_[v];
  }

  const Edge& edge(EdgeId e) const noexcept { return edges_[e]; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  bool on_boundary(VertexId v) const noexcept { return halo_[v] != 0; }
  std::span<const VertexId> boundary() const noexcept { return boundary_; }
  bool has_boundary() const noexcept { return !boundary_.empty(); }

  const FamilyTag& family() const noexcept { return family_; }

  /// Designated root vertex: `family.params.origin` when present, else the
  /// smallest non-boundary vertex.
  VertexId origin() const;

 private:
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<HalfEdge> adjacency_;
  std::vector<VertexId> boundary_;
  std::vector<std::uint8_t> halo_;
  FamilyTag family_;
};

// ---------------------------------------------------------------------------
// Families

struct RegularTreeSpec {
  int degree = 3;
  int radius = 1;
};
struct HypercubicSpec {
  int dimension = 2;
  int side = 2;
};
struct TreeDecoratedZ3Spec {
  int tree_depth = 1;
  int side = 3;
};
struct ExplicitSpec {
  std::size_t vertex_count = 0;
  std::vector<Edge> edges;
};

using FamilySpec =
    std::variant<RegularTreeSpec, HypercubicSpec, TreeDecoratedZ3Spec, ExplicitSpec>;

/// Ball of radius `radius` in the `degree`-regular tree, BFS-numbered from
/// the root (vertex 0). The distance-`radius` shell is the halo.
Graph regular_tree(int degree, int radius);

/// The box {0..side-1}^dimension with nearest-neighbour edges; the outer
/// shell is the halo and the origin is the centre.
Graph hypercubic(int dimension, int side);

/// side^3 box with a binary tree of depth `tree_depth` hanging from every
/// interior lattice vertex. Outer lattice shell and tree leaves form the halo.
Graph tree_decorated_z3(int tree_depth, int side);

/// Passthrough with an empty halo.
Graph explicit_graph(std::size_t vertex_count, std::vector<Edge> edges);

Graph generate_family(const FamilySpec& spec);

// ---------------------------------------------------------------------------
// Serialization: {"vertex_count", "edges", "boundary", "family"}

nlohmann::json to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& doc);
Graph load_graph(const std::filesystem::path& path);
void save_graph(const Graph& g, const std::filesystem::path& path);

}  // namespace percolab
