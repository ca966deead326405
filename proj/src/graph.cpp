#include "percolab/graph.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "percolab/errors.hpp"

namespace percolab {

Graph::Graph(std::size_t vertex_count, std::vector<Edge> edges,
             std::vector<VertexId> boundary, FamilyTag family)
    : vertex_count_(vertex_count),
      edges_(std::move(edges)),
      boundary_(std::move(boundary)),
      halo_(vertex_count, 0),
      family_(std::move(family)) {
  if (vertex_count_ >= std::numeric_limits<VertexId>::max() ||
      2 * edges_.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError("graph too large for 32-bit ids");
  }
  std::vector<std::uint32_t> deg(vertex_count_ + 1, 0);
  for (const auto& [u, v] : edges_) {
    if (u >= vertex_count_ || v >= vertex_count_) {
      throw FormatError("edge endpoint out of range");
    }
    if (u == v) throw FormatError("self-loop at vertex " + std::to_string(u));
    ++deg[u];
    ++deg[v];
  }
  offsets_.assign(vertex_count_ + 1, 0);
  for (std::size_t v = 0; v < vertex_count_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  adjacency_.resize(2 * edges_.size());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    adjacency_[fill[u]++] = {v, e};
    adjacency_[fill[v]++] = {u, e};
  }
  for (std::size_t v = 0; v < vertex_count_; ++v) {
    auto first = adjacency_.begin() + offsets_[v];
    auto last = adjacency_.begin() + offsets_[v + 1];
    std::sort(first, last, [](const HalfEdge& a, const HalfEdge& b) {
      return a.neighbor < b.neighbor;
    });
    auto dup = std::adjacent_find(first, last, [](const HalfEdge& a, const HalfEdge& b) {
      return a.neighbor == b.neighbor;
    });
    if (dup != last) {
      throw FormatError("parallel edges between " + std::to_string(v) + " and " +
                        std::to_string(dup->neighbor));
    }
  }
  std::sort(boundary_.begin(), boundary_.end());
  boundary_.erase(std::unique(boundary_.begin(), boundary_.end()), boundary_.end());
  for (VertexId b : boundary_) {
    if (b >= vertex_count_) throw FormatError("boundary vertex out of range");
    halo_[b] = 1;
  }
}

VertexId Graph::origin() const {
  if (family_.params.is_object() && family_.params.contains("origin")) {
    auto o = family_.params["origin"].get<std::int64_t>();
    if (o < 0 || static_cast<std::size_t>(o) >= vertex_count_) {
      throw FormatError("origin out of range");
    }
    return static_cast<VertexId>(o);
  }
  for (VertexId v = 0; v < vertex_count_; ++v) {
    if (!on_boundary(v)) return v;
  }
  throw StateError("graph has no interior vertex");
}

// ---------------------------------------------------------------------------

Graph regular_tree(int degree, int radius) {
  if (degree < 3) throw ParameterError("regular_tree requires degree >= 3");
  if (radius < 1) throw ParameterError("regular_tree requires radius >= 1");
  std::size_t count = 1;
  std::size_t level = 1;
  for (int r = 1; r <= radius; ++r) {
    level = (r == 1) ? degree : level * (degree - 1);
    count += level;
    if (count >= std::numeric_limits<VertexId>::max()) {
      throw ParameterError("regular_tree ball too large");
    }
  }
  std::vector<Edge> edges;
  edges.reserve(count - 1);
  std::vector<VertexId> boundary;
  boundary.reserve(level);
  // BFS numbering: children of v are allocated consecutively.
  VertexId next = 1;
  std::size_t level_begin = 0, level_end = 1;
  for (int r = 0; r < radius; ++r) {
    for (std::size_t v = level_begin; v < level_end; ++v) {
      const int children = (v == 0) ? degree : degree - 1;
      for (int c = 0; c < children; ++c) edges.push_back({static_cast<VertexId>(v), next++});
    }
    level_begin = level_end;
    level_end = next;
  }
  for (std::size_t v = level_begin; v < level_end; ++v) boundary.push_back(static_cast<VertexId>(v));
  FamilyTag tag{"regular_tree", {{"degree", degree}, {"radius", radius}, {"origin", 0}}};
  return Graph(count, std::move(edges), std::move(boundary), std::move(tag));
}

namespace {

struct Box {
  int dimension;
  int side;

  std::size_t volume() const {
    std::size_t n = 1;
    for (int k = 0; k < dimension; ++k) n *= static_cast<std::size_t>(side);
    return n;
  }
  // Returns true when any coordinate of `index` lies on the outer shell.
  bool on_shell(std::size_t index) const {
    for (int k = 0; k < dimension; ++k) {
      const auto x = static_cast<int>(index % side);
      if (x == 0 || x == side - 1) return true;
      index /= side;
    }
    return false;
  }
  void add_edges(std::vector<Edge>& edges) const {
    const std::size_t n = volume();
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t stride = 1, rest = i;
      for (int k = 0; k < dimension; ++k) {
        const auto x = static_cast<int>(rest % side);
        rest /= side;
        if (x + 1 < side) {
          edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(i + stride)});
        }
        stride *= side;
      }
    }
  }
  std::size_t centre() const {
    std::size_t idx = 0, stride = 1;
    for (int k = 0; k < dimension; ++k) {
      idx += static_cast<std::size_t>(side / 2) * stride;
      stride *= side;
    }
    return idx;
  }
};

}  // namespace

Graph hypercubic(int dimension, int side) {
  if (dimension < 1) throw ParameterError("hypercubic requires dimension >= 1");
  if (side < 2) throw ParameterError("hypercubic requires side >= 2");
  const Box box{dimension, side};
  const std::size_t n = box.volume();
  if (n >= std::numeric_limits<VertexId>::max()) throw ParameterError("hypercubic box too large");
  std::vector<Edge> edges;
  box.add_edges(edges);
  std::vector<VertexId> boundary;
  for (std::size_t i = 0; i < n; ++i) {
    if (box.on_shell(i)) boundary.push_back(static_cast<VertexId>(i));
  }
  FamilyTag tag{"hypercubic",
                {{"dimension", dimension}, {"side", side}, {"origin", box.centre()}}};
  return Graph(n, std::move(edges), std::move(boundary), std::move(tag));
}

Graph tree_decorated_z3(int tree_depth, int side) {
  if (tree_depth < 1) throw ParameterError("tree_decorated_z3 requires tree_depth >= 1");
  if (side < 2) throw ParameterError("tree_decorated_z3 requires side >= 2");
  const Box box{3, side};
  const std::size_t lattice = box.volume();
  std::vector<Edge> edges;
  box.add_edges(edges);
  std::vector<VertexId> boundary;
  std::size_t next = lattice;
  for (std::size_t i = 0; i < lattice; ++i) {
    if (box.on_shell(i)) {
      boundary.push_back(static_cast<VertexId>(i));
      continue;
    }
    std::vector<std::size_t> layer{i};
    for (int depth = 1; depth <= tree_depth; ++depth) {
      std::vector<std::size_t> below;
      below.reserve(2 * layer.size());
      for (std::size_t parent : layer) {
        for (int c = 0; c < 2; ++c) {
          edges.push_back({static_cast<VertexId>(parent), static_cast<VertexId>(next)});
          if (depth == tree_depth) boundary.push_back(static_cast<VertexId>(next));
          below.push_back(next++);
        }
      }
      layer = std::move(below);
    }
  }
  if (next >= std::numeric_limits<VertexId>::max()) throw ParameterError("graph too large");
  FamilyTag tag{"tree_decorated_z3",
                {{"tree_depth", tree_depth}, {"side", side}, {"origin", box.centre()}}};
  return Graph(next, std::move(edges), std::move(boundary), std::move(tag));
}

Graph explicit_graph(std::size_t vertex_count, std::vector<Edge> edges) {
  return Graph(vertex_count, std::move(edges), {}, FamilyTag{"explicit", nlohmann::json::object()});
}

Graph generate_family(const FamilySpec& spec) {
  return std::visit(
      [](const auto& s) -> Graph {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RegularTreeSpec>) {
          return regular_tree(s.degree, s.radius);
        } else if constexpr (std::is_same_v<T, HypercubicSpec>) {
          return hypercubic(s.dimension, s.side);
        } else if constexpr (std::is_same_v<T, TreeDecoratedZ3Spec>) {
          return tree_decorated_z3(s.tree_depth, s.side);
        } else {
          return explicit_graph(s.vertex_count, s.edges);
        }
      },
      spec);
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  nlohmann::json boundary(std::vector<VertexId>(g.boundary().begin(), g.boundary().end()));
  return {{"vertex_count", g.vertex_count()},
          {"edges", std::move(edges)},
          {"boundary", std::move(boundary)},
          {"family", {{"name", g.family().name}, {"params", g.family().params}}}};
}

Graph graph_from_json(const nlohmann::json& doc) {
  try {
    const auto n = doc.at("vertex_count").get<std::int64_t>();
    if (n < 0) throw FormatError("negative vertex_count");
    std::vector<Edge> edges;
    for (const auto& pair : doc.at("edges")) {
      if (!pair.is_array() || pair.size() != 2) throw FormatError("edge must be a [u, v] pair");
      const auto u = pair[0].get<std::int64_t>();
      const auto v = pair[1].get<std::int64_t>();
      if (u < 0 || v < 0) throw FormatError("negative edge endpoint");
      edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v)});
    }
    std::vector<VertexId> boundary;
    if (doc.contains("boundary")) {
      for (const auto& b : doc.at("boundary")) {
        const auto id = b.get<std::int64_t>();
        if (id < 0) throw FormatError("negative boundary id");
        boundary.push_back(static_cast<VertexId>(id));
      }
    }
    FamilyTag tag{"explicit", nlohmann::json::object()};
    if (doc.contains("family")) {
      const auto& f = doc.at("family");
      tag.name = f.value("name", std::string("explicit"));
      if (f.contains("params")) tag.params = f.at("params");
    }
    return Graph(static_cast<std::size_t>(n), std::move(edges), std::move(boundary), std::move(tag));
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("graph JSON: ") + ex.what());
  }
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open graph file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("graph JSON: ") + ex.what());
  }
  return graph_from_json(doc);
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write graph file " + path.string());
  out << to_json(g).dump() << '\n';
}

}  // namespace percolab
