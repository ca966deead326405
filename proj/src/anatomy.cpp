#include "percolab/anatomy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "percolab/errors.hpp"
#include "percolab/trials.hpp"

namespace percolab {

namespace {

// Open subgraph of a cluster on local indices 0..n-1, root first.
struct LocalGraph {
  std::vector<VertexId> global;
  std::unordered_map<VertexId, std::uint32_t> index;
  std::vector<std::vector<std::pair<std::uint32_t, EdgeId>>> adj;

  std::uint32_t intern(VertexId v) {
    auto [it, fresh] = index.emplace(v, static_cast<std::uint32_t>(global.size()));
    if (fresh) {
      global.push_back(v);
      adj.emplace_back();
    }
    return it->second;
  }
};

LocalGraph build_local(const Graph& g, std::span<const EdgeId> edges, VertexId root) {
  LocalGraph lg;
  lg.intern(root);
  for (EdgeId e : edges) {
    const Edge& ed = g.edge(e);
    const auto a = lg.intern(ed.u);
    const auto b = lg.intern(ed.v);
    lg.adj[a].emplace_back(b, e);
    lg.adj[b].emplace_back(a, e);
  }
  return lg;
}

// Tarjan low-link over the component of local vertex 0; returns the set of
// bridge edge ids. Iterative so long paths do not overflow the stack.
std::unordered_set<EdgeId> find_bridges(const LocalGraph& lg) {
  const std::size_t n = lg.global.size();
  constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> disc(n, kUnseen), low(n, 0);
  std::unordered_set<EdgeId> bridges;
  struct Frame {
    std::uint32_t v;
    EdgeId via;
    std::size_t next;
  };
  std::vector<Frame> stack{{0, std::numeric_limits<EdgeId>::max(), 0}};
  std::uint32_t clock = 0;
  disc[0] = low[0] = clock++;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < lg.adj[f.v].size()) {
      const auto [w, e] = lg.adj[f.v][f.next++];
      if (e == f.via) continue;
      if (disc[w] == kUnseen) {
        disc[w] = low[w] = clock++;
        stack.push_back({w, e, 0});
      } else {
        low[f.v] = std::min(low[f.v], disc[w]);
      }
      continue;
    }
    const Frame done = f;
    stack.pop_back();
    if (stack.empty()) break;
    const std::uint32_t parent = stack.back().v;
    low[parent] = std::min(low[parent], low[done.v]);
    if (low[done.v] > disc[parent]) bridges.insert(done.via);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (disc[v] == kUnseen) throw ArgumentError("open edge set is not connected to the root");
  }
  return bridges;
}

}  // namespace

std::vector<std::uint32_t> BridgeTree::leaves() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t b = 0; b < tree_adjacency.size(); ++b) {
    if (b != root_block && tree_adjacency[b].size() == 1) out.push_back(b);
  }
  return out;
}

BridgeTree bridge_tree(const Graph& g, std::span<const EdgeId> open_edges, VertexId root) {
  const LocalGraph lg = build_local(g, open_edges, root);
  const auto bridges = find_bridges(lg);
  const std::size_t n = lg.global.size();

  // Flood-fill blocks without crossing bridges, then renumber blocks in BFS
  // order of the tree so the root block is 0.
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> raw(n, kNone);
  std::uint32_t raw_count = 0;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (raw[s] != kNone) continue;
    std::vector<std::uint32_t> stack{s};
    raw[s] = raw_count;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& [w, e] : lg.adj[u]) {
        if (raw[w] == kNone && !bridges.contains(e)) {
          raw[w] = raw_count;
          stack.push_back(w);
        }
      }
    }
    ++raw_count;
  }
  std::vector<std::vector<std::pair<std::uint32_t, EdgeId>>> raw_adj(raw_count);
  std::vector<EdgeId> sorted_bridges(bridges.begin(), bridges.end());
  std::sort(sorted_bridges.begin(), sorted_bridges.end());
  for (EdgeId e : sorted_bridges) {
    const auto a = raw[lg.index.at(g.edge(e).u)];
    const auto b = raw[lg.index.at(g.edge(e).v)];
    raw_adj[a].emplace_back(b, e);
    raw_adj[b].emplace_back(a, e);
  }
  std::vector<std::uint32_t> renumber(raw_count, kNone);
  std::vector<std::uint32_t> order{raw[0]};
  renumber[raw[0]] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (const auto& [w, e] : raw_adj[order[head]]) {
      if (renumber[w] == kNone) {
        renumber[w] = static_cast<std::uint32_t>(order.size());
        order.push_back(w);
      }
    }
  }

  BridgeTree t;
  t.root_block = 0;
  t.blocks.resize(raw_count);
  t.tree_adjacency.resize(raw_count);
  for (std::uint32_t v = 0; v < n; ++v) t.blocks[renumber[raw[v]]].push_back(lg.global[v]);
  for (auto& b : t.blocks) std::sort(b.begin(), b.end());
  for (EdgeId e : sorted_bridges) {
    const auto a = renumber[raw[lg.index.at(g.edge(e).u)]];
    const auto b = renumber[raw[lg.index.at(g.edge(e).v)]];
    t.tree_adjacency[a].push_back(b);
    t.tree_adjacency[b].push_back(a);
    t.tree_edges.emplace_back(std::min(a, b), std::max(a, b));
    t.bridge_map.push_back(e);
  }
  for (auto& adj : t.tree_adjacency) std::sort(adj.begin(), adj.end());
  return t;
}

BridgeTree bridge_tree(const Graph& g, const Cluster& cluster) {
  if (cluster.censored) throw StateError("bridge tree of a censored cluster");
  return bridge_tree(g, cluster.open_edges, cluster.root);
}

namespace {

// Chain lengths of the long-path decomposition rooted at the root block,
// sorted longest first. Empty when the root has no children.
std::vector<std::uint64_t> leaf_chains(const BridgeTree& t) {
  const std::size_t n = t.node_count();
  if (n <= 1) return {};
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> parent(n, kNone), order{t.root_block};
  parent[t.root_block] = t.root_block;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (auto w : t.tree_adjacency[order[head]]) {
      if (parent[w] == kNone) {
        parent[w] = order[head];
        order.push_back(w);
      }
    }
  }
  std::vector<std::uint64_t> height(n, 0);
  std::vector<std::uint32_t> heavy(n, kNone);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto u = *it;
    for (auto c : t.tree_adjacency[u]) {
      if (c == parent[u] && u != t.root_block) continue;
      if (heavy[u] == kNone || height[c] + 1 > height[u] ||
          (height[c] + 1 == height[u] && c < heavy[u])) {
        heavy[u] = c;
        height[u] = height[c] + 1;
      }
    }
  }
  std::vector<std::uint64_t> chains{height[t.root_block]};
  for (std::uint32_t u = 0; u < n; ++u) {
    if (u != t.root_block && heavy[parent[u]] != u) chains.push_back(height[u] + 1);
  }
  std::sort(chains.rbegin(), chains.rend());
  return chains;
}

}  // namespace

std::uint64_t lf_k(const BridgeTree& tree, int k) {
  if (k < 1) throw ArgumentError("k must be >= 1");
  const auto chains = leaf_chains(tree);
  if (chains.size() < static_cast<std::size_t>(k)) return 0;
  std::uint64_t total = 0;
  for (int i = 0; i < k; ++i) total += chains[i];
  return total;
}

std::uint64_t br_k(const BridgeTree& tree, int k) {
  if (k < 1) throw ArgumentError("k must be >= 1");
  const auto chains = leaf_chains(tree);
  const std::size_t take = std::min(chains.size(), static_cast<std::size_t>(k));
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < take; ++i) total += chains[i];
  return total;
}

std::uint64_t br_k(const Graph& g, const Cluster& cluster, int k) {
  return br_k(bridge_tree(g, cluster), k);
}

std::vector<EdgeId> piv(const Graph& g, const Cluster& cluster, std::span<const VertexId> w_set) {
  if (cluster.censored) throw StateError("pivotal edges of a censored cluster");
  for (VertexId w : w_set) {
    if (!cluster.contains(w)) throw ArgumentError("witness vertex outside the cluster");
  }
  const LocalGraph lg = build_local(g, cluster.open_edges, cluster.root);
  std::vector<EdgeId> out;
  std::vector<std::uint8_t> seen(lg.global.size());
  for (EdgeId removed : cluster.open_edges) {
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<std::uint32_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& [w, e] : lg.adj[u]) {
        if (e != removed && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    const bool cut = std::any_of(w_set.begin(), w_set.end(),
                                 [&](VertexId w) { return !seen[lg.index.at(w)]; });
    if (cut) out.push_back(removed);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Menger via Dinic

namespace {

class Dinic {
 public:
  explicit Dinic(std::size_t nodes) : head_(nodes, -1) {}

  // Adds the arc u->v and its partner v->u; returns the index of u->v.
  int add(std::uint32_t u, std::uint32_t v, std::int64_t cap_uv, std::int64_t cap_vu) {
    const int id = static_cast<int>(to_.size());
    push(u, v, cap_uv);
    push(v, u, cap_vu);
    return id;
  }

  std::int64_t max_flow(std::uint32_t s, std::uint32_t t) {
    std::int64_t flow = 0;
    while (layer(s, t)) {
      iter_ = head_;
      while (const std::int64_t f = augment(s, t)) flow += f;
    }
    return flow;
  }

  std::int64_t residual(int arc) const { return cap_[arc]; }

  // Nodes reachable from s in the residual graph.
  std::vector<std::uint8_t> reachable(std::uint32_t s) const {
    std::vector<std::uint8_t> seen(head_.size());
    std::vector<std::uint32_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (int a = head_[u]; a >= 0; a = next_[a]) {
        if (cap_[a] > 0 && !seen[to_[a]]) {
          seen[to_[a]] = 1;
          stack.push_back(to_[a]);
        }
      }
    }
    return seen;
  }

 private:
  void push(std::uint32_t u, std::uint32_t v, std::int64_t cap) {
    to_.push_back(v);
    cap_.push_back(cap);
    next_.push_back(head_[u]);
    head_[u] = static_cast<int>(to_.size()) - 1;
  }

  bool layer(std::uint32_t s, std::uint32_t t) {
    level_.assign(head_.size(), -1);
    std::deque<std::uint32_t> queue{s};
    level_[s] = 0;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (int a = head_[u]; a >= 0; a = next_[a]) {
        if (cap_[a] > 0 && level_[to_[a]] < 0) {
          level_[to_[a]] = level_[u] + 1;
          queue.push_back(to_[a]);
        }
      }
    }
    return level_[t] >= 0;
  }

  // One augmenting path in the level graph, found iteratively.
  std::int64_t augment(std::uint32_t s, std::uint32_t t) {
    std::vector<int> path;
    std::uint32_t u = s;
    while (true) {
      if (u == t) {
        std::int64_t push = std::numeric_limits<std::int64_t>::max();
        for (int a : path) push = std::min(push, cap_[a]);
        for (int a : path) {
          cap_[a] -= push;
          cap_[a ^ 1] += push;
        }
        return push;
      }
      int& a = iter_[u];
      while (a >= 0 && !(cap_[a] > 0 && level_[to_[a]] == level_[u] + 1)) a = next_[a];
      if (a >= 0) {
        path.push_back(a);
        u = to_[a];
        continue;
      }
      if (path.empty()) return 0;
      level_[u] = -1;  // dead end
      const int back = path.back();
      path.pop_back();
      u = to_[back ^ 1];
      iter_[u] = next_[iter_[u]];
    }
  }

  std::vector<int> head_, next_, iter_, level_;
  std::vector<std::uint32_t> to_;
  std::vector<std::int64_t> cap_;
};

template <class IsOpen>
MengerResult menger_impl(const Graph& g, IsOpen&& is_open, std::span<const VertexId> s_set) {
  if (!g.has_boundary()) throw StateError("graph has no halo to play the role of infinity");
  for (VertexId s : s_set) {
    if (s >= g.vertex_count()) throw ArgumentError("source vertex out of range");
    if (g.on_boundary(s)) throw ArgumentError("source set meets the halo");
  }
  MengerResult r;
  if (s_set.empty()) return r;

  // Vertices reachable from S through open edges; halo vertices are sinks.
  std::unordered_map<VertexId, std::uint32_t> local;
  std::vector<VertexId> global;
  auto intern = [&](VertexId v) {
    auto [it, fresh] = local.emplace(v, static_cast<std::uint32_t>(global.size()));
    if (fresh) global.push_back(v);
    return std::pair{it->second, fresh};
  };
  std::vector<EdgeId> arcs_edges;
  for (VertexId s : s_set) intern(s);
  for (std::size_t head = 0; head < global.size(); ++head) {
    const VertexId u = global[head];
    if (g.on_boundary(u)) continue;
    for (const auto& [w, e] : g.incident(u)) {
      if (!is_open(e)) continue;
      intern(w);
      arcs_edges.push_back(e);
    }
  }
  std::sort(arcs_edges.begin(), arcs_edges.end());
  arcs_edges.erase(std::unique(arcs_edges.begin(), arcs_edges.end()), arcs_edges.end());

  const auto n = static_cast<std::uint32_t>(global.size());
  const std::uint32_t source = n, sink = n + 1;
  constexpr std::int64_t kInf = std::int64_t{1} << 40;
  Dinic flow(n + 2);
  std::vector<int> source_arc;
  for (VertexId s : s_set) source_arc.push_back(flow.add(source, local.at(s), kInf, 0));
  for (std::uint32_t v = 0; v < n; ++v) {
    if (g.on_boundary(global[v])) flow.add(v, sink, kInf, 0);
  }
  std::vector<int> edge_arc(arcs_edges.size());
  for (std::size_t i = 0; i < arcs_edges.size(); ++i) {
    const Edge& ed = g.edge(arcs_edges[i]);
    edge_arc[i] = flow.add(local.at(ed.u), local.at(ed.v), 1, 1);
  }
  r.paths = static_cast<std::uint32_t>(flow.max_flow(source, sink));

  const auto side = flow.reachable(source);
  for (std::size_t i = 0; i < arcs_edges.size(); ++i) {
    const Edge& ed = g.edge(arcs_edges[i]);
    if (side[local.at(ed.u)] != side[local.at(ed.v)]) r.min_cut.push_back(arcs_edges[i]);
  }

  // Decompose the net edge flow into S-to-halo paths, dropping loops.
  std::vector<std::vector<std::pair<std::uint32_t, EdgeId>>> out(n);
  for (std::size_t i = 0; i < arcs_edges.size(); ++i) {
    const Edge& ed = g.edge(arcs_edges[i]);
    const std::int64_t net = 1 - flow.residual(edge_arc[i]);  // u -> v
    if (net > 0) out[local.at(ed.u)].emplace_back(local.at(ed.v), arcs_edges[i]);
    if (net < 0) out[local.at(ed.v)].emplace_back(local.at(ed.u), arcs_edges[i]);
  }
  std::vector<std::size_t> next(n, 0);
  std::vector<std::int64_t> position(n, -1);
  for (std::size_t i = 0; i < s_set.size(); ++i) {
    std::int64_t units = kInf - flow.residual(source_arc[i]);
    for (; units > 0; --units) {
      std::vector<std::uint32_t> path{local.at(s_set[i])};
      position[path[0]] = 0;
      while (!g.on_boundary(global[path.back()])) {
        const auto u = path.back();
        if (next[u] >= out[u].size()) throw StateError("flow decomposition stalled");
        const auto w = out[u][next[u]++].first;
        if (position[w] >= 0) {
          for (std::size_t j = static_cast<std::size_t>(position[w]) + 1; j < path.size(); ++j) {
            position[path[j]] = -1;
          }
          path.resize(static_cast<std::size_t>(position[w]) + 1);
          continue;
        }
        position[w] = static_cast<std::int64_t>(path.size());
        path.push_back(w);
      }
      std::vector<VertexId> vertices;
      for (auto v : path) {
        position[v] = -1;
        vertices.push_back(global[v]);
      }
      r.path_list.push_back(std::move(vertices));
    }
  }
  return r;
}

std::vector<std::uint8_t> indicator_from(const Graph& g, const EdgeLabelSample& labels, double p) {
  std::vector<std::uint8_t> open(g.edge_count());
  for (EdgeId e = 0; e < open.size(); ++e) open[e] = labels.open(e, p);
  return open;
}

std::optional<EdgeId> edge_between(const Graph& g, VertexId u, VertexId v) {
  const auto inc = g.incident(u);
  const auto it = std::lower_bound(inc.begin(), inc.end(), v,
                                   [](const HalfEdge& h, VertexId x) { return h.neighbor < x; });
  if (it == inc.end() || it->neighbor != v) return std::nullopt;
  return it->edge;
}

}  // namespace

bool menger_certificate_holds(const Graph& g, const std::vector<std::uint8_t>& open,
                              std::span<const VertexId> s_set, const MengerResult& r) {
  if (r.min_cut.size() != r.paths || r.path_list.size() != r.paths) return false;
  std::unordered_set<EdgeId> cut(r.min_cut.begin(), r.min_cut.end());
  for (EdgeId e : cut) {
    if (!open[e]) return false;
  }
  // The cut separates S from the halo.
  std::vector<std::uint8_t> seen(g.vertex_count());
  std::vector<VertexId> stack(s_set.begin(), s_set.end());
  for (VertexId s : s_set) seen[s] = 1;
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    if (g.on_boundary(u)) return false;
    for (const auto& [w, e] : g.incident(u)) {
      if (open[e] && !cut.contains(e) && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  // Paths are open, edge-disjoint and run from S to the halo.
  std::unordered_set<EdgeId> used;
  for (const auto& path : r.path_list) {
    if (path.empty() || !g.on_boundary(path.back())) return false;
    if (std::find(s_set.begin(), s_set.end(), path.front()) == s_set.end()) return false;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const auto e = edge_between(g, path[i], path[i + 1]);
      if (!e || !open[*e] || !used.insert(*e).second) return false;
    }
  }
  return true;
}

MengerResult menger_paths(const Graph& g, const std::vector<std::uint8_t>& open,
                          std::span<const VertexId> s_set) {
  if (open.size() != g.edge_count()) throw ArgumentError("open indicator has wrong length");
  auto r = menger_impl(g, [&](EdgeId e) { return open[e] != 0; }, s_set);
  if (!menger_certificate_holds(g, open, s_set, r)) {
    throw StateError("max-flow and min-cut disagree");
  }
  return r;
}

MengerResult menger_paths(const Graph& g, const EdgeLabelSample& labels, double p,
                          std::span<const VertexId> s_set) {
  return menger_paths(g, indicator_from(g, labels, p), s_set);
}

EulerCheck euler_paths_check(const Graph& g, const std::vector<std::uint8_t>& open, VertexId root,
                             std::span<const VertexId> a_set) {
  const Cluster comp = open_component(g, open, root);
  if (comp.open_edges.size() + 1 != comp.vertices.size()) {
    throw StateError("open component is not a tree");
  }
  std::unordered_map<VertexId, std::int64_t> degree;
  for (EdgeId e : comp.open_edges) {
    ++degree[g.edge(e).u];
    ++degree[g.edge(e).v];
  }
  for (VertexId v : comp.vertices) {
    if (!g.on_boundary(v) && degree[v] < 2) throw StateError("open tree has an interior leaf");
  }
  EulerCheck out;
  for (VertexId a : a_set) {
    if (!comp.contains(a) || g.on_boundary(a)) {
      throw ArgumentError("a_set must lie in the interior of the open tree");
    }
    out.bound += degree[a] - 2;
  }
  std::vector<std::uint8_t> tree_open(g.edge_count(), 0);
  for (EdgeId e : comp.open_edges) tree_open[e] = 1;
  out.achieved = menger_paths(g, tree_open, a_set).paths;
  out.ok = static_cast<std::int64_t>(out.achieved) >= out.bound;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Articulation-style count of halo-reaching pieces left after removing each
// vertex, over the open graph without halo-halo edges. Visits the components
// of the given start vertices only.
template <class IsOpen>
std::vector<VertexId> furcations_impl(const Graph& g, IsOpen&& is_open,
                                      std::span<const VertexId> starts) {
  std::unordered_map<VertexId, std::uint32_t> disc, low, sub_halo, sep_count, sep_halo;
  std::vector<VertexId> result;
  auto usable = [&](VertexId u, VertexId w, EdgeId e) {
    return is_open(e) && !(g.on_boundary(u) && g.on_boundary(w));
  };
  struct Frame {
    VertexId v;
    EdgeId via;
    std::size_t next;
  };
  std::uint32_t clock = 0;
  for (VertexId start : starts) {
    if (disc.contains(start)) continue;
    std::vector<VertexId> members;
    std::vector<Frame> stack{{start, std::numeric_limits<EdgeId>::max(), 0}};
    disc[start] = low[start] = clock++;
    sub_halo[start] = g.on_boundary(start);
    members.push_back(start);
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto inc = g.incident(f.v);
      if (f.next < inc.size()) {
        const auto [w, e] = inc[f.next++];
        if (e == f.via || !usable(f.v, w, e)) continue;
        if (!disc.contains(w)) {
          disc[w] = low[w] = clock++;
          sub_halo[w] = g.on_boundary(w);
          members.push_back(w);
          stack.push_back({w, e, 0});
        } else {
          low[f.v] = std::min(low[f.v], disc[w]);
        }
        continue;
      }
      const Frame done = f;
      stack.pop_back();
      if (stack.empty()) break;
      const VertexId parent = stack.back().v;
      low[parent] = std::min(low[parent], low[done.v]);
      sub_halo[parent] += sub_halo[done.v];
      if (low[done.v] >= disc[parent]) {
        sep_halo[parent] += sub_halo[done.v];
        if (sub_halo[done.v] > 0) ++sep_count[parent];
      }
    }
    const std::uint32_t total = sub_halo[start];
    for (VertexId v : members) {
      if (g.on_boundary(v)) continue;
      std::uint32_t pieces = sep_count[v];
      if (v != start && total > sep_halo[v]) ++pieces;
      if (pieces >= 3) result.push_back(v);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace

std::vector<VertexId> furcation_set(const Graph& g, const std::vector<std::uint8_t>& open) {
  if (open.size() != g.edge_count()) throw ArgumentError("open indicator has wrong length");
  std::vector<VertexId> starts(g.vertex_count());
  for (VertexId v = 0; v < starts.size(); ++v) starts[v] = v;
  return furcations_impl(g, [&](EdgeId e) { return open[e] != 0; }, starts);
}

namespace {

struct MengerAccumulator {
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
  void merge(const MengerAccumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
};

}  // namespace

BurtonKeaneStatistic burton_keane_statistic(const Graph& g, double p, std::uint64_t trials,
                                            std::uint64_t seed, std::span<const VertexId> s_set,
                                            unsigned workers) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0, 1]");
  if (trials < 1) throw ParameterError("trials must be >= 1");
  const auto acc = run_trials<MengerAccumulator>(
      trials, resolve_workers(workers), [&](MengerAccumulator& a, std::uint64_t t, ClusterScratch&) {
        const EdgeLabelSample labels(seed + t);
        const std::uint64_t m =
            menger_impl(g, [&](EdgeId e) { return labels.open(e, p); }, s_set).paths;
        a.sum += m;
        a.sum_sq += m * m;
      });
  BurtonKeaneStatistic out;
  out.trials = trials;
  const double n = static_cast<double>(trials);
  out.mean_menger = static_cast<double>(acc.sum) / n;
  const double var = std::max(0.0, static_cast<double>(acc.sum_sq) / n - out.mean_menger * out.mean_menger);
  out.stderr_menger = trials > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  std::unordered_set<EdgeId> touched;
  for (VertexId s : s_set) {
    for (const auto& h : g.incident(s)) touched.insert(h.edge);
  }
  out.edges_of_s = touched.size();
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <class IsOpen>
std::uint32_t pipe_impl(const Graph& g, IsOpen&& is_open, VertexId root, int radius_limit) {
  if (root >= g.vertex_count()) throw ArgumentError("root out of range");
  if (radius_limit < 0) throw ParameterError("radius must be >= 0");
  std::unordered_map<VertexId, int> dist{{root, 0}};
  std::vector<VertexId> ball{root};
  for (std::size_t head = 0; head < ball.size(); ++head) {
    const VertexId u = ball[head];
    if (dist[u] >= radius_limit || g.on_boundary(u)) continue;
    for (const auto& [w, e] : g.incident(u)) {
      if (is_open(e) && dist.emplace(w, dist[u] + 1).second) ball.push_back(w);
    }
  }
  auto open_neighbors = [&](VertexId v) {
    std::vector<VertexId> out;
    for (const auto& [w, e] : g.incident(v)) {
      if (is_open(e)) out.push_back(w);
    }
    return out;
  };
  bool any_edge = false;
  std::unordered_set<VertexId> eligible;
  for (VertexId v : ball) {
    const auto nb = open_neighbors(v);
    for (VertexId w : nb) any_edge |= dist.contains(w);
    if (g.on_boundary(v) || nb.size() != 2) continue;
    if (dist.contains(nb[0]) && dist.contains(nb[1])) eligible.insert(v);
  }
  if (!any_edge) return 0;
  std::uint32_t best = 1;
  std::unordered_set<VertexId> done;
  for (VertexId v : ball) {
    if (!eligible.contains(v) || done.contains(v)) continue;
    std::vector<VertexId> chain{v}, outer;
    done.insert(v);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      for (VertexId w : open_neighbors(chain[i])) {
        if (!eligible.contains(w)) {
          outer.push_back(w);
        } else if (done.insert(w).second) {
          chain.push_back(w);
        }
      }
    }
    if (outer.empty()) return 0;  // the whole cluster is a bare cycle
    const auto m = static_cast<std::uint32_t>(chain.size());
    best = std::max(best, outer[0] == outer[1] ? m : m + 1);
  }
  return best;
}

}  // namespace

std::uint32_t longest_pipe(const Graph& g, const std::vector<std::uint8_t>& open, VertexId root,
                           int radius_limit) {
  if (open.size() != g.edge_count()) throw ArgumentError("open indicator has wrong length");
  return pipe_impl(g, [&](EdgeId e) { return open[e] != 0; }, root, radius_limit);
}

std::uint32_t longest_pipe(const Graph& g, const EdgeLabelSample& labels, double p, VertexId root,
                           int radius_limit) {
  return pipe_impl(g, [&](EdgeId e) { return labels.open(e, p); }, root, radius_limit);
}

// ---------------------------------------------------------------------------

ClusterAnatomy anatomize(const Graph& g, const EdgeLabelSample& labels, double p, VertexId root,
                         int k_max) {
  if (k_max < 1) throw ArgumentError("k_max must be >= 1");
  ClusterAnatomy a;
  const Cluster c = explore_cluster(g, labels, p, root);
  auto is_open = [&](EdgeId e) { return labels.open(e, p); };
  if (c.censored) {
    a.censored = true;
    const VertexId start[] = {root};
    a.furcations = furcations_impl(g, is_open, start).size();
    return a;
  }
  a.touched = c.touched_count();
  a.vertices = c.size();
  a.radius = c.intrinsic_radius;
  const BridgeTree t = bridge_tree(g, c);
  a.bridges = t.bridge_map.size();
  for (int k = 1; k <= k_max; ++k) a.br[k] = br_k(t, k);
  a.longest_pipe = pipe_impl(g, is_open, root, std::numeric_limits<int>::max());
  return a;
}

nlohmann::json to_json(const ClusterAnatomy& a) {
  nlohmann::json j;
  j["censored"] = a.censored;
  if (a.censored) {
    j["furcations"] = a.furcations;
    return j;
  }
  j["E_v"] = a.touched;
  j["K_v"] = a.vertices;
  j["R_v"] = a.radius;
  j["bridges"] = a.bridges;
  nlohmann::json br = nlohmann::json::object();
  for (const auto& [k, v] : a.br) br[std::to_string(k)] = v;
  j["br_k"] = br;
  j["furcations"] = a.furcations;
  j["longest_pipe"] = a.longest_pipe;
  return j;
}

}  // namespace percolab
