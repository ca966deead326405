#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "percolab/cluster.hpp"
#include "percolab/graph.hpp"

#ifndef PERCOLAB_CORPUS_DIR
#define PERCOLAB_CORPUS_DIR "corpus"
#endif

namespace testing {

inline std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(PERCOLAB_CORPUS_DIR)) {
    if (entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline percolab::Graph corpus_graph(const std::string& name) {
  return percolab::load_graph(std::filesystem::path(PERCOLAB_CORPUS_DIR) / (name + ".json"));
}

inline oracle::SmallGraph to_small(const percolab::Graph& g) {
  oracle::SmallGraph s;
  s.n = static_cast<int>(g.vertex_count());
  for (const auto& e : g.edges()) s.edges.emplace_back(static_cast<int>(e.u), static_cast<int>(e.v));
  s.halo.assign(g.vertex_count(), false);
  for (auto v : g.boundary()) s.halo[v] = true;
  return s;
}

// The open subgraph of a finite cluster, relabelled 0..|K|-1 with the root
// first.
struct LocalCluster {
  oracle::SmallGraph graph;
  std::vector<percolab::VertexId> global;
};

inline LocalCluster localize(const percolab::Graph& g, const percolab::Cluster& c) {
  LocalCluster out;
  out.global.push_back(c.root);
  for (auto v : c.vertices) {
    if (v != c.root) out.global.push_back(v);
  }
  auto local = [&](percolab::VertexId v) {
    return static_cast<int>(std::find(out.global.begin(), out.global.end(), v) - out.global.begin());
  };
  out.graph.n = static_cast<int>(out.global.size());
  for (auto e : c.open_edges) out.graph.edges.emplace_back(local(g.edge(e).u), local(g.edge(e).v));
  return out;
}

// Random connected simple graph on n vertices with m >= n-1 edges.
inline std::vector<percolab::Edge> random_connected_edges(std::mt19937_64& rng, int n, int m) {
  std::vector<percolab::Edge> edges;
  auto has = [&](int a, int b) {
    return std::any_of(edges.begin(), edges.end(), [&](const percolab::Edge& e) {
      return (static_cast<int>(e.u) == a && static_cast<int>(e.v) == b) ||
             (static_cast<int>(e.u) == b && static_cast<int>(e.v) == a);
    });
  };
  for (int v = 1; v < n; ++v) {
    const int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
    edges.push_back({static_cast<percolab::VertexId>(u), static_cast<percolab::VertexId>(v)});
  }
  const int max_edges = n * (n - 1) / 2;
  m = std::min(m, max_edges);
  while (static_cast<int>(edges.size()) < m) {
    const int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
    if (a == b || has(a, b)) continue;
    edges.push_back({static_cast<percolab::VertexId>(a), static_cast<percolab::VertexId>(b)});
  }
  return edges;
}

}  // namespace testing
