#pragma once
// Independent reference computations for the test suites. Each one is a
// deliberately naive re-derivation that shares no code path with the
// library routine it checks.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

using Rational = mpq_class;

struct SmallGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<bool> halo;  // may be empty
  bool is_halo(int v) const { return !halo.empty() && halo[v]; }
};

// Vertices reachable from `from` using edges flagged in `use`. Halo vertices
// are reached but not expanded when `stop_at_halo` is set.
inline std::vector<bool> reach(const SmallGraph& g, const std::vector<bool>& use, int from,
                               bool stop_at_halo = false) {
  std::vector<bool> seen(g.n, false);
  std::deque<int> q{from};
  seen[from] = true;
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    if (stop_at_halo && g.is_halo(v) && v != from) continue;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      if (!use[e]) continue;
      const auto [a, b] = g.edges[e];
      const int u = a == v ? b : (b == v ? a : -1);
      if (u >= 0 && !seen[u]) {
        seen[u] = true;
        q.push_back(u);
      }
    }
  }
  return seen;
}

// max over W with |W| <= k of |Piv(H, root, W)|, straight from the
// definition: an edge is pivotal for W if removing it cuts some w from root.
inline std::uint64_t brute_br_k(const SmallGraph& h, int root, int k) {
  const std::vector<bool> all(h.edges.size(), true);
  std::vector<std::vector<bool>> cut_off;  // per edge: vertices lost when it goes
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    auto use = all;
    use[e] = false;
    const auto r = reach(h, use, root);
    std::vector<bool> lost(h.n);
    for (int v = 0; v < h.n; ++v) lost[v] = !r[v];
    cut_off.push_back(lost);
  }
  std::uint64_t best = 0;
  std::vector<int> w;
  std::function<void(int)> rec = [&](int start) {
    std::uint64_t piv = 0;
    for (const auto& lost : cut_off) {
      for (int x : w) {
        if (lost[x]) {
          ++piv;
          break;
        }
      }
    }
    best = std::max(best, piv);
    if (static_cast<int>(w.size()) == k) return;
    for (int v = start; v < h.n; ++v) {
      w.push_back(v);
      rec(v + 1);
      w.pop_back();
    }
  };
  rec(0);
  return best;
}

// Exhaustive Lf_k on a rooted tree given as adjacency: max edges in a union
// of root-to-leaf paths over exactly k leaves; 0 with fewer than k leaves.
inline std::uint64_t brute_lf_k(const std::vector<std::vector<int>>& adj, int root, int k) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> parent(n, -1), order{root};
  std::vector<bool> seen(n, false);
  seen[root] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (int u : adj[order[i]]) {
      if (!seen[u]) {
        seen[u] = true;
        parent[u] = order[i];
        order.push_back(u);
      }
    }
  }
  std::vector<int> leaves;
  for (int v = 0; v < n; ++v) {
    if (v != root && adj[v].size() == 1) leaves.push_back(v);
  }
  if (static_cast<int>(leaves.size()) < k) return 0;
  std::uint64_t best = 0;
  const int l = static_cast<int>(leaves.size());
  for (std::uint32_t mask = 0; mask < (1u << l); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    std::set<int> used;  // child endpoints of used edges
    for (int i = 0; i < l; ++i) {
      if (!(mask >> i & 1)) continue;
      for (int v = leaves[i]; v != root; v = parent[v]) used.insert(v);
    }
    best = std::max<std::uint64_t>(best, used.size());
  }
  return best;
}

// Minimum number of open edges leaving a vertex set X with S ⊆ X and X
// avoiding the halo, over all such X. Edges with both ends on the halo
// never leave X.
inline int brute_min_cut(const SmallGraph& g, const std::vector<bool>& open, const std::vector<int>& s) {
  std::vector<int> free;
  for (int v = 0; v < g.n; ++v) {
    if (!g.is_halo(v) && std::find(s.begin(), s.end(), v) == s.end()) free.push_back(v);
  }
  int best = 1 << 30;
  const int f = static_cast<int>(free.size());
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << f); ++mask) {
    std::vector<bool> in(g.n, false);
    for (int v : s) in[v] = true;
    for (int i = 0; i < f; ++i) {
      if (mask >> i & 1) in[free[i]] = true;
    }
    int cut = 0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      if (open[e] && in[g.edges[e].first] != in[g.edges[e].second]) ++cut;
    }
    best = std::min(best, cut);
  }
  return best;
}

// Furcations by direct component counting: close v's edges and count the
// pieces hanging off v that contain a halo vertex. Halo vertices are ordinary
// vertices of the pieces; only halo-halo edges are dropped.
inline std::vector<int> brute_furcations(const SmallGraph& g, const std::vector<bool>& open) {
  std::vector<int> out;
  for (int v = 0; v < g.n; ++v) {
    if (g.is_halo(v)) continue;
    auto use = open;
    std::vector<int> nbrs;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      if (!open[e]) continue;
      const auto [a, b] = g.edges[e];
      if (a == v || b == v) {
        use[e] = false;
        nbrs.push_back(a == v ? b : a);
      }
      if (g.is_halo(a) && g.is_halo(b)) use[e] = false;
    }
    std::vector<bool> claimed(g.n, false);
    int pieces = 0;
    for (int u : nbrs) {
      if (claimed[u]) continue;
      const auto r = reach(g, use, u);
      bool halo = false;
      for (int x = 0; x < g.n; ++x) {
        if (!r[x]) continue;
        claimed[x] = true;
        halo = halo || g.is_halo(x);
      }
      if (halo) ++pieces;
    }
    if (pieces >= 3) out.push_back(v);
  }
  return out;
}

// Walks all 2^|E| configurations and hands each one, with the root's
// cluster read off by breadth-first search, to `visit`.
struct BruteCluster {
  bool censored = false;
  int touched = 0;
  int vertices = 0;
  int open = 0;
  std::vector<bool> in;
  std::vector<bool> open_edges;  // open edges inside the cluster
};

template <class Visit>
void for_each_configuration(const SmallGraph& g, int root, Visit&& visit) {
  const std::size_t m = g.edges.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<bool> open(m);
    int a = 0;
    for (std::size_t e = 0; e < m; ++e) {
      open[e] = mask >> e & 1;
      a += open[e];
    }
    BruteCluster c;
    c.in = reach(g, open, root, true);
    c.open_edges.assign(m, false);
    for (int v = 0; v < g.n; ++v) {
      if (!c.in[v]) continue;
      ++c.vertices;
      if (g.is_halo(v)) c.censored = true;
    }
    for (std::size_t e = 0; e < m; ++e) {
      const auto [x, y] = g.edges[e];
      if (!c.in[x] && !c.in[y]) continue;
      ++c.touched;
      if (open[e] && c.in[x] && c.in[y]) {
        c.open_edges[e] = true;
        ++c.open;
      }
    }
    visit(a, static_cast<int>(m) - a, c);
  }
}

inline Rational power(const Rational& x, int e) {
  Rational out = 1;
  for (int i = 0; i < e; ++i) out *= x;
  return out;
}

// The open subgraph of a brute cluster relabelled with the root as 0.
inline SmallGraph cluster_subgraph(const SmallGraph& g, int root, const BruteCluster& c) {
  std::vector<int> local(g.n, -1);
  SmallGraph out;
  local[root] = out.n++;
  for (int v = 0; v < g.n; ++v) {
    if (c.in[v] && v != root) local[v] = out.n++;
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (c.open_edges[e]) out.edges.emplace_back(local[g.edges[e].first], local[g.edges[e].second]);
  }
  return out;
}

// P(|K| = n) on the d-regular tree by Lagrange inversion:
// (1-p)^d for n = 1, else d p^{n-1} C((d-1)n, n-2) (1-p)^{(d-2)n+2} / (n-1).
inline Rational tree_law_closed_form(int d, const Rational& p, int n) {
  auto pw = [](const Rational& x, long e) { return power(x, static_cast<int>(e)); };
  if (n == 1) return pw(1 - p, d);
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>((d - 1) * n), static_cast<unsigned long>(n - 2));
  return Rational(d) * pw(p, n - 1) * Rational(c) * pw(1 - p, static_cast<long>(d - 2) * n + 2) / (n - 1);
}

// Exact decay rate of the closed form in |K|.
inline double tree_zeta_vertices(int d, double p) {
  const double growth = std::pow(d - 1.0, d - 1.0) / std::pow(d - 2.0, d - 2.0);
  return -std::log(growth * p * std::pow(1.0 - p, d - 2.0));
}

// alpha(p, zeta) by successively finer grid scans down to spacing 1e-9.
// The condition is increasing on [0, p], so at each level the first
// infeasible grid point brackets the supremum.
inline double alpha_grid_scan(double p, double zeta) {
  auto ok = [&](double a) {
    auto xlogx = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
    return -xlogx(a) - xlogx(1 - a) + a * std::log(p / (1 - p)) < zeta;
  };
  if (!ok(0.0)) return 0.0;
  double lo = 0.0, hi = p;
  for (double step = p / 1000; step >= 1e-9; step /= 1000) {
    double a = lo;
    while (a + step <= hi && ok(a + step)) a += step;
    if (a + step > hi && ok(hi)) return p;
    lo = a;
    hi = std::min(hi, a + step);
  }
  double step = 1e-9;
  double a = lo;
  while (a + step <= hi && ok(a + step)) a += step;
  return a;
}

// Every connected vertex set containing root inside `adj` whose touched
// edge count stays <= limit, by closure over single-vertex extensions.
// Returns the minimum of |∂S| / (2|E(S)|) for each |E(S)| bound 1..limit.
inline std::vector<std::optional<Rational>> brute_anchored(const std::vector<std::vector<int>>& adj,
                                                           const std::vector<bool>& halo, int root,
                                                           int limit) {
  auto stats = [&](const std::set<int>& s) {
    int internal2 = 0, boundary = 0;
    for (int v : s) {
      for (int u : adj[v]) (s.count(u) ? internal2 : boundary) += 1;
    }
    return std::pair{internal2 / 2 + boundary, boundary};
  };
  std::vector<std::optional<Rational>> best(limit + 1);
  std::set<std::set<int>> seen{{root}};
  std::vector<std::set<int>> frontier{{root}};
  while (!frontier.empty()) {
    std::vector<std::set<int>> next;
    for (const auto& s : frontier) {
      const auto [touched, boundary] = stats(s);
      if (touched > limit) continue;
      if (touched > 0) {
        Rational q(boundary, 2 * touched);
        q.canonicalize();
        for (int n = touched; n <= limit; ++n) {
          if (!best[n] || q < *best[n]) best[n] = q;
        }
      }
      for (int v : s) {
        for (int u : adj[v]) {
          if (s.count(u) || halo[u]) continue;
          auto t = s;
          t.insert(u);
          if (seen.insert(t).second) next.push_back(t);
        }
      }
    }
    frontier = std::move(next);
  }
  return best;
}

// p_{2n}(o, o) on the infinite d-regular tree through the distance chain.
inline std::vector<Rational> tree_return_probabilities(int d, int n_max) {
  std::vector<Rational> dist(2 * n_max + 2, 0), out{1};
  dist[0] = 1;
  for (int step = 1; step <= 2 * n_max; ++step) {
    std::vector<Rational> next(dist.size(), 0);
    for (std::size_t k = 0; k + 1 < dist.size(); ++k) {
      if (dist[k] == 0) continue;
      if (k == 0) {
        next[1] += dist[0];
      } else {
        next[k + 1] += dist[k] * Rational(d - 1, d);
        next[k - 1] += dist[k] * Rational(1, d);
      }
    }
    dist = std::move(next);
    if (step % 2 == 0) out.push_back(dist[0]);
  }
  return out;
}

}  // namespace oracle
