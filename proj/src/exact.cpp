#include "percolab/exact.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

#include "percolab/anatomy.hpp"
#include "percolab/errors.hpp"

namespace percolab {

ClusterFunctional functional_one() {
  return {"1", [](const ClusterShape&) { return Rational(1); }};
}

ClusterFunctional functional_touched() {
  return {"E_v", [](const ClusterShape& h) { return Rational(h.touched); }};
}

ClusterFunctional functional_size() {
  return {"K_v", [](const ClusterShape& h) { return Rational(h.vertices); }};
}

ClusterFunctional functional_exp_touched(const Rational& t) {
  Rational r = 0, term = 1;
  for (int i = 0; i <= 12; ++i) {
    r += term;
    term = term * t / (i + 1);
  }
  return {"exp_E_v*" + t.get_str(), [r](const ClusterShape& h) {
            Rational out = 1;
            for (std::uint32_t i = 0; i < h.touched; ++i) out *= r;
            return out;
          }};
}

ClusterFunctional functional_by_name(const std::string& name) {
  if (name == "1") return functional_one();
  if (name == "E_v") return functional_touched();
  if (name == "K_v") return functional_size();
  if (name == "exp_E_v/10") {
    auto f = functional_exp_touched(Rational(1, 10));
    f.name = name;
    return f;
  }
  throw ParameterError("unknown functional '" + name + "' (expected 1, E_v, K_v, exp_E_v/10)");
}

// ---------------------------------------------------------------------------

namespace {

// Bit-parallel view of a small graph for configuration sweeps.
struct SmallGraph {
  std::size_t n = 0, m = 0;
  std::vector<VertexId> eu, ev;
  std::vector<std::uint64_t> incident_edges;  // per vertex, bitmask over edges
  std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj;
  std::uint64_t halo = 0;

  explicit SmallGraph(const Graph& g) : n(g.vertex_count()), m(g.edge_count()) {
    if (m > kMaxEnumerationEdges) {
      throw SizeError("enumeration guard: " + std::to_string(m) + " edges > " +
                      std::to_string(kMaxEnumerationEdges));
    }
    if (n > kMaxEnumerationVertices) throw SizeError("enumeration guard: more than 64 vertices");
    incident_edges.assign(n, 0);
    adj.resize(n);
    for (EdgeId e = 0; e < m; ++e) {
      const Edge& ed = g.edge(e);
      eu.push_back(ed.u);
      ev.push_back(ed.v);
      incident_edges[ed.u] |= std::uint64_t{1} << e;
      incident_edges[ed.v] |= std::uint64_t{1} << e;
      adj[ed.u].emplace_back(ed.v, e);
      adj[ed.v].emplace_back(ed.u, e);
    }
    for (VertexId b : g.boundary()) halo |= std::uint64_t{1} << b;
  }

  // Root cluster in configuration `open`; stops at the first halo vertex.
  ClusterShape cluster(std::uint64_t open, VertexId root) const {
    ClusterShape s;
    VertexId queue[kMaxEnumerationVertices];
    std::uint32_t depth[kMaxEnumerationVertices];
    std::size_t head = 0, tail = 0;
    queue[tail] = root;
    depth[tail++] = 0;
    s.vertex_mask = std::uint64_t{1} << root;
    while (head < tail) {
      const VertexId u = queue[head];
      const std::uint32_t du = depth[head++];
      s.radius = std::max(s.radius, du);
      for (const auto& [w, e] : adj[u]) {
        if (!((open >> e) & 1) || ((s.vertex_mask >> w) & 1)) continue;
        s.vertex_mask |= std::uint64_t{1} << w;
        if ((halo >> w) & 1) {
          s.censored = true;
          return s;
        }
        queue[tail] = w;
        depth[tail++] = du + 1;
      }
    }
    std::uint64_t touched = 0;
    for (std::size_t i = 0; i < tail; ++i) touched |= incident_edges[queue[i]];
    s.open_mask = touched & open;
    s.touched = static_cast<std::uint32_t>(std::popcount(touched));
    s.open = static_cast<std::uint32_t>(std::popcount(s.open_mask));
    s.vertices = static_cast<std::uint32_t>(tail);
    return s;
  }
};

constexpr std::uint64_t kCensoredKey = ~std::uint64_t{0};

bool within(const ClusterShape& s, std::optional<std::uint32_t> n_cap) {
  return !s.censored && (!n_cap || s.touched <= *n_cap);
}

// sum_a table[a] p^a (1-p)^{total - a}
PolynomialInP from_open_table(const std::vector<Rational>& table, std::size_t total) {
  PolynomialInP out;
  for (std::size_t a = 0; a < table.size(); ++a) {
    if (table[a] != 0) {
      out += PolynomialInP::monomial_weight(static_cast<unsigned>(a),
                                            static_cast<unsigned>(total - a)) *
             table[a];
    }
  }
  return out;
}

void check_root(const Graph& g, VertexId root) {
  if (root >= g.vertex_count()) throw ArgumentError("root out of range");
  if (g.on_boundary(root)) throw ArgumentError("root lies on the boundary halo");
}

}  // namespace

PolynomialInP ConfigurationCensus::weight(const Bucket& b) const {
  std::vector<Rational> table(b.counts_by_open.begin(), b.counts_by_open.end());
  return from_open_table(table, edge_count);
}

ConfigurationCensus enumerate_configurations(const Graph& g, VertexId root) {
  check_root(g, root);
  const SmallGraph sg(g);
  ConfigurationCensus census;
  census.edge_count = sg.m;
  census.root = root;
  std::unordered_map<std::uint64_t, std::size_t> index;
  const std::uint64_t configs = std::uint64_t{1} << sg.m;
  for (std::uint64_t open = 0; open < configs; ++open) {
    const ClusterShape s = sg.cluster(open, root);
    const std::uint64_t key = s.censored ? kCensoredKey : s.open_mask;
    auto [it, fresh] = index.emplace(key, census.buckets.size());
    if (fresh) {
      ConfigurationCensus::Bucket b;
      b.shape = s;
      if (s.censored) b.shape = ClusterShape{.censored = true};
      b.counts_by_open.assign(sg.m + 1, 0);
      census.buckets.push_back(std::move(b));
    }
    ++census.buckets[it->second].counts_by_open[std::popcount(open)];
  }
  return census;
}

PolynomialInP enumerate_exact(const ConfigurationCensus& census, const ClusterFunctional& F,
                              std::optional<std::uint32_t> n_cap) {
  std::vector<Rational> table(census.edge_count + 1);
  for (const auto& b : census.buckets) {
    if (!within(b.shape, n_cap)) continue;
    const Rational f = F.f(b.shape);
    if (f == 0) continue;
    for (std::size_t a = 0; a < b.counts_by_open.size(); ++a) {
      if (b.counts_by_open[a]) table[a] += f * Rational(b.counts_by_open[a]);
    }
  }
  return from_open_table(table, census.edge_count);
}

PolynomialInP enumerate_exact(const Graph& g, VertexId root, const ClusterFunctional& F,
                              std::optional<std::uint32_t> n_cap) {
  return enumerate_exact(enumerate_configurations(g, root), F, n_cap);
}

// ---------------------------------------------------------------------------

void for_each_animal(const Graph& g, VertexId root, std::optional<std::uint32_t> n_cap,
                     const std::function<void(const ClusterShape&)>& visit) {
  check_root(g, root);
  std::vector<std::uint8_t> in_v(g.vertex_count()), seen(g.edge_count());
  std::uint64_t degree_sum = g.degree(root), internal = 0, open = 0, vertices = 1, emitted = 0;
  in_v[root] = 1;

  std::function<void(const std::vector<EdgeId>&)> grow = [&](const std::vector<EdgeId>& cands) {
    if (++emitted > kMaxAnimals) {
      throw SizeError("animal enumeration guard exceeded (" + std::to_string(kMaxAnimals) + ")");
    }
    ClusterShape s;
    s.touched = static_cast<std::uint32_t>(degree_sum - internal);
    s.open = static_cast<std::uint32_t>(open);
    s.vertices = static_cast<std::uint32_t>(vertices);
    visit(s);
    if (n_cap && open >= *n_cap) return;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const EdgeId e = cands[i];
      const Edge& ed = g.edge(e);
      const VertexId w = in_v[ed.u] ? (in_v[ed.v] ? kNoVertex : ed.v) : ed.u;
      std::vector<EdgeId> next(cands.begin() + static_cast<std::ptrdiff_t>(i) + 1, cands.end());
      std::vector<EdgeId> added;
      std::uint64_t new_internal = 0;
      ++open;
      if (w != kNoVertex) {
        for (const auto& [x, f] : g.incident(w)) {
          if (in_v[x]) ++new_internal;
          if (!seen[f] && !g.on_boundary(x)) {
            seen[f] = 1;
            next.push_back(f);
            added.push_back(f);
          }
        }
        in_v[w] = 1;
        degree_sum += g.degree(w);
        internal += new_internal;
        ++vertices;
      }
      grow(next);
      if (w != kNoVertex) {
        in_v[w] = 0;
        degree_sum -= g.degree(w);
        internal -= new_internal;
        --vertices;
      }
      --open;
      for (EdgeId f : added) seen[f] = 0;
    }
  };

  std::vector<EdgeId> start;
  for (const auto& [x, f] : g.incident(root)) {
    if (!g.on_boundary(x)) {
      seen[f] = 1;
      start.push_back(f);
    }
  }
  grow(start);
}

AnimalExpansion animal_expansion(const Graph& g, VertexId root, const ClusterFunctional& F,
                                 std::optional<std::uint32_t> n_cap) {
  // Accumulate F by (|E_o|, |∂H|) and expand the weights once at the end.
  std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> table;
  AnimalExpansion out;
  for_each_animal(g, root, n_cap, [&](const ClusterShape& h) {
    ++out.animals;
    ++out.count_by_open[h.open];
    const Rational f = F.f(h);
    if (f != 0) table[{h.open, h.boundary()}] += f;
  });
  for (const auto& [ab, f] : table) {
    out.value += PolynomialInP::monomial_weight(ab.first, ab.second) * f;
  }
  return out;
}

// ---------------------------------------------------------------------------

Rational RussoReport::max_abs_gap() const {
  Rational gap = 0;
  for (const auto& pt : points) {
    gap = std::max(gap, Rational(abs(pt.dEdp - (pt.U - pt.D))));
    gap = std::max(gap, Rational(abs(pt.dEdp + pt.M)));
  }
  return gap;
}

RussoReport russo_decomposition(const Graph& g, VertexId root, const ClusterFunctional& F,
                                std::uint32_t n, const std::vector<Rational>& p_grid) {
  if (n < 1) throw ParameterError("n must be >= 1");
  for (const auto& p : p_grid) {
    if (p <= 0 || p >= 1) throw ParameterError("russo grid points must lie in (0, 1)");
  }
  check_root(g, root);
  const SmallGraph sg(g);
  const ConfigurationCensus census = enumerate_configurations(g, root);

  RussoReport r;
  r.functional = F.name;
  r.n = n;
  r.expectation = enumerate_exact(census, F, n);
  r.derivative = r.expectation.derivative();
  for (const auto& b : census.buckets) {
    if (!within(b.shape, n)) continue;
    const Rational f = F.f(b.shape);
    if (f == 0) continue;
    const PolynomialInP h = PolynomialInP::p() * Rational(b.shape.boundary()) -
                            PolynomialInP::one_minus_p() * Rational(b.shape.open);
    r.h_moment += census.weight(b) * h * f;
  }

  // U and D: sum over edges e touching K(ω_e), where ω_e ranges over the
  // configurations with e closed and carries the weight of the other edges.
  std::vector<Rational> u_table(sg.m), d_table(sg.m);
  const std::uint64_t configs = std::uint64_t{1} << sg.m;
  for (std::uint64_t lower = 0; lower < configs; ++lower) {
    const ClusterShape k_lower = sg.cluster(lower, root);
    if (k_lower.censored) continue;
    std::uint64_t touched = 0;
    for (std::size_t v = 0; v < sg.n; ++v) {
      if ((k_lower.vertex_mask >> v) & 1) touched |= sg.incident_edges[v];
    }
    const std::uint64_t closed_touching = touched & ~lower;
    const auto a = static_cast<std::size_t>(std::popcount(lower));
    const Rational f_lower = F.f(k_lower);
    for (std::uint64_t rest = closed_touching; rest; rest &= rest - 1) {
      const int e = std::countr_zero(rest);
      const ClusterShape k_upper = sg.cluster(lower | (std::uint64_t{1} << e), root);
      const bool upper_within = within(k_upper, n);
      if (upper_within) u_table[a] += F.f(k_upper) - f_lower;
      if (k_lower.touched <= n && !upper_within) d_table[a] += f_lower;
    }
  }
  r.U = from_open_table(u_table, sg.m - 1);
  r.D = from_open_table(d_table, sg.m - 1);

  const PolynomialInP pq = PolynomialInP::p() * PolynomialInP::one_minus_p();
  r.identity_exact = (r.h_moment + pq * r.derivative).is_zero() && (r.derivative == r.U - r.D);
  for (const auto& p : p_grid) {
    RussoPoint pt;
    pt.p = p;
    pt.M = r.h_moment(p) / (p * (1 - p));
    pt.U = r.U(p);
    pt.D = r.D(p);
    pt.dEdp = r.derivative(p);
    r.points.push_back(pt);
  }
  return r;
}

// ---------------------------------------------------------------------------

PolynomialInP QTable::total(int k) const {
  PolynomialInP sum = censored;
  for (const auto& [key, poly] : entries) {
    if (std::get<0>(key) == k) sum += poly;
  }
  return sum;
}

QTable q_table(const Graph& g, VertexId root, int k_max) {
  if (k_max < 1) throw ParameterError("k_max must be >= 1");
  const ConfigurationCensus census = enumerate_configurations(g, root);
  QTable q;
  q.k_max = k_max;
  for (const auto& b : census.buckets) {
    const PolynomialInP w = census.weight(b);
    if (b.shape.censored) {
      q.censored += w;
      continue;
    }
    std::vector<EdgeId> open;
    for (std::uint64_t rest = b.shape.open_mask; rest; rest &= rest - 1) {
      open.push_back(static_cast<EdgeId>(std::countr_zero(rest)));
    }
    const BridgeTree t = bridge_tree(g, open, root);
    for (int k = 1; k <= k_max; ++k) {
      q.entries[{k, b.shape.touched, lf_k(t, k)}] += w;
    }
  }
  return q;
}

std::vector<Rational> uniform_p_grid(int points) {
  if (points < 1) throw ParameterError("grid needs at least one point");
  std::vector<Rational> grid;
  for (int i = 1; i <= points; ++i) grid.emplace_back(i, points + 1);
  for (auto& q : grid) q.canonicalize();
  return grid;
}

nlohmann::json to_json(const RussoReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& pt : r.points) {
    pts.push_back({{"p", pt.p.get_str()},
                   {"M", pt.M.get_str()},
                   {"U", pt.U.get_str()},
                   {"D", pt.D.get_str()},
                   {"dEdp", pt.dEdp.get_str()}});
  }
  return {{"functional", r.functional},
          {"n", r.n},
          {"expectation", r.expectation.to_json()},
          {"derivative", r.derivative.to_json()},
          {"identity_exact", r.identity_exact},
          {"max_abs_gap", r.max_abs_gap().get_str()},
          {"points", pts}};
}

nlohmann::json to_json(const QTable& q) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [key, poly] : q.entries) {
    const auto& [k, n, m] = key;
    entries.push_back({{"k", k}, {"n", n}, {"m", m}, {"probability", poly.to_json()}});
  }
  return {{"k_max", q.k_max}, {"censored", q.censored.to_json()}, {"entries", entries}};
}

}  // namespace percolab
