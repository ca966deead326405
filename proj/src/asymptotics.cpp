#include "percolab/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <type_traits>
#include <unordered_map>

#include "percolab/anatomy.hpp"
#include "percolab/cluster.hpp"
#include "percolab/exact.hpp"
#include "percolab/errors.hpp"
#include "percolab/trials.hpp"

namespace percolab {

namespace {

int exhaustion_radius(const Graph& g) {
  const auto& params = g.family().params;
  if (params.contains("radius")) return params["radius"].get<int>();
  if (params.contains("side")) return params["side"].get<int>() / 2;
  return 0;
}

VertexId pick_root(const Graph& g, VertexId requested) {
  const VertexId root = requested == kNoVertex ? g.origin() : requested;
  if (root >= g.vertex_count()) throw ArgumentError("root out of range");
  return root;
}

nlohmann::json optional_rational(const std::optional<Rational>& q) {
  if (!q) return nullptr;
  return q->get_d();
}

}  // namespace

// --- alpha -------------------------------------------------------------------

double alpha_condition(double alpha, double p) {
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
  return -xlogx(alpha) - xlogx(1.0 - alpha) + alpha * std::log(p / (1.0 - p));
}

AlphaSolution solve_alpha(double p, double zeta, double tol) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("p must lie in (0, 1)");
  if (!(zeta >= 0.0)) throw ParameterError("zeta must be >= 0");
  if (!(tol > 0.0)) throw ParameterError("tol must be > 0");
  AlphaSolution s;
  s.p = p;
  s.zeta = zeta;
  if (!(alpha_condition(0.0, p) < zeta)) {  // feasible set is empty
    s.alpha = 0.0;
    return s;
  }
  if (alpha_condition(p, p) < zeta || std::isinf(zeta)) {
    s.alpha = p;
    return s;
  }
  double lo = 0.0, hi = p;  // lo feasible, hi infeasible
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (alpha_condition(mid, p) < zeta ? lo : hi) = mid;
    ++s.iterations;
  }
  s.alpha = lo;
  s.residual = hi - lo;
  return s;
}

nlohmann::json to_json(const AlphaSolution& a) {
  return {{"p", a.p}, {"zeta", a.zeta}, {"alpha", a.alpha}, {"alpha_half", a.alpha / 2},
          {"iterations", a.iterations}, {"residual", a.residual}};
}

// --- zeta scan ----------------------------------------------------------------

std::vector<ZetaPoint> zeta_scan(const Graph& g, const std::vector<double>& p_grid,
                                 const TailOptions& options) {
  std::vector<ZetaPoint> out;
  for (double p : p_grid) {
    const TailReport report = tail_histogram(g, p, options);
    out.push_back({p, report.fit, report.fit_error, report.censored_count});
  }
  return out;
}

// --- anchored -------------------------------------------------------------------

Rational AnchoredRatio::edge_form() const {
  Rational q(boundary, 2 * touched);
  q.canonicalize();
  return q;
}

Rational AnchoredRatio::degree_form() const {
  // sum of degrees = 2 internal + boundary = 2 touched - boundary
  Rational q(boundary, 2 * touched - boundary);
  q.canonicalize();
  return q;
}

namespace {

/// Local view of the open subgraph around the root, built on demand.
class OpenView {
 public:
  OpenView(const Graph& g, const std::function<bool(EdgeId)>& open) : g_(g), open_(open) {}

  const std::vector<VertexId>& neighbours(VertexId v) {
    auto [it, inserted] = cache_.try_emplace(v);
    if (inserted) {
      for (const auto& h : g_.incident(v)) {
        if (open_(h.edge)) it->second.push_back(h.neighbor);
      }
    }
    return it->second;
  }

  bool halo(VertexId v) const { return g_.on_boundary(v); }

 private:
  const Graph& g_;
  const std::function<bool(EdgeId)>& open_;
  std::unordered_map<VertexId, std::vector<VertexId>> cache_;
};

struct SetStats {
  std::uint32_t internal = 0;
  std::uint32_t boundary = 0;
  AnchoredRatio ratio(std::uint32_t vertices) const {
    return {vertices, internal + boundary, boundary};
  }
};

// Stats after adding v to a set given by membership test `in`.
template <class In>
SetStats add_vertex(SetStats s, OpenView& view, VertexId v, const In& in) {
  for (VertexId u : view.neighbours(v)) {
    if (in(u)) {
      --s.boundary;
      ++s.internal;
    } else {
      ++s.boundary;
    }
  }
  return s;
}

void record(std::vector<std::optional<Rational>>& best, const AnchoredRatio& r) {
  if (r.touched == 0) return;
  const Rational q = r.edge_form();
  for (std::size_t n = r.touched; n < best.size(); ++n) {
    if (!best[n] || q < *best[n]) best[n] = q;
  }
}

void exact_search(OpenView& view, VertexId root, std::uint32_t limit, AnchoredCluster& out) {
  std::vector<VertexId> members{root};
  auto in = [&](VertexId u) { return std::find(members.begin(), members.end(), u) != members.end(); };
  std::vector<VertexId> blocked;  // excluded by earlier branches
  auto is_blocked = [&](VertexId u) { return std::find(blocked.begin(), blocked.end(), u) != blocked.end(); };

  const SetStats start = add_vertex(SetStats{}, view, root, in);
  if (start.internal + start.boundary > limit) return;

  // candidates: frontier vertices eligible for this branch, in order.
  std::function<void(SetStats, std::vector<VertexId>)> grow = [&](SetStats s, std::vector<VertexId> candidates) {
    ++out.exact_sets;
    record(out.exact, s.ratio(static_cast<std::uint32_t>(members.size())));
    const std::size_t blocked_mark = blocked.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const VertexId c = candidates[i];
      const SetStats next = add_vertex(s, view, c, in);
      if (next.internal + next.boundary <= limit) {
        members.push_back(c);
        std::vector<VertexId> rest(candidates.begin() + static_cast<std::ptrdiff_t>(i) + 1, candidates.end());
        for (VertexId u : view.neighbours(c)) {
          if (view.halo(u) || in(u) || is_blocked(u)) continue;
          if (std::find(rest.begin(), rest.end(), u) != rest.end()) continue;
          if (std::find(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(i), u) !=
              candidates.begin() + static_cast<std::ptrdiff_t>(i)) {
            continue;
          }
          rest.push_back(u);
        }
        grow(next, std::move(rest));
        members.pop_back();
      }
      blocked.push_back(c);
      if (out.exact_sets > kMaxAnimals) throw SizeError("anchored search exceeded the subgraph guard");
    }
    blocked.resize(blocked_mark);
  };

  std::vector<VertexId> first;
  for (VertexId u : view.neighbours(root)) {
    if (!view.halo(u) && std::find(first.begin(), first.end(), u) == first.end()) first.push_back(u);
  }
  grow(start, first);
}

void greedy_search(OpenView& view, VertexId root, std::uint32_t n_max, AnchoredCluster& out) {
  std::vector<VertexId> members{root};
  std::unordered_map<VertexId, char> in_set{{root, 1}};
  auto in = [&](VertexId u) { return in_set.count(u) != 0; };
  SetStats s = add_vertex(SetStats{}, view, root, in);
  std::vector<VertexId> frontier;
  auto refresh_frontier = [&](VertexId v) {
    for (VertexId u : view.neighbours(v)) {
      if (!view.halo(u) && !in(u) && std::find(frontier.begin(), frontier.end(), u) == frontier.end()) {
        frontier.push_back(u);
      }
    }
  };
  refresh_frontier(root);
  while (true) {
    const AnchoredRatio r = s.ratio(static_cast<std::uint32_t>(members.size()));
    out.greedy_path.push_back(r);
    record(out.greedy, r);
    if (r.touched > n_max || frontier.empty()) break;
    std::size_t best = 0;
    SetStats best_stats{};
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const SetStats cand = add_vertex(s, view, frontier[i], in);
      if (i == 0 || cand.boundary < best_stats.boundary ||
          (cand.boundary == best_stats.boundary && frontier[i] < frontier[best])) {
        best = i;
        best_stats = cand;
      }
    }
    const VertexId v = frontier[best];
    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(best));
    s = best_stats;
    members.push_back(v);
    in_set[v] = 1;
    refresh_frontier(v);
  }
}

void ball_search(OpenView& view, VertexId root, int radius, AnchoredCluster& out) {
  std::unordered_map<VertexId, int> dist{{root, 0}};
  std::vector<VertexId> shell{root};
  auto in = [&](VertexId u) { return dist.count(u) != 0; };
  SetStats s = add_vertex(SetStats{}, view, root, [](VertexId) { return false; });
  std::uint32_t vertices = 1;
  out.balls.push_back(s.ratio(vertices));
  for (int r = 1; r <= radius; ++r) {
    std::vector<VertexId> next;
    for (VertexId v : shell) {
      for (VertexId u : view.neighbours(v)) {
        if (in(u)) continue;
        if (view.halo(u)) return;  // the ball would leave the interior
        dist[u] = r;
        next.push_back(u);
      }
    }
    if (next.empty()) return;
    std::sort(next.begin(), next.end());
    for (VertexId u : next) {
      // count u's edges to members added before it
      SetStats t = s;
      for (VertexId w : view.neighbours(u)) {
        const auto it = dist.find(w);
        const bool earlier = it != dist.end() && (it->second < r || (it->second == r && w < u));
        if (earlier) {
          --t.boundary;
          ++t.internal;
        } else {
          ++t.boundary;
        }
      }
      s = t;
      ++vertices;
    }
    out.balls.push_back(s.ratio(vertices));
    shell = std::move(next);
  }
}

}  // namespace

AnchoredCluster anchored_cluster(const Graph& g, const std::function<bool(EdgeId)>& open,
                                 VertexId root, std::uint32_t n_max, int ball_radius) {
  if (g.on_boundary(root)) throw ArgumentError("root lies on the halo");
  OpenView view(g, open);
  AnchoredCluster out;
  out.greedy.assign(n_max + 1, std::nullopt);
  out.exact.assign(std::min(n_max, kAnchoredExactEdges) + 1, std::nullopt);
  greedy_search(view, root, n_max, out);
  exact_search(view, root, std::min(n_max, kAnchoredExactEdges), out);
  ball_search(view, root, ball_radius, out);
  return out;
}

namespace {

struct AnchoredAccumulator {
  std::vector<AnchoredCluster> clusters;
  void merge(AnchoredAccumulator& o) {
    for (auto& c : o.clusters) clusters.push_back(std::move(c));
  }
};

}  // namespace

AnchoredProfile anchored_profile(const Graph& g, double p, const AnchoredOptions& options) {
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("p must lie in (0, 1]");
  if (options.trials == 0) throw ParameterError("trials must be >= 1");
  const VertexId root = pick_root(g, options.root);
  auto acc = run_trials<AnchoredAccumulator>(
      options.trials, resolve_workers(options.workers),
      [&](AnchoredAccumulator& a, std::uint64_t t, ClusterScratch&) {
        const EdgeLabelSample labels(options.seed + t);
        if (!explore_cluster(g, labels, p, root).censored) return;
        const std::function<bool(EdgeId)> open = [&](EdgeId e) { return labels.open(e, p); };
        AnchoredCluster c = anchored_cluster(g, open, root, options.n_max, options.ball_radius);
        c.trial = t;
        a.clusters.push_back(std::move(c));
      });
  if (acc.clusters.empty()) {
    throw StateError("no censored clusters found; increase p or the graph radius");
  }
  std::sort(acc.clusters.begin(), acc.clusters.end(),
            [](const auto& a, const auto& b) { return a.trial < b.trial; });
  AnchoredProfile out;
  out.p = p;
  out.trials = options.trials;
  out.seed = options.seed;
  out.radius = exhaustion_radius(g);
  out.clusters = std::move(acc.clusters);
  if (options.zeta && p < 1.0) out.alpha = solve_alpha(p, *options.zeta);
  return out;
}

nlohmann::json to_json(const AnchoredProfile& profile) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : profile.clusters) {
    nlohmann::json greedy = nlohmann::json::array(), exact = nlohmann::json::array(),
                   balls = nlohmann::json::array();
    for (const auto& q : c.greedy) greedy.push_back(optional_rational(q));
    for (const auto& q : c.exact) exact.push_back(optional_rational(q));
    for (const auto& b : c.balls) {
      balls.push_back({{"vertices", b.vertices}, {"touched", b.touched}, {"boundary", b.boundary},
                       {"edge_form", b.edge_form().get_d()}, {"degree_form", b.degree_form().get_d()}});
    }
    clusters.push_back({{"trial", c.trial}, {"greedy", greedy}, {"exact", exact}, {"balls", balls},
                        {"exact_sets", c.exact_sets}});
  }
  nlohmann::json out = {{"p", profile.p},           {"trials", profile.trials},
                        {"seed", profile.seed},     {"radius", profile.radius},
                        {"censored", profile.clusters.size()}, {"clusters", clusters}};
  if (profile.alpha) out["alpha"] = to_json(*profile.alpha);
  return out;
}

void write_anchored_csv(std::ostream& out, const AnchoredProfile& profile) {
  out << "# p=" << profile.p << " seed=" << profile.seed << " radius=" << profile.radius
      << " trials=" << profile.trials << " censored=" << profile.clusters.size();
  if (profile.alpha) out << " alpha_half=" << profile.alpha->alpha / 2;
  out << "\nn,greedy_mean,greedy_min,exact_mean,exact_min,clusters\n";
  std::size_t n_top = 0;
  for (const auto& c : profile.clusters) n_top = std::max(n_top, c.greedy.size());
  for (std::size_t n = 1; n < n_top; ++n) {
    double gsum = 0, gmin = std::numeric_limits<double>::infinity(), esum = 0,
           emin = std::numeric_limits<double>::infinity();
    std::size_t gcount = 0, ecount = 0;
    for (const auto& c : profile.clusters) {
      if (n < c.greedy.size() && c.greedy[n]) {
        const double x = c.greedy[n]->get_d();
        gsum += x;
        gmin = std::min(gmin, x);
        ++gcount;
      }
      if (n < c.exact.size() && c.exact[n]) {
        const double x = c.exact[n]->get_d();
        esum += x;
        emin = std::min(emin, x);
        ++ecount;
      }
    }
    if (gcount == 0) continue;
    out << n << ',' << gsum / gcount << ',' << gmin << ',';
    if (ecount) {
      out << esum / ecount << ',' << emin;
    } else {
      out << ',';
    }
    out << ',' << gcount << '\n';
  }
}

// --- walk -------------------------------------------------------------------------

WalkGraph walk_graph(const Graph& g, const std::function<bool(EdgeId)>& open, VertexId root) {
  WalkGraph w;
  std::unordered_map<VertexId, std::uint32_t> local{{root, 0}};
  w.global.push_back(root);
  w.adjacency.emplace_back();
  std::deque<VertexId> queue{root};
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    const std::uint32_t lv = local.at(v);
    if (g.on_boundary(v)) w.touches_halo = true;
    for (const auto& h : g.incident(v)) {
      if (!open(h.edge)) continue;
      auto [it, inserted] = local.try_emplace(h.neighbor, static_cast<std::uint32_t>(w.global.size()));
      if (inserted) {
        w.global.push_back(h.neighbor);
        w.adjacency.emplace_back();
        queue.push_back(h.neighbor);
      }
      w.adjacency[lv].push_back(it->second);
      if (lv < it->second) ++w.edge_count;
    }
  }
  return w;
}

namespace {

template <class T>
WalkSeries<T> power_walk(const WalkGraph& w, int n_max) {
  if (n_max < 0) throw ParameterError("n_max must be >= 0");
  WalkSeries<T> out;
  out.p2n.push_back(T(1));
  out.log_scale.push_back(0.0);
  if (w.adjacency.empty() || w.adjacency[0].empty()) {
    out.degenerate = true;
    return out;
  }
  const std::size_t n = w.adjacency.size();
  std::vector<T> cur(n, T(0)), next(n, T(0));
  std::vector<T> inv_deg(n);
  for (std::size_t v = 0; v < n; ++v) inv_deg[v] = T(1) / T(static_cast<long>(w.adjacency[v].size()));
  cur[0] = T(1);
  double log_scale = 0.0;
  for (int step = 1; step <= 2 * n_max; ++step) {
    for (auto& x : next) x = T(0);
    for (std::size_t v = 0; v < n; ++v) {
      if (cur[v] == T(0)) continue;
      const T share = cur[v] * inv_deg[v];
      for (std::uint32_t u : w.adjacency[v]) next[u] += share;
    }
    std::swap(cur, next);
    if constexpr (std::is_same_v<T, double>) {
      double sum = 0.0, top = 0.0;
      for (double x : cur) {
        sum += x;
        top = std::max(top, x);
      }
      out.mass_error.push_back(std::abs(sum * std::exp(log_scale) - 1.0));
      if (top > 0.0 && top < 1e-280) {  // keep entries representable
        const int shift = -std::ilogb(top);
        for (double& x : cur) x = std::ldexp(x, shift);
        log_scale -= shift * std::log(2.0);
      }
    }
    if (step % 2 == 0) {
      out.p2n.push_back(cur[0]);
      out.log_scale.push_back(log_scale);
    }
  }
  return out;
}

}  // namespace

WalkSeries<double> walk_series(const WalkGraph& w, int n_max) { return power_walk<double>(w, n_max); }

WalkSeries<Rational> walk_series_exact(const WalkGraph& w, int n_max) {
  return power_walk<Rational>(w, n_max);
}

Rational walk_p2_closed_form(const WalkGraph& w) {
  if (w.adjacency.empty() || w.adjacency[0].empty()) return Rational(0);
  Rational sum = 0;
  const long d0 = static_cast<long>(w.adjacency[0].size());
  for (std::uint32_t u : w.adjacency[0]) sum += Rational(1, d0 * static_cast<long>(w.adjacency[u].size()));
  return sum;
}

WalkReport walk_return(const Graph& g, double p, std::uint64_t seed, int n_max, VertexId root,
                       int n_min, bool accept_finite) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0, 1]");
  if (n_max < 1) throw ParameterError("n_max must be >= 1");
  if (n_min < 1 || n_min > n_max) throw ParameterError("n_min must lie in [1, n_max]");
  root = pick_root(g, root);
  const EdgeLabelSample labels(seed);
  const Cluster cluster = explore_cluster(g, labels, p, root);
  if (!cluster.censored && !accept_finite) {
    throw StateError("root cluster is finite; pass accept_finite or raise p");
  }
  const WalkGraph w = walk_graph(g, [&](EdgeId e) { return labels.open(e, p); }, root);
  const WalkSeries<double> series = walk_series(w, n_max);
  WalkReport r;
  r.p = p;
  r.seed = seed;
  r.root = root;
  r.radius = exhaustion_radius(g);
  r.censored = cluster.censored;
  r.vertices = w.global.size();
  r.edges = w.edge_count;
  r.degenerate = series.degenerate;
  r.n_min = n_min;
  for (std::size_t n = 0; n < series.p2n.size(); ++n) {
    r.log_p2n.push_back(series.p2n[n] > 0.0 ? std::log(series.p2n[n]) + series.log_scale[n]
                                            : -std::numeric_limits<double>::infinity());
  }
  for (int n = n_min; n < static_cast<int>(r.log_p2n.size()); ++n) {
    r.diagnostic.push_back(-r.log_p2n[n] / std::cbrt(static_cast<double>(n)));
  }
  for (double e : series.mass_error) r.max_mass_error = std::max(r.max_mass_error, e);
  return r;
}

nlohmann::json to_json(const WalkReport& r) {
  nlohmann::json logs = nlohmann::json::array(), diag = nlohmann::json::array();
  for (double x : r.log_p2n) {
    if (std::isfinite(x)) {
      logs.push_back(x);
    } else {
      logs.push_back("-inf");
    }
  }
  for (double x : r.diagnostic) {
    if (std::isfinite(x)) {
      diag.push_back(x);
    } else {
      diag.push_back("inf");
    }
  }
  return {{"p", r.p},           {"seed", r.seed},         {"root", r.root},
          {"radius", r.radius}, {"censored", r.censored}, {"vertices", r.vertices},
          {"edges", r.edges},   {"degenerate", r.degenerate}, {"n_min", r.n_min},
          {"log_p2n", logs},    {"diagnostic", diag},     {"max_mass_error", r.max_mass_error}};
}

void write_walk_csv(std::ostream& out, const WalkReport& r) {
  out << "# p=" << r.p << " seed=" << r.seed << " radius=" << r.radius << " root=" << r.root
      << " vertices=" << r.vertices << " censored=" << (r.censored ? 1 : 0) << "\n";
  out << "n,log_p2n,diagnostic\n";
  for (std::size_t n = 0; n < r.log_p2n.size(); ++n) {
    out << n << ',' << r.log_p2n[n] << ',';
    if (static_cast<int>(n) >= r.n_min) out << r.diagnostic[n - static_cast<std::size_t>(r.n_min)];
    out << '\n';
  }
}

// --- pipes ----------------------------------------------------------------------

namespace {

struct PipeAccumulator {
  std::vector<std::pair<std::uint64_t, std::vector<std::uint32_t>>> rows;  // (trial, per radius)
  std::uint64_t excluded = 0;
  void merge(PipeAccumulator& o) {
    for (auto& r : o.rows) rows.push_back(std::move(r));
    excluded += o.excluded;
  }
};

double quantile(std::vector<std::uint32_t> xs, double q) {
  // linear interpolation between order statistics
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (static_cast<double>(xs[hi]) - xs[lo]);
}

}  // namespace

PipeCensus pipe_census(const Graph& g, double p, const std::vector<int>& radius_grid,
                       const PipeOptions& options) {
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("p must lie in (0, 1]");
  if (options.trials == 0) throw ParameterError("trials must be >= 1");
  if (radius_grid.empty()) throw ParameterError("radius grid is empty");
  for (int r : radius_grid) {
    if (r < 1) throw ParameterError("radii must be >= 1");
  }
  const VertexId root = pick_root(g, options.root);
  auto acc = run_trials<PipeAccumulator>(
      options.trials, resolve_workers(options.workers),
      [&](PipeAccumulator& a, std::uint64_t t, ClusterScratch&) {
        const EdgeLabelSample labels(options.seed + t);
        if (!explore_cluster(g, labels, p, root).censored) {
          ++a.excluded;
          return;
        }
        std::vector<std::uint32_t> row;
        for (int r : radius_grid) row.push_back(longest_pipe(g, labels, p, root, r));
        a.rows.emplace_back(t, std::move(row));
      });
  if (acc.rows.empty()) throw StateError("no censored clusters found; increase p or the graph radius");
  std::sort(acc.rows.begin(), acc.rows.end());

  PipeCensus c;
  c.p = p;
  c.trials = options.trials;
  c.seed = options.seed;
  c.censored = acc.rows.size();
  c.excluded = acc.excluded;
  c.samples.assign(radius_grid.size(), {});
  for (const auto& [t, row] : acc.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) c.samples[i].push_back(row[i]);
  }
  for (std::size_t i = 0; i < radius_grid.size(); ++i) {
    const auto& xs = c.samples[i];
    double mean = 0;
    for (auto x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    c.rows.push_back({radius_grid[i], quantile(xs, 0.1), quantile(xs, 0.25), quantile(xs, 0.5),
                      quantile(xs, 0.75), quantile(xs, 0.9), mean});
  }
  if (c.rows.size() >= 2) {
    const auto k = static_cast<Eigen::Index>(c.rows.size());
    Eigen::MatrixXd X(k, 2);
    Eigen::VectorXd y(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = c.rows[static_cast<std::size_t>(i)].radius;
      y(i) = c.rows[static_cast<std::size_t>(i)].median;
    }
    const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(y);
    c.slope = beta(1);
    if (k > 2) {
      const double ssr = (y - X * beta).squaredNorm();
      const Eigen::Matrix2d cov = (X.transpose() * X).inverse() * (ssr / static_cast<double>(k - 2));
      c.slope_stderr = std::sqrt(std::max(0.0, cov(1, 1)));
    }
  }
  return c;
}

nlohmann::json to_json(const PipeCensus& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"radius", r.radius}, {"q10", r.q10}, {"q25", r.q25}, {"median", r.median},
                    {"q75", r.q75}, {"q90", r.q90}, {"mean", r.mean}});
  }
  return {{"p", c.p},           {"trials", c.trials},   {"seed", c.seed},
          {"censored", c.censored}, {"excluded", c.excluded}, {"rows", rows},
          {"slope", c.slope},   {"slope_stderr", c.slope_stderr}};
}

void write_pipe_csv(std::ostream& out, const PipeCensus& c) {
  out << "# p=" << c.p << " seed=" << c.seed << " trials=" << c.trials << " censored=" << c.censored
      << " excluded=" << c.excluded << " slope=" << c.slope << " slope_stderr=" << c.slope_stderr << "\n";
  out << "r,q10,q25,median,q75,q90,mean\n";
  for (const auto& r : c.rows) {
    out << r.radius << ',' << r.q10 << ',' << r.q25 << ',' << r.median << ',' << r.q75 << ',' << r.q90
        << ',' << r.mean << '\n';
  }
}

}  // namespace percolab
