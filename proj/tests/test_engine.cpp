#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "percolab/cluster.hpp"
#include "percolab/errors.hpp"
#include "percolab/graph.hpp"
#include "percolab/rng.hpp"
#include "percolab/tail.hpp"
#include "percolab/trials.hpp"
#include "support.hpp"

using namespace percolab;

namespace {

bool subset(std::vector<VertexId> a, std::vector<VertexId> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// |x - mean| within k binomial standard deviations
bool within_sigma(double count, double trials, double prob, double k = 4.0) {
  const double sd = std::sqrt(trials * prob * (1 - prob));
  return std::abs(count - trials * prob) <= k * sd;
}

}  // namespace

TEST_CASE("labels are deterministic per seed") {
  const Graph g = hypercubic(2, 9);
  const EdgeLabelSample a(11), b(11), c(12);
  const auto m = a.materialize(g);
  REQUIRE(m.size() == g.edge_count());
  int same = 0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    CHECK(a(e) == b(e));
    CHECK(m[e] == a(e));
    CHECK(a(e) >= 0.0);
    CHECK(a(e) < 1.0);
    same += a(e) == c(e);
  }
  CHECK(same == 0);
}

TEST_CASE("labels look uniform") {
  const EdgeLabelSample u(2024);
  const int n = 200000;
  double sum = 0, below = 0;
  for (int e = 0; e < n; ++e) {
    sum += u(static_cast<EdgeId>(e));
    below += u(static_cast<EdgeId>(e)) < 0.3;
  }
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(within_sigma(below, n, 0.3));
}

TEST_CASE("extreme probabilities") {
  const Graph t = regular_tree(3, 5);
  const EdgeLabelSample labels(3);
  const Cluster closed = explore_cluster(t, labels, 0.0, t.origin());
  CHECK(closed.size() == 1);
  CHECK(closed.touched_count() == 3);
  CHECK(closed.open_edges.empty());
  CHECK_FALSE(closed.censored);
  CHECK(fluctuation(closed, 0.3) == doctest::Approx(0.9));

  const Cluster open = explore_cluster(t, labels, 1.0, t.origin());
  CHECK(open.censored);
  CHECK_THROWS_AS(fluctuation(open, 0.5), StateError);
  CHECK_THROWS_AS(explore_cluster(t, labels, 1.5, t.origin()), ParameterError);
  CHECK_THROWS_AS(explore_cluster(t, labels, 0.5, t.boundary().front()), ArgumentError);
}

TEST_CASE("explicit open set and fluctuation") {
  // path 0-1-2-3 with edges 0-1 open, 1-2 closed
  const Graph g = explicit_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  const Cluster c = cluster_from_open_set(g, {1, 0, 1}, 0);
  CHECK(c.vertices == std::vector<VertexId>{0, 1});
  CHECK(c.open_edges.size() == 1);
  CHECK(c.boundary_edges.size() == 1);
  CHECK(c.intrinsic_radius == 1);
  CHECK(fluctuation(c, 0.5) == doctest::Approx(0.0));
  CHECK(fluctuation(c, 0.75) == doctest::Approx(0.5));
}

TEST_CASE("finite tree clusters satisfy E = 2|K| + 1") {
  const Graph t = regular_tree(3, 8);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Cluster c = explore_cluster(t, EdgeLabelSample(seed), 0.45, t.origin());
    if (c.censored) continue;
    CHECK(c.touched_count() == 2 * c.size() + 1);
    CHECK(c.open_edges.size() == c.size() - 1);
    CHECK(c.boundary_edges.size() == c.size() + 2);
  }
}

TEST_CASE("the coupling is monotone in p") {
  const Graph z = hypercubic(2, 21);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const EdgeLabelSample labels(seed);
    const Cluster lo = explore_cluster(z, labels, 0.4, z.origin());
    const Cluster mid = explore_cluster(z, labels, 0.5, z.origin());
    const Cluster hi = explore_cluster(z, labels, 0.55, z.origin());
    // a censored exploration stops at the halo, so only finite ones nest
    CHECK(std::is_sorted(lo.vertices.begin(), lo.vertices.end()));
    if (!mid.censored) CHECK(subset(lo.vertices, mid.vertices));
    if (!hi.censored) CHECK(subset(mid.vertices, hi.vertices));
    if (lo.censored) CHECK(hi.censored);
  }
}

TEST_CASE("fast explorer agrees with the full explorer") {
  const Graph z = hypercubic(2, 15);
  const Graph t = regular_tree(3, 9);
  ClusterScratch scratch;
  for (const Graph* g : {&z, &t}) {
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
      const EdgeLabelSample labels(seed);
      const double p = g == &z ? 0.5 : 0.55;
      const Cluster c = explore_cluster(*g, labels, p, g->origin());
      const ClusterSummary s = measure_cluster(*g, labels, p, g->origin(), scratch, true);
      REQUIRE(s.censored == c.censored);
      if (c.censored) continue;
      CHECK(s.vertices == c.size());
      CHECK(s.touched == c.touched_count());
      CHECK(s.open == c.open_edges.size());
      CHECK(s.radius == static_cast<std::uint32_t>(c.intrinsic_radius));
    }
  }
}

TEST_CASE("balls") {
  const Graph t = regular_tree(3, 6);
  const EdgeLabelSample labels(1);
  const Cluster b0 = explore_ball(t, labels, 1.0, t.origin(), 0);
  CHECK(b0.size() == 1);
  const Cluster b2 = explore_ball(t, labels, 1.0, t.origin(), 2);
  CHECK(b2.size() == 10);
  CHECK(b2.intrinsic_radius == 2);
}

TEST_CASE("probability of an isolated root") {
  // E_v = 3 exactly when the three root edges are closed
  const Graph t = regular_tree(3, 4);
  TailOptions o;
  o.trials = 40000;
  o.seed = 99;
  const auto r = tail_histogram(t, 0.5, o);
  const double isolated = r.finite_counts.count(3) ? static_cast<double>(r.finite_counts.at(3)) : 0.0;
  CHECK(within_sigma(isolated, 40000, 0.125));
  std::uint64_t total = r.censored_count;
  for (const auto& [n, c] : r.finite_counts) total += c;
  CHECK(total == o.trials);
  CHECK(r.finite_total() + r.censored_count == o.trials);
  const auto surv = r.survival_counts();
  CHECK(surv.begin()->second == r.finite_total());
}

TEST_CASE("tail histogram at p = 0 and reproducibility across workers") {
  const Graph z = hypercubic(2, 11);
  TailOptions o;
  o.trials = 500;
  const auto closed = tail_histogram(z, 0.0, o);
  REQUIRE(closed.finite_counts.size() == 1);
  CHECK(closed.finite_counts.at(4) == 500);

  o.trials = 3000;
  o.seed = 17;
  o.workers = 1;
  const auto one = tail_histogram(z, 0.55, o);
  o.workers = 4;
  const auto four = tail_histogram(z, 0.55, o);
  CHECK(one.finite_counts == four.finite_counts);
  CHECK(one.censored_count == four.censored_count);
}

TEST_CASE("fit window errors") {
  const Graph t = regular_tree(3, 6);
  TailOptions o;
  o.trials = 200;
  const auto r = tail_histogram(t, 0.3, o);
  CHECK_THROWS_AS(fit_exponential_tail(r, FitWindow{500, 900}), FitError);
}

TEST_CASE("subcritical fit on the tree is near the exact rate") {
  // exact E_v rate at p = 0.3 on the 3-regular tree, in units of E_v = 2|K|+1
  const double zeta = oracle::tree_zeta_vertices(3, 0.3) / 2;
  const Graph t = regular_tree(3, 16);
  TailOptions o;
  o.trials = 200000;
  o.seed = 5;
  o.window = FitWindow{20, 60};
  const auto r = tail_histogram(t, 0.3, o);
  REQUIRE(r.fit);
  CHECK(r.fit->zeta_hat > 0.0);
  CHECK(r.fit->zeta_hat == doctest::Approx(zeta).epsilon(0.2));
}

TEST_CASE("observables") {
  const Graph t = regular_tree(3, 5);
  ObservablesOptions o;
  o.trials = 100;
  const auto closed = observables(t, 0.0, o);
  CHECK(closed.theta_hat == 0.0);
  REQUIRE(closed.chi_f_hat);
  CHECK(*closed.chi_f_hat == 1.0);
  CHECK(closed.kappa_hat == 1.0);
  const auto open = observables(t, 1.0, o);
  CHECK(open.theta_hat == 1.0);
  CHECK_FALSE(open.chi_f_hat);

  // triangle at p = 1/2: P(0 <-> 1) = 5/8, E[1/|K|] = 13/24
  const Graph tri = explicit_graph(3, {{0, 1}, {1, 2}, {2, 0}});
  o.trials = 40000;
  o.seed = 8;
  o.pair = std::pair<VertexId, VertexId>{0, 1};
  const auto r = observables(tri, 0.5, o);
  REQUIRE(r.tau_f_hat);
  CHECK(within_sigma(*r.tau_f_hat * 40000, 40000, 5.0 / 8));
  CHECK(r.kappa_hat == doctest::Approx(13.0 / 24).epsilon(0.02));
}

TEST_CASE("census totals") {
  const Graph z = hypercubic(2, 9);
  TailOptions o;
  o.trials = 2000;
  o.seed = 4;
  const auto c = cluster_census(z, 0.5, o);
  std::uint64_t total = c.censored;
  for (const auto& [key, n] : c.joint) {
    const auto [touched, open, radius] = key;
    CHECK(open <= touched);
    CHECK(radius <= open);
    total += n;
  }
  CHECK(total == 2000);
}

TEST_CASE("worker resolution") {
  CHECK(resolve_workers(3) == 3);
  CHECK(resolve_workers(0) >= 1);
}
