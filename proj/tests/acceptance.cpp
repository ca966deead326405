// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance [--criterion N]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "percolab/anatomy.hpp"
#include "percolab/asymptotics.hpp"
#include "percolab/bounds.hpp"
#include "percolab/exact.hpp"
#include "percolab/graph.hpp"
#include "percolab/tail.hpp"
#include "percolab/tree_law.hpp"
#include "support.hpp"

#ifndef PERCOLAB_CLI
#define PERCOLAB_CLI "percolab"
#endif
#ifndef PERCOLAB_WORK_DIR
#define PERCOLAB_WORK_DIR "acceptance_work"
#endif

using namespace percolab;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// --- 1 ------------------------------------------------------------------------

Outcome russo_identity() {
  const auto grid = uniform_p_grid(9);
  std::size_t graphs = 0, reports = 0, failures = 0;
  for (const auto& file : testing::corpus_files()) {
    const Graph g = load_graph(file);
    if (g.edge_count() > 12) continue;
    ++graphs;
    for (std::uint32_t n = 1; n <= g.edge_count(); ++n) {
      for (const auto& f : {functional_one(), functional_touched(), functional_size()}) {
        const auto r = russo_decomposition(g, g.origin(), f, n, grid);
        ++reports;
        bool ok = r.identity_exact && r.max_abs_gap() == 0;
        for (const auto& pt : r.points) ok = ok && pt.dEdp == -pt.M && pt.dEdp == pt.U - pt.D;
        failures += !ok;
      }
    }
  }
  return {graphs >= 10 && failures == 0,
          std::to_string(graphs) + " graphs, " + std::to_string(reports) + " (n, F) reports x 9 p, " +
              std::to_string(failures) + " mismatches"};
}

// --- 2 ------------------------------------------------------------------------

Outcome anatomy_oracle() {
  const Graph z = hypercubic(2, 15);
  const Graph t = regular_tree(3, 8);
  std::mt19937_64 rng(2);
  int clusters = 0, mismatches = 0;
  for (std::uint64_t seed = 0; clusters < 500 && seed < 200000; ++seed) {
    std::optional<Graph> random_graph;
    const Graph* g = nullptr;
    double p = 0.5;
    switch (seed % 3) {
      case 0: g = &z; break;
      case 1: g = &t; p = 0.55; break;
      default: {
        // dense random graphs give clusters with many 2-blocks
        const int n = std::uniform_int_distribution<int>(3, 14)(rng);
        const int m = std::uniform_int_distribution<int>(n - 1, std::min(n * (n - 1) / 2, 2 * n))(rng);
        random_graph.emplace(explicit_graph(n, testing::random_connected_edges(rng, n, m)));
        g = &*random_graph;
        p = 0.7;
      }
    }
    const Cluster c = explore_cluster(*g, EdgeLabelSample(seed), p, g->origin());
    if (c.censored || c.size() < 2 || c.size() > 14) continue;
    ++clusters;
    const auto local = testing::localize(*g, c);
    const BridgeTree bt = bridge_tree(*g, c);
    for (int k = 1; k <= 3; ++k) mismatches += br_k(bt, k) != oracle::brute_br_k(local.graph, 0, k);
  }
  return {clusters == 500 && mismatches == 0,
          std::to_string(clusters) + " clusters, k = 1..3, " + std::to_string(mismatches) + " mismatches"};
}

// --- 3 ------------------------------------------------------------------------

Outcome menger_duality() {
  std::mt19937_64 rng(3);
  int graphs = 0, mismatches = 0, trees = 0, euler_fail = 0;
  while (graphs < 200) {
    const int n = std::uniform_int_distribution<int>(4, 14)(rng);
    const int m = std::uniform_int_distribution<int>(n - 1, std::min(n * (n - 1) / 2, 30))(rng);
    const auto edges = testing::random_connected_edges(rng, n, m);
    const int halo_size = std::uniform_int_distribution<int>(1, std::min(4, n - 2))(rng);
    std::vector<VertexId> halo;
    for (int v = n - halo_size; v < n; ++v) halo.push_back(static_cast<VertexId>(v));
    const Graph g(n, edges, halo);
    std::vector<std::uint8_t> open(g.edge_count());
    for (auto& o : open) o = std::bernoulli_distribution(0.65)(rng);
    std::vector<VertexId> s{0};
    if (n - halo_size > 3 && graphs % 3 == 0) s.push_back(1);
    const auto r = menger_paths(g, open, s);
    const std::vector<bool> ob(open.begin(), open.end());
    const int cut = oracle::brute_min_cut(testing::to_small(g), ob, {s.begin(), s.end()});
    mismatches += static_cast<int>(r.paths) != cut || r.min_cut.size() != r.paths ||
                  !menger_certificate_holds(g, open, s, r);
    ++graphs;
  }
  while (trees < 200) {
    const int n = std::uniform_int_distribution<int>(3, 30)(rng);
    const auto edges = testing::random_connected_edges(rng, n, n - 1);
    std::vector<int> deg(n, 0);
    for (const auto& e : edges) ++deg[e.u], ++deg[e.v];
    std::vector<VertexId> halo, inner;
    for (int v = 0; v < n; ++v) (deg[v] == 1 ? halo : inner).push_back(static_cast<VertexId>(v));
    const Graph g(n, edges, halo);
    std::vector<VertexId> a;
    for (VertexId v : inner) {
      if (std::bernoulli_distribution(0.5)(rng)) a.push_back(v);
    }
    if (a.empty()) a.push_back(inner.front());
    euler_fail += !euler_paths_check(g, std::vector<std::uint8_t>(g.edge_count(), 1), inner.front(), a).ok;
    ++trees;
  }
  return {mismatches == 0 && euler_fail == 0,
          std::to_string(graphs) + " halo graphs (" + std::to_string(mismatches) + " mismatches), " +
              std::to_string(trees) + " open trees (" + std::to_string(euler_fail) + " Euler failures)"};
}

// --- 4 ------------------------------------------------------------------------

// Least-squares slope of log P(n <= E_v < inf) under the exact tree law over
// [n_min, n_max]; E_v = 2|K| + 1 on the 3-regular tree.
double exact_window_slope(const TreeClusterLaw& law, std::uint32_t n_min, std::uint32_t n_max) {
  std::vector<double> xs, ys;
  for (std::uint32_t n = n_min; n <= n_max; ++n) {
    double s = 0.0;
    for (int k = 1; k <= law.n_max(); ++k) {
      if (2 * k + 1 >= static_cast<int>(n)) s += law.probability(k);
    }
    xs.push_back(n);
    ys.push_back(std::log(s));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return -sxy / sxx;
}

Outcome tree_decay() {
  const Graph t = regular_tree(3, 24);
  TailOptions o;
  o.trials = 1'000'000;
  o.seed = 7;
  o.window = FitWindow{40, 200};
  const auto r = tail_histogram(t, 0.7, o);
  const auto law = tree_cluster_law(3, Rational(7, 10), kTreeLawMaxN);
  const double zeta = law.zeta_touched;
  if (!r.fit) return {false, "fit failed: " + r.fit_error};
  const auto& f = *r.fit;
  const double z = f.zeta_stderr > 0 ? f.zeta_hat / f.zeta_stderr : 0.0;
  const double rel = std::abs(f.zeta_hat - zeta) / zeta;
  const double finite_window = exact_window_slope(law, f.n_min, f.n_max);
  return {f.zeta_hat > 0 && z > 5 && rel <= 0.15,
          "zeta_hat=" + fmt("%.5f", f.zeta_hat) + " +- " + fmt("%.5f", f.zeta_stderr) + " z=" + fmt("%.1f", z) +
              " window=" + std::to_string(f.n_min) + ".." + std::to_string(f.n_max) + " zeta_tree=" +
              fmt("%.5f", zeta) + " rel_err=" + fmt("%.3f", rel) + " (tol 0.15); exact-law slope on the same window=" +
              fmt("%.5f", finite_window)};
}

// --- 5 ------------------------------------------------------------------------

Outcome amenable_contrast() {
  const Graph z = hypercubic(2, 129);
  TailOptions o;
  o.trials = 100'000;
  o.seed = 11;
  const auto r = tail_histogram(z, 0.6, o);
  const auto s = fit_stretched_tail(r, FitWindow{});
  const bool kappa_ok = s.kappa >= 0.35 && s.kappa <= 0.7;
  const bool rejected = s.exponential_residual >= 2.0 * s.residual;
  return {kappa_ok && rejected,
          "kappa=" + fmt("%.3f", s.kappa) + " (need [0.35, 0.7]) exp_residual/stretched_residual=" +
              fmt("%.2f", s.residual > 0 ? s.exponential_residual / s.residual : INFINITY) + " (need >= 2), " +
              std::to_string(s.points) + " bins, censored=" + std::to_string(r.censored_count)};
}

// --- 6 ------------------------------------------------------------------------

Outcome bound_suite() {
  std::size_t checks = 0, violations = 0;
  auto tally = [&](const BoundCheck& c) {
    ++checks;
    violations += !c.pass;
  };
  for (const auto& file : testing::corpus_files()) {
    const Graph g = load_graph(file);
    const auto census = enumerate_configurations(g, g.origin());
    for (int i = 1; i <= 9; ++i) {
      const Rational p(i, 10);
      for (const auto& c : check_skinny_radius(census, p)) tally(c);
      for (const auto& a : {Rational(3, 10), Rational(1, 2)}) {
        for (const auto& c : check_azuma(census, p, a)) tally(c);
      }
      for (int k : {1, 2}) tally(check_moment_bound(g, census, p, Rational(1), k));
    }
  }
  const std::size_t exact_checks = checks;
  struct McCase {
    Graph g;
    double p;
  };
  const std::vector<McCase> cases{{regular_tree(3, 16), 0.4}, {regular_tree(3, 16), 0.6},
                                  {hypercubic(2, 65), 0.45}, {hypercubic(2, 65), 0.55}};
  for (const auto& c : cases) {
    TailOptions o;
    o.trials = 20000;
    o.seed = 6;
    const auto census = cluster_census(c.g, c.p, o);
    for (const auto& b : check_skinny_radius_mc(census, 64)) tally(b);
    for (double a : {0.3, 0.5}) {
      for (const auto& b : check_azuma_mc(census, a)) tally(b);
    }
  }
  for (int k : {1, 2}) {
    MomentOptions mo;
    mo.trials = 20000;
    mo.seed = 6;
    tally(check_moment_bound_mc(regular_tree(3, 16), 0.6, 1.0, k, mo));
  }
  return {violations == 0, std::to_string(exact_checks) + " exact + " + std::to_string(checks - exact_checks) +
                               " Monte Carlo checks, " + std::to_string(violations) + " violations"};
}

// --- 7 ------------------------------------------------------------------------

Outcome alpha_solver() {
  std::mt19937_64 rng(7);
  double worst = 0;
  bool bounded = true;
  for (int i = 0; i < 20; ++i) {
    const double p = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const double zeta = std::uniform_real_distribution<double>(0.0, 1.2 * -std::log(1 - p))(rng);
    const double a = solve_alpha(p, zeta).alpha;
    worst = std::max(worst, std::abs(a - oracle::alpha_grid_scan(p, zeta)));
    bounded = bounded && a >= 0 && a <= p;
  }
  bool zero = true;
  for (double p : {0.1, 0.5, 0.7, 0.9}) zero = zero && solve_alpha(p, 0.0).alpha == 0.0;
  return {worst <= 1e-9 && zero && bounded,
          "max |alpha - scan|=" + fmt("%.2e", worst) + " over 20 pairs (tol 1e-9), alpha(p,0)=0: " +
              (zero ? "yes" : "no") + ", alpha<=p: " + (bounded ? "yes" : "no")};
}

// --- 8 ------------------------------------------------------------------------

Outcome anchored_expansion() {
  std::ifstream in(std::filesystem::path(PERCOLAB_CORPUS_DIR) / "thresholds" / "anchored_expansion.json");
  const auto th = nlohmann::json::parse(in);
  const double min_ratio = th.at("min_ratio");
  const double min_fraction = th.at("min_fraction");
  const std::size_t want = th.at("clusters");
  const Graph t = regular_tree(th.at("degree"), th.at("radius"));
  AnchoredOptions o;
  o.seed = th.at("seed");
  o.n_max = kAnchoredExactEdges;
  // enough trials that at least `want` clusters are censored at p = 0.9
  o.trials = want + want / 10;
  auto prof = anchored_profile(t, th.at("p"), o);
  while (prof.clusters.size() < want) {
    o.trials += want / 10;
    prof = anchored_profile(t, th.at("p"), o);
  }
  std::size_t good = 0;
  double lowest = 1.0;
  for (std::size_t i = 0; i < want; ++i) {
    const auto& e = prof.clusters[i].exact[kAnchoredExactEdges];
    const double v = e ? to_double(*e) : 0.0;
    lowest = std::min(lowest, v);
    good += v >= min_ratio;
  }
  const double frac = static_cast<double>(good) / want;
  return {frac >= min_fraction, std::to_string(want) + " censored clusters, fraction >= " + fmt("%.2f", min_ratio) +
                                    ": " + fmt("%.4f", frac) + " (need " + fmt("%.2f", min_fraction) +
                                    ", empirical threshold), lowest=" + fmt("%.4f", lowest)};
}

// --- 9 ------------------------------------------------------------------------

Outcome walk_exactness() {
  const Graph t = regular_tree(3, 8);
  const Graph z = hypercubic(2, 15);
  int clusters = 0, identity_fail = 0;
  double worst_mass = 0;
  for (std::uint64_t seed = 0; clusters < 100 && seed < 10000; ++seed) {
    const Graph& g = seed % 2 ? z : t;
    const double p = seed % 2 ? 0.6 : 0.7;
    const EdgeLabelSample labels(seed);
    const auto w = walk_graph(g, [&](EdgeId e) { return labels.open(e, p); }, g.origin());
    if (w.adjacency.size() < 2) continue;
    ++clusters;
    identity_fail += walk_series_exact(w, 1).p2n[1] != walk_p2_closed_form(w);
    const auto s = walk_series(w, 1000);  // 2000 steps
    for (double e : s.mass_error) worst_mass = std::max(worst_mass, e);
  }
  return {clusters == 100 && identity_fail == 0 && worst_mass <= 1e-12,
          std::to_string(clusters) + " clusters, p_2 identity failures=" + std::to_string(identity_fail) +
              ", max per-step mass error over 2000 steps=" + fmt("%.2e", worst_mass)};
}

// --- 10 -----------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  namespace fs = std::filesystem;
  const fs::path work = fs::path(PERCOLAB_WORK_DIR);
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string corpus = PERCOLAB_CORPUS_DIR;
  {
    std::ofstream cfg(work / "tail_config.json");
    cfg << R"({"command": "tail", "family": "hypercubic", "side": 17, "p": 0.5, "trials": 500, "seed": 3, "fit": "2:40"})";
  }
  const std::vector<std::pair<std::string, std::string>> runs{
      {"gen", "gen --family tree --radius 6"},
      {"tail", "tail --family tree --radius 10 --p 0.6 --trials 2000 --seed 1 --fit 5:60 --stretched"},
      {"tail_config", "--config " + (work / "tail_config.json").string()},
      {"observables", "observables --family hypercubic --side 21 --p 0.55 --trials 500 --pair 220,221"},
      {"anatomy", "anatomy --family hypercubic --side 15 --p 0.45 --trials 20 --seed 2"},
      {"menger", "menger --family tree --radius 6 --p 0.8 --trials 50 --seed 4"},
      {"furcations", "furcations --family tree --radius 6 --p 0.8 --seed 4"},
      {"exact_check", "exact-check russo --graph " + corpus + "/grid3.json --functional E_v --n 8"},
      {"q_table", "q-table --graph " + corpus + "/ladder.json --k-max 2"},
      {"tree_law", "tree-law --degree 3 --p 7/10 --n-max 300"},
      {"bounds", "bounds exact --graph " + corpus + "/tree3_r2.json --p 3/5"},
      {"alpha", "alpha --p 0.7 --zeta-from-tree 3"},
      {"anchored", "anchored --family tree --radius 10 --p 0.9 --trials 30 --seed 1 --ball-radius 3"},
      {"walk", "walk --family tree --radius 10 --p 0.9 --seed 2 --n-max 100"},
      {"pipes", "pipes --family hypercubic --side 31 --p 0.6 --trials 40 --radii 2,4,8"},
  };
  // subcommands that declare a CSV output
  const std::set<std::string> csv_commands{"tail", "anchored", "walk", "pipes"};
  int failures = 0;
  std::string first_failure;
  for (const auto& [name, args] : runs) {
    std::vector<std::string> outs, csvs, manifests;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = work / (name + "_" + std::to_string(rep) + ".json");
      const fs::path csv = work / (name + "_" + std::to_string(rep) + ".csv");
      const fs::path man = work / (name + "_" + std::to_string(rep) + ".manifest.json");
      // different worker counts must not change anything
      const bool with_csv = csv_commands.count(name.substr(0, name.find('_'))) > 0 || name == "tree_law";
      const std::string cmd = std::string("PERCOLAB_WORKERS=") + (rep ? "4" : "1") + " \"" + PERCOLAB_CLI + "\" " +
                              args + " --out " + out.string() + (with_csv ? " --csv " + csv.string() : "") +
                              " --manifest " + man.string() + " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) {
        ++failures;
        if (first_failure.empty()) first_failure = name + " exited with " + std::to_string(rc);
      }
      outs.push_back(slurp(out));
      csvs.push_back(fs::exists(csv) ? slurp(csv) : "");
      auto m = fs::exists(man) ? nlohmann::json::parse(slurp(man)) : nlohmann::json::object();
      m.erase("wall_time_seconds");
      // paths differ between the two runs; compare the hashes only
      nlohmann::json hashes = nlohmann::json::array();
      if (m.contains("outputs")) {
        for (const auto& [k, v] : m["outputs"].items()) hashes.push_back(v);
        m["outputs"] = hashes;
      }
      manifests.push_back(m.dump());
    }
    const bool same = !outs[0].empty() && outs[0] == outs[1] && csvs[0] == csvs[1] && manifests[0] == manifests[1];
    if (!same) {
      ++failures;
      if (first_failure.empty()) first_failure = name + " differs between runs";
    }
  }
  return {failures == 0, std::to_string(runs.size()) + " CLI runs x 2 (workers 1 vs 4), " +
                             std::to_string(failures) + " failures" +
                             (first_failure.empty() ? "" : " [" + first_failure + "]")};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "russo identity", 60, russo_identity},
      {2, "anatomy oracle", 60, anatomy_oracle},
      {3, "menger duality", 30, menger_duality},
      {4, "tree decay rate", 300, tree_decay},
      {5, "amenable contrast", 300, amenable_contrast},
      {6, "bound suite", 120, bound_suite},
      {7, "alpha solver", 5, alpha_solver},
      {8, "anchored expansion", 300, anchored_expansion},
      {9, "walk exactness", 60, walk_exactness},
      {10, "reproducibility", 600, reproducibility},
  };
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--criterion") only = std::atoi(argv[i + 1]);
  }
  bool ok = true;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    ok = ok && pass;
    std::printf("criterion %d [%s]: %s  %s  (%.1f s, limit %.0f s)\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.limit_seconds);
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
