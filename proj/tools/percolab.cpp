// percolab: command-line front end.
//
//   percolab <command> [options]
//   percolab --config run.json [options]   (keys mirror the long flags, plus
//                                           "command"; trailing options are
//                                           appended, e.g. --out)

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "percolab/anatomy.hpp"
#include "percolab/asymptotics.hpp"
#include "percolab/bounds.hpp"
#include "percolab/cluster.hpp"
#include "percolab/errors.hpp"
#include "percolab/exact.hpp"
#include "percolab/graph.hpp"
#include "percolab/tail.hpp"
#include "percolab/tree_law.hpp"

#ifndef PERCOLAB_VERSION
#define PERCOLAB_VERSION "dev"
#endif

using namespace percolab;
using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

// Everything a subcommand produces.
struct Outputs {
  json document;
  std::string csv;  // empty: no CSV declared
};

// Graph source shared by most subcommands.
struct GraphSource {
  std::string path;
  std::string family;
  int degree = 3;
  int radius = 0;
  int dimension = 2;
  int side = 0;
  int depth = 0;

  void add(CLI::App* app) {
    app->add_option("--graph", path, "graph JSON file");
    app->add_option("--family", family, "tree | hypercubic | decorated")
        ->check(CLI::IsMember({"tree", "hypercubic", "decorated"}));
    app->add_option("--degree", degree, "tree degree")->capture_default_str();
    app->add_option("--radius", radius, "tree radius");
    app->add_option("--dimension", dimension, "lattice dimension")->capture_default_str();
    app->add_option("--side", side, "lattice side");
    app->add_option("--depth", depth, "decoration depth");
  }

  Graph load() const {
    if (!path.empty()) {
      if (!family.empty()) throw ArgumentError("give either --graph or --family, not both");
      return load_graph(path);
    }
    if (family == "tree") return regular_tree(degree, radius);
    if (family == "hypercubic") return hypercubic(dimension, side);
    if (family == "decorated") return tree_decorated_z3(depth, side);
    throw ArgumentError("a graph is required: --graph FILE or --family NAME");
  }
};

FitWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ArgumentError("--fit expects a:b");
  FitWindow w;
  try {
    w.n_min = static_cast<std::uint32_t>(std::stoul(text.substr(0, colon)));
    w.n_max = static_cast<std::uint32_t>(std::stoul(text.substr(colon + 1)));
  } catch (const std::exception&) {
    throw ArgumentError("--fit expects two integers a:b");
  }
  if (w.n_min < 1 || w.n_max < w.n_min) throw ParameterError("--fit needs 1 <= a <= b");
  return w;
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::istringstream one(item);
    T value;
    if (!(one >> value) || !one.eof()) throw ArgumentError("bad list item: " + item);
    out.push_back(value);
  }
  return out;
}

void check_probability(double p, bool open_low = false) {
  if (!(p >= 0.0 && p <= 1.0) || (open_low && p == 0.0)) throw ParameterError("p must lie in [0, 1]");
}

json fit_json(const std::optional<TailFit>& fit) {
  if (!fit) return nullptr;
  return {{"zeta_hat", fit->zeta_hat}, {"zeta_stderr", fit->zeta_stderr}, {"n_min", fit->n_min},
          {"n_max", fit->n_max},       {"points", fit->points},           {"nonnegative_slope", fit->nonnegative_slope}};
}

VertexId root_or_origin(const Graph& g, long root) {
  if (root < 0) return g.origin();
  if (static_cast<std::size_t>(root) >= g.vertex_count()) throw ArgumentError("root out of range");
  return static_cast<VertexId>(root);
}

std::vector<std::uint8_t> open_vector(const Graph& g, std::uint64_t seed, double p) {
  const EdgeLabelSample labels(seed);
  std::vector<std::uint8_t> open(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) open[e] = labels.open(e, p) ? 1 : 0;
  return open;
}

struct Command {
  std::string name;
  std::string help;
  std::function<void(CLI::App*)> setup;
  std::function<Outputs()> run;
  bool trial_parallel = false;
};

// ---------------------------------------------------------------------------

struct Common {
  GraphSource graph;
  double p = 0.5;
  std::string p_text;  // exact subcommands read p as a rational
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  long root = -1;
  unsigned workers = 0;
};

void add_p(CLI::App* app, Common& c) { app->add_option("--p", c.p, "edge probability")->required(); }

void add_mc(CLI::App* app, Common& c) {
  app->add_option("--trials", c.trials, "number of trials")->capture_default_str();
  app->add_option("--seed", c.seed, "base seed; trial t uses seed + t")->capture_default_str();
}

void add_root(CLI::App* app, Common& c) {
  app->add_option("--root", c.root, "root vertex (default: origin)");
}

std::vector<Command> build_commands(Common& c) {
  std::vector<Command> cmds;

  static std::string fit_text, pair_text, s_text, radii_text, functional = "1", mode = "russo",
                     suite = "exact", fractions_text = "0.5,2", zeta_source;
  static int k_max = 3, n_max = 200, n_min = 1, p_grid = 9, ball_radius = 0, k_moment = 2;
  static std::uint32_t n_cap = 0, anchored_n = kAnchoredExactEdges, mc_limit = 64;
  static double zeta = -1.0, tol = 1e-12, alpha_exact_cap = -1.0;
  static bool stretched = false, accept_finite = false;

  cmds.push_back({"gen", "generate a graph", [&c](CLI::App* app) { c.graph.add(app); },
                  [&c]() -> Outputs {
                    if (c.graph.family.empty()) throw ArgumentError("gen needs --family");
                    return {to_json(c.graph.load()), {}};
                  }});

  cmds.push_back({"tail", "histogram of E_v and tail fit",
                  [&c](CLI::App* app) {
                    c.graph.add(app);
                    add_p(app, c);
                    add_mc(app, c);
                    add_root(app, c);
                    app->add_option("--fit", fit_text, "fit window a:b");
                    app->add_flag("--stretched", stretched, "also fit log survival ~ -c n^kappa");
                  },
                  [&c]() -> Outputs {
                    check_probability(c.p);
                    const Graph g = c.graph.load();
                    TailOptions o;
                    o.trials = c.trials;
                    o.seed = c.seed;
                    o.workers = c.workers;
                    o.root = root_or_origin(g, c.root);
                    if (!fit_text.empty()) o.window = parse_window(fit_text);
                    const TailReport r = tail_histogram(g, c.p, o);
                    json doc = {{"p", r.p},
                                {"trials", r.trials},
                                {"seed", r.seed},
                                {"root", r.root},
                                {"censored", r.censored_count},
                                {"finite", r.finite_total()},
                                {"fit", fit_json(r.fit)},
                                {"fit_error", r.fit_error}};
                    if (stretched) {
                      const StretchedFit s = fit_stretched_tail(r, o.window.value_or(FitWindow{}));
                      doc["stretched"] = {{"kappa", s.kappa}, {"c", s.c}, {"residual", s.residual},
                                          {"exponential_residual", s.exponential_residual}, {"points", s.points}};
                    }
                    std::ostringstream csv;
                    write_tail_csv(csv, r);
                    return {doc, csv.str()};
                  },
                  true});

  cmds.push_back({"observables", "theta, finite susceptibility, two-point function",
                  [&c](CLI::App* app) {
                    c.graph.add(app);
                    add_p(app, c);
                    add_mc(app, c);
                    app->add_option("--pair", pair_text, "u,v for the two-point function");
                  },
                  [&c]() -> Outputs {
                    check_probability(c.p);
                    const Graph g = c.graph.load();
                    ObservablesOptions o;
                    o.trials = c.trials;
                    o.seed = c.seed;
                    o.workers = c.workers;
                    if (!pair_text.empty()) {
                      const auto uv = parse_list<VertexId>(pair_text);
                      if (uv.size() != 2) throw ArgumentError("--pair expects u,v");
                      o.pair = std::make_pair(uv[0], uv[1]);
                    }
                    const Observables r = observables(g, c.p, o);
                    json doc = {{"p", c.p}, {"trials", r.trials}, {"seed", c.seed}, {"theta_hat", r.theta_hat},
                                {"kappa_hat", r.kappa_hat}};
                    doc["chi_f_hat"] = r.chi_f_hat ? json(*r.chi_f_hat) : json(nullptr);
                    doc["tau_f_hat"] = r.tau_f_hat ? json(*r.tau_f_hat) : json(nullptr);
                    return {doc, {}};
                  },
                  true});

  cmds.push_back({"anatomy", "bridges, Br_k, furcations and pipes of sampled clusters",
                  [&c](CLI::App* app) {
                    c.graph.add(app);
                    add_p(app, c);
                    add_mc(app, c);
                    add_root(app, c);
                    app->add_option("--k-max", k_max, "largest k for Br_k")->capture_default_str();
                  },
                  [&c]() -> Outputs {
                    check_probability(c.p);
                    if (k_max < 1) throw ParameterError("--k-max must be >= 1");
                    if (c.trials > 100000) throw ParameterError("anatomy keeps every cluster; use <= 100000 trials");
                    const Graph g = c.graph.load();
                    const VertexId root = root_or_origin(g, c.root);
                    json list = json::array();
                    for (std::uint64_t t = 0; t < c.trials; ++t) {
                      json a = to_json(anatomize(g, EdgeLabelSample(c.seed + t), c.p, root, k_max));
                      a["trial"] = t;
                      list.push_back(a);
                    }
                    return {{{"p", c.p}, {"seed", c.seed}, {"root", root}, {"clusters", list}}, {}};
                  }});

  cmds.push_back({"menger", "edge-disjoint open paths from S to the halo",
                  [&c](CLI::App* app) {
                    c.graph.add(app);
                    add_p(app, c);
                    add_mc(app, c);
                    app->add_option("--s", s_text, "comma-separated vertex set S (default: origin)");
                  },
                  [&c]() -> Outputs {
                    check_probability(c.p);
                    const Graph g = c.graph.load();
                    std::vector<VertexId> s = s_text.empty() ? std::vector<VertexId>{g.origin()}
                                                             : parse_list<VertexId>(s_text);
                    for (VertexId v : s) {
                      if (v >= g.vertex_count()) throw ArgumentError("S contains a vertex out of range");
                    }
                    if (c.trials <= 1) {
                      const MengerResult r = menger_paths(g, EdgeLabelSample(c.seed), c.p, s);
                      json paths = json::array();
                      for (const auto& path : r.path_list) paths.push_back(path);
                      return {{{"p", c.p}, {"seed", c.seed}, {"s", s}, {"paths", r.paths},
                               {"min_cut", r.min_cut}, {"path_list", paths}},
                              {}};
                    }
                    const auto bk = burton_keane_statistic(g, c.p, c.trials, c.seed, s, c.workers);
                    return {{{"p", c.p}, {"seed", c.seed}, {"s", s}, {"trials", bk.trials},
                             {"mean_menger", bk.mean_menger}, {"stderr_menger", bk.stderr_menger},
                             {"edges_of_s", bk.edges_of_s}, {"ratio", bk.ratio()}},
                            {}};
                  },
                  true});

  cmds.push_back({"furcations", "vertices splitting the open graph into >= 3 halo-reaching pieces",
                  [&c](CLI::App* app) {
                    c.graph.add(app);
                    add_p(app, c);
                    app->add_option("--seed", c.seed, "label seed")->capture_default_str();
                  },
                  [&c]() -> Outputs {
                    check_probability(c.p);
                    const Graph g = c.graph.load();
                    const auto f = furcation_set(g, open_vector(g, c.seed, c.p));
                    return {{{"p", c.p}, {"seed", c.seed}, {"count", f.size()}, {"vertices", f}}, {}};
                  }});

  cmds.push_back({"exact-check", "exact polynomial checks on small graphs",
                  [&c](CLI::App* app) {
                    app->add_option("mode", mode, "russo | expectation | animals")
                        ->check(CLI::IsMember({"russo", "expectation", "animals"}));
                    c.graph.add(app);
                    add_root(app, c);
                    app->add_option("--functional", functional, "1 | E_v | K_v | exp_E_v/10")->capture_default_str();
                    app->add_option("--n", n_cap, "cap on E_v (0 = none)");
                    app->add_option("--p-grid", p_grid, "number of interior grid points")->capture_default_str();
                  },
                  [&c]() -> Outputs {
                    const Graph g = c.graph.load();
                    const VertexId root = root_or_origin(g, c.root);
                    const ClusterFunctional F = functional_by_name(functional);
                    const std::optional<std::uint32_t> cap = n_cap ? std::optional(n_cap) : std::nullopt;
                    if (mode == "russo") {
                      if (p_grid < 1) throw ParameterError("--p-grid must be >= 1");
                      const auto n = cap.value_or(static_cast<std::uint32_t>(g.edge_count()));
                      const RussoReport r = russo_decomposition(g, root, F, n, uniform_p_grid(p_grid));
                      json doc = to_json(r);
                      doc["max_abs_gap"] = r.max_abs_gap().get_str();
                      return {doc, {}};
                    }
                    if (mode == "expectation") {
                      const PolynomialInP e = enumerate_exact(g, root, F, cap);
                      return {{{"functional", F.name}, {"n", cap ? json(*cap) : json(nullptr)},
                               {"polynomial", e.to_json()}},
                              {}};
                    }
                    const AnimalExpansion a = animal_expansion(g, root, F, cap);
                    json counts = json::object();
                    for (const auto& [k, v] : a.count_by_open) counts[std::to_string(k)] = v;
                    const PolynomialInP e = enumerate_exact(g, root, F, cap);
                    return {{{"functional", F.name}, {"n", cap ? json(*cap) : json(nullptr)},
                             {"animals", a.animals}, {"count_by_open", counts},
                             {"polynomial", a.value.to_json()}, {"matches_enumeration", a.value == e}},
                            {}};
                  }});

  cmds.push_back({"q-table", "joint law of (Lf_k, E_v) as exact polynomials",
                  [&c](CLI::App* app) {
                    c.graph.add(app);
                    add_root(app, c);
                    app->add_option("--k-max", k_max, "largest k")->capture_default_str();
                  },
                  [&c]() -> Outputs {
                    if (k_max < 1) throw ParameterError("--k-max must be >= 1");
                    const Graph g = c.graph.load();
                    return {to_json(q_table(g, root_or_origin(g, c.root), k_max)), {}};
                  }});

  cmds.push_back({"tree-law", "exact cluster-size law on the regular tree",
                  [&c](CLI::App* app) {
                    app->add_option("--degree", c.graph.degree, "tree degree")->capture_default_str();
                    app->add_option("--p", c.p_text, "edge probability (rational or decimal)")->required();
                    app->add_option("--n-max", n_max, "largest cluster size")->capture_default_str();
                  },
                  [&c]() -> Outputs {
                    const TreeClusterLaw law = tree_cluster_law(c.graph.degree, parse_rational(c.p_text), n_max);
                    std::ostringstream csv;
                    csv << "# d=" << law.d << " p=" << law.p.get_str() << " zeta_vertices=" << law.zeta_vertices
                        << " zeta_touched=" << law.zeta_touched << "\n";
                    csv << "size,touched,log_probability\n";
                    for (int n = 1; n <= law.n_max(); ++n) {
                      csv << n << ',' << (law.d - 1) * n + 1 << ',' << law.log_probability[n - 1] << '\n';
                    }
                    return {to_json(law), csv.str()};
                  }});

  cmds.push_back({"bounds", "check the inequality suite",
                  [&c](CLI::App* app) {
                    app->add_option("suite", suite, "exact | mc | analytic")
                        ->check(CLI::IsMember({"exact", "mc", "analytic"}));
                    c.graph.add(app);
                    add_root(app, c);
                    app->add_option("--p", c.p_text, "edge probability")->required();
                    add_mc(app, c);
                    app->add_option("--k", k_moment, "largest k for the moment bound")->capture_default_str();
                    app->add_option("--alpha-union", alpha_exact_cap, "alpha for the union bound (default p/2)");
                    app->add_option("--n-limit", mc_limit, "largest n in the Monte Carlo radius check")
                        ->capture_default_str();
                    app->add_option("--n-max", n_max, "tree law length (analytic)")->capture_default_str();
                    app->add_option("--fractions", fractions_text, "eps as fractions of the predicted radius")
                        ->capture_default_str();
                  },
                  [&c]() -> Outputs {
                    const Rational p = parse_rational(c.p_text);
                    if (p < 0 || p > 1) throw ParameterError("p must lie in [0, 1]");
                    if (k_moment < 1) throw ParameterError("--k must be >= 1");
                    std::vector<BoundCheck> checks;
                    auto append = [&](std::vector<BoundCheck> more) {
                      checks.insert(checks.end(), more.begin(), more.end());
                    };
                    if (suite == "analytic") {
                      const TreeClusterLaw law = tree_cluster_law(c.graph.degree, p, n_max);
                      for (double f : parse_list<double>(fractions_text)) checks.push_back(check_analytic_radius(law, f));
                    } else {
                      const Graph g = c.graph.load();
                      const VertexId root = root_or_origin(g, c.root);
                      if (suite == "exact") {
                        const ConfigurationCensus census = enumerate_configurations(g, root);
                        append(check_skinny_radius(census, p));
                        for (const Rational& a : {Rational(3, 10), Rational(1, 2)}) append(check_azuma(census, p, a));
                        for (int k = 1; k <= k_moment; ++k) checks.push_back(check_moment_bound(g, census, p, 1, k));
                        append(check_recursion(g, root, p, 1));
                        if (p > 0 && p < 1) {
                          const Rational a = alpha_exact_cap > 0 ? parse_rational(std::to_string(alpha_exact_cap)) : p / 2;
                          checks.push_back(check_expansion_union(g, root, p, a));
                        }
                      } else {
                        const double pd = p.get_d();
                        TailOptions o;
                        o.trials = c.trials;
                        o.seed = c.seed;
                        o.workers = c.workers;
                        o.root = root;
                        const ClusterCensus census = cluster_census(g, pd, o);
                        append(check_skinny_radius_mc(census, mc_limit));
                        for (double a : {0.3, 0.5}) append(check_azuma_mc(census, a));
                        for (int k = 1; k <= k_moment; ++k) {
                          checks.push_back(check_moment_bound_mc(g, pd, 1.0, k, {c.trials, c.seed, c.workers}));
                        }
                      }
                    }
                    std::size_t violations = 0;
                    for (const auto& b : checks) violations += b.pass ? 0 : 1;
                    return {{{"suite", suite}, {"p", p.get_str()}, {"checks", to_json(checks)},
                             {"count", checks.size()}, {"violations", violations}},
                            {}};
                  },
                  true});

  cmds.push_back({"alpha", "solve for alpha(p)",
                  [&c](CLI::App* app) {
                    add_p(app, c);
                    app->add_option("--zeta", zeta, "decay rate in E_v");
                    app->add_option("--zeta-from-tree", zeta_source, "take zeta from the exact law of this tree degree");
                    app->add_option("--tol", tol, "bisection tolerance")->capture_default_str();
                  },
                  [&c]() -> Outputs {
                    double z = zeta;
                    if (!zeta_source.empty()) {
                      const int d = std::stoi(zeta_source);
                      z = tree_cluster_law(d, parse_rational(std::to_string(c.p)), kTreeLawMaxN).zeta_touched;
                    }
                    if (z < 0) throw ArgumentError("alpha needs --zeta or --zeta-from-tree");
                    return {to_json(solve_alpha(c.p, z, tol)), {}};
                  }});

  cmds.push_back({"anchored", "anchored Cheeger profile of censored clusters",
                  [&c](CLI::App* app) {
                    c.graph.add(app);
                    add_p(app, c);
                    add_mc(app, c);
                    add_root(app, c);
                    app->add_option("--n-max", anchored_n, "largest |E(S)| for the greedy path")->capture_default_str();
                    app->add_option("--ball-radius", ball_radius, "report intrinsic balls up to this radius");
                    app->add_option("--zeta", zeta, "decay rate for alpha(p)/2");
                  },
                  [&c]() -> Outputs {
                    check_probability(c.p, true);
                    const Graph g = c.graph.load();
                    AnchoredOptions o;
                    o.trials = c.trials;
                    o.seed = c.seed;
                    o.workers = c.workers;
                    o.root = root_or_origin(g, c.root);
                    o.n_max = anchored_n;
                    o.ball_radius = ball_radius;
                    if (zeta >= 0) o.zeta = zeta;
                    const AnchoredProfile prof = anchored_profile(g, c.p, o);
                    std::ostringstream csv;
                    write_anchored_csv(csv, prof);
                    return {to_json(prof), csv.str()};
                  },
                  true});

  cmds.push_back({"walk", "exact return probabilities on one sampled cluster",
                  [&c](CLI::App* app) {
                    c.graph.add(app);
                    add_p(app, c);
                    app->add_option("--seed", c.seed, "label seed")->capture_default_str();
                    add_root(app, c);
                    app->add_option("--n-max", n_max, "largest n in p_{2n}")->capture_default_str();
                    app->add_option("--n-min", n_min, "first n of the diagnostic")->capture_default_str();
                    app->add_flag("--accept-finite", accept_finite, "allow a finite root cluster");
                  },
                  [&c]() -> Outputs {
                    check_probability(c.p);
                    const Graph g = c.graph.load();
                    const WalkReport r =
                        walk_return(g, c.p, c.seed, n_max, root_or_origin(g, c.root), n_min, accept_finite);
                    std::ostringstream csv;
                    write_walk_csv(csv, r);
                    return {to_json(r), csv.str()};
                  }});

  cmds.push_back({"pipes", "longest pipe within intrinsic balls",
                  [&c](CLI::App* app) {
                    c.graph.add(app);
                    add_p(app, c);
                    add_mc(app, c);
                    add_root(app, c);
                    app->add_option("--radii", radii_text, "comma-separated radii")->required();
                  },
                  [&c]() -> Outputs {
                    check_probability(c.p, true);
                    const Graph g = c.graph.load();
                    PipeOptions o;
                    o.trials = c.trials;
                    o.seed = c.seed;
                    o.workers = c.workers;
                    o.root = root_or_origin(g, c.root);
                    const PipeCensus pc = pipe_census(g, c.p, parse_list<int>(radii_text), o);
                    std::ostringstream csv;
                    write_pipe_csv(csv, pc);
                    return {to_json(pc), csv.str()};
                  },
                  true});

  return cmds;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << bytes;
}

[[noreturn]] void fail(const std::string& category, const std::string& message, int code) {
  std::cerr << json{{"error", {{"category", category}, {"message", message}}}}.dump() << '\n';
  std::exit(code);
}

// Re-expresses a JSON config as command-line arguments.
std::vector<std::string> config_to_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("config", "cannot read " + path, 2);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    fail("config", std::string("invalid JSON: ") + e.what(), 2);
  }
  if (!cfg.is_object() || !cfg.contains("command") || !cfg["command"].is_string()) {
    fail("config", "config needs a string \"command\"", 2);
  }
  std::vector<std::string> args{"percolab", cfg["command"].get<std::string>()};
  for (const char* positional : {"mode", "suite"}) {
    if (cfg.contains(positional)) args.push_back(cfg[positional].get<std::string>());
  }
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command" || key == "mode" || key == "suite") continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  return args;
}

json canonical_config(const CLI::App* sub) {
  json cfg = {{"command", sub->get_name()}};
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "--out" || opt->get_name() == "--csv" ||
        opt->get_name() == "--manifest" || opt->get_name() == "--workers") {
      continue;
    }
    const std::string key = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames()[0];
    if (opt->count() > 0) {
      cfg[key] = opt->get_type_size() == 0 ? json(true) : json(opt->as<std::string>());
    } else if (!opt->get_default_str().empty()) {
      cfg[key] = opt->get_default_str();
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (argc >= 3 && args[1] == "--config") {
    auto expanded = config_to_args(args[2]);
    expanded.insert(expanded.end(), args.begin() + 3, args.end());
    args = std::move(expanded);
  }

  CLI::App app{"percolab: bond percolation experiments"};
  app.set_version_flag("--version", PERCOLAB_VERSION);
  app.require_subcommand(1);
  Common common;
  std::string out_path, csv_path, manifest_path;
  std::vector<Command> commands = build_commands(common);
  std::vector<CLI::App*> subs;
  for (auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    cmd.setup(sub);
    sub->add_option("--out", out_path, "JSON output (default: stdout)");
    sub->add_option("--csv", csv_path, "CSV output");
    sub->add_option("--manifest", manifest_path, "manifest path (default: <out>.manifest.json)");
    sub->add_option("--workers", common.workers, "worker threads (PERCOLAB_WORKERS overrides)");
    subs.push_back(sub);
  }

  if (args.size() == 1) {
    std::cerr << app.help();
    return 2;
  }
  if (args.size() == 2 && args[1] != "--help" && args[1] != "-h" && args[1] != "--version") {
    for (auto* sub : subs) {
      if (sub->get_name() == args[1]) {
        std::cerr << sub->help();
        return 2;
      }
    }
  }

  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("argument", e.what(), 2);
  }
  if (const char* env = std::getenv("PERCOLAB_WORKERS")) {
    try {
      common.workers = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      fail("argument", "PERCOLAB_WORKERS must be a positive integer", 2);
    }
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outputs result;
    try {
      result = commands[i].run();
    } catch (const percolab::Error& e) {
      fail(e.category(), e.what(), 1);
    } catch (const std::exception& e) {
      fail("internal", e.what(), 1);
    }
    const std::string body = result.document.dump(2) + "\n";
    json outputs = json::object();
    if (out_path.empty()) {
      std::cout << body;
    } else {
      write_file(out_path, body);
      outputs[out_path] = hex(fnv1a(body));
    }
    if (!csv_path.empty()) {
      if (result.csv.empty()) fail("argument", commands[i].name + " declares no CSV output", 2);
      write_file(csv_path, result.csv);
      outputs[csv_path] = hex(fnv1a(result.csv));
    }
    if (manifest_path.empty() && !out_path.empty()) manifest_path = out_path + ".manifest.json";
    if (!manifest_path.empty()) {
      const json cfg = canonical_config(subs[i]);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const json manifest = {{"tool", "percolab"},
                             {"version", PERCOLAB_VERSION},
                             {"config", cfg},
                             {"config_hash", hex(fnv1a(cfg.dump()))},
                             {"outputs", outputs},
                             {"wall_time_seconds", wall}};
      write_file(manifest_path, manifest.dump(2) + "\n");
    }
  }
  return 0;
}
