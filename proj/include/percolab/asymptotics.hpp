#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "json.hpp"
#include "percolab/graph.hpp"
#include "percolab/polynomial.hpp"
#include "percolab/rng.hpp"
#include "percolab/tail.hpp"

namespace percolab {

// --- alpha(p) ---------------------------------------------------------------

struct AlphaSolution {
  double p = 0.0;
  double zeta = 0.0;
  double alpha = 0.0;     // feasible (or 0 when the feasible set is empty)
  int iterations = 0;
  double residual = 0.0;  // alpha + residual is infeasible, unless alpha = p
};

/// log of alpha^{-alpha} (1-alpha)^{-(1-alpha)} (p/(1-p))^alpha.
double alpha_condition(double alpha, double p);

/// sup{alpha in [0, p] : alpha_condition(alpha, p) < zeta} by bisection.
/// The condition increases on [0, p] from 0 to -log(1-p).
AlphaSolution solve_alpha(double p, double zeta, double tol = 1e-12);

nlohmann::json to_json(const AlphaSolution& a);

// --- zeta across p ----------------------------------------------------------

struct ZetaPoint {
  double p = 0.0;
  std::optional<TailFit> fit;
  std::string error;  // fit failure message when fit is empty
  std::uint64_t censored = 0;
};

/// One tail fit per p with the same seed (coupled samples).
std::vector<ZetaPoint> zeta_scan(const Graph& g, const std::vector<double>& p_grid,
                                 const TailOptions& options);

// --- anchored Cheeger profile ------------------------------------------------

inline constexpr std::uint32_t kAnchoredExactEdges = 12;

/// Ratios of a vertex set S inside the cluster K: |∂S| / (2|E(S)|) with E(S)
/// the cluster edges touching S, and |∂S| / sum_{u in S} deg_K(u).
struct AnchoredRatio {
  std::uint32_t vertices = 0;
  std::uint32_t touched = 0;   // |E(S)|
  std::uint32_t boundary = 0;  // |∂S|
  Rational edge_form() const;
  Rational degree_form() const;
};

struct AnchoredCluster {
  std::uint64_t trial = 0;
  /// greedy[n] / exact[n]: minimum edge-form ratio over the searched sets
  /// with |E(S)| <= n (empty if none); exact only for n <= 12.
  std::vector<std::optional<Rational>> greedy;
  std::vector<std::optional<Rational>> exact;
  std::vector<AnchoredRatio> greedy_path;
  std::vector<AnchoredRatio> balls;  // intrinsic balls r = 0, 1, ...
  std::uint64_t exact_sets = 0;
};

struct AnchoredOptions {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  VertexId root = kNoVertex;
  std::uint32_t n_max = kAnchoredExactEdges;  // greedy growth stops past this |E(S)|
  int ball_radius = 0;                          // balls 0..ball_radius
  std::optional<double> zeta;                   // feeds alpha(p)/2
  unsigned workers = 0;
};

struct AnchoredProfile {
  double p = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  int radius = 0;  // graph radius (exhaustion scale)
  std::vector<AnchoredCluster> clusters;  // censored clusters, by trial
  std::optional<AlphaSolution> alpha;
};

/// Searched sets are connected, contain the root and avoid the halo. Greedy
/// grows from {root}, adding the frontier vertex with the smallest resulting
/// |∂S| (ties: smaller id); the exact pass enumerates every such set with
/// |E(S)| <= 12. Both are upper bounds on the infimum. Throws StateError if
/// no trial produced a censored cluster.
AnchoredProfile anchored_profile(const Graph& g, double p, const AnchoredOptions& options);

/// Same analysis on one given open configuration (predicate on edges).
AnchoredCluster anchored_cluster(const Graph& g, const std::function<bool(EdgeId)>& open,
                                 VertexId root, std::uint32_t n_max, int ball_radius);

nlohmann::json to_json(const AnchoredProfile& profile);
void write_anchored_csv(std::ostream& out, const AnchoredProfile& profile);

// --- random walk return probabilities ----------------------------------------

/// Open component as a compact adjacency list, vertex 0 = root. Halo
/// vertices are ordinary vertices here: the walk lives on the finite graph.
struct WalkGraph {
  std::vector<VertexId> global;
  std::vector<std::vector<std::uint32_t>> adjacency;
  std::size_t edge_count = 0;
  bool touches_halo = false;
};

WalkGraph walk_graph(const Graph& g, const std::function<bool(EdgeId)>& open, VertexId root);

/// p_{2n}(root, root) for n = 0..n_max by exact powering of the distribution
/// vector. T = double rescales in the log domain; T = Rational is exact.
template <class T>
struct WalkSeries {
  std::vector<T> p2n;           // scaled values, times exp(log_scale[n])
  std::vector<double> log_scale;
  std::vector<double> mass_error;  // per step |sum - 1| (double mode)
  bool degenerate = false;
};

WalkSeries<double> walk_series(const WalkGraph& w, int n_max);
WalkSeries<Rational> walk_series_exact(const WalkGraph& w, int n_max);

/// sum over open neighbours u of the root of 1/(deg(root) deg(u)).
Rational walk_p2_closed_form(const WalkGraph& w);

struct WalkReport {
  double p = 0.0;
  std::uint64_t seed = 0;
  VertexId root = 0;
  int radius = 0;
  bool censored = false;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  bool degenerate = false;
  std::vector<double> log_p2n;       // n = 0..n_max
  std::vector<double> diagnostic;    // -log p_{2n} / n^{1/3}, n = n_min..n_max
  int n_min = 1;
  double max_mass_error = 0.0;
};

/// Throws StateError if the root cluster is finite and accept_finite is off.
WalkReport walk_return(const Graph& g, double p, std::uint64_t seed, int n_max, VertexId root,
                       int n_min = 1, bool accept_finite = false);

nlohmann::json to_json(const WalkReport& r);
void write_walk_csv(std::ostream& out, const WalkReport& r);

// --- pipes ---------------------------------------------------------------

struct PipeRow {
  int radius = 0;
  double q10 = 0, q25 = 0, median = 0, q75 = 0, q90 = 0, mean = 0;
};

struct PipeCensus {
  double p = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t censored = 0;
  std::uint64_t excluded = 0;
  std::vector<PipeRow> rows;
  std::vector<std::vector<std::uint32_t>> samples;  // per radius, per cluster
  double slope = 0.0;   // OLS slope of median vs r
  double slope_stderr = 0.0;
};

struct PipeOptions {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  VertexId root = kNoVertex;
  unsigned workers = 0;
};

/// Throws StateError if no censored cluster was found.
PipeCensus pipe_census(const Graph& g, double p, const std::vector<int>& radius_grid,
                       const PipeOptions& options);

nlohmann::json to_json(const PipeCensus& c);
void write_pipe_csv(std::ostream& out, const PipeCensus& c);

}  // namespace percolab
