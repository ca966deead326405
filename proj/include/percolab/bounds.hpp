#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "percolab/exact.hpp"
#include "percolab/graph.hpp"
#include "percolab/tail.hpp"
#include "percolab/tree_law.hpp"

namespace percolab {

/// One evaluated inequality lhs <= rhs. Monte Carlo checks carry the
/// allowance in `slack` (3 binomial standard errors) and pass when
/// lhs <= rhs + slack.
struct BoundCheck {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double margin = 0.0;  // rhs + slack - lhs
  bool pass = true;
};

nlohmann::json to_json(const BoundCheck& c);
nlohmann::json to_json(const std::vector<BoundCheck>& checks);

// --- exact, from a configuration census -------------------------------------

/// P(R_v >= m, E_v <= n) <= exp(-(1/2)(1-p)^{4n/m} m) for 1 <= m <= n <= |E|.
std::vector<BoundCheck> check_skinny_radius(const ConfigurationCensus& census, const Rational& p);

/// P(E_v = n, |h_p(K_v)| >= alpha n) <= 2 exp(-alpha^2 n / 2), n = 1..|E|.
std::vector<BoundCheck> check_azuma(const ConfigurationCensus& census, const Rational& p,
                                    const Rational& alpha);

/// E[E_v^{k+1} 1(alpha E_v <= Br_k < inf)] <= k! (2^18 e^2 / (alpha^3 (1-p)^{96/alpha}))^k.
/// The right side is compared in log space; `rhs` may be +inf.
BoundCheck check_moment_bound(const Graph& g, const ConfigurationCensus& census,
                              const Rational& p, const Rational& alpha, int k);

/// Per-graph P(Lf_{k+1} = m, E_v = n) against the recursion's right side
/// with every Q factor replaced by 1, or by 0 where it vanishes trivially.
std::vector<BoundCheck> check_recursion(const Graph& g, VertexId root, const Rational& p, int k);

/// Both sides of the union bound over connected subgraphs H containing the
/// root, evaluated exactly.
BoundCheck check_expansion_union(const Graph& g, VertexId root, const Rational& p,
                                 const Rational& alpha);

/// log-space right side of the moment bound.
double moment_bound_log_rhs(double p, double alpha, int k);

// --- Monte Carlo ------------------------------------------------------------

std::vector<BoundCheck> check_skinny_radius_mc(const ClusterCensus& census, std::uint32_t n_limit);
std::vector<BoundCheck> check_azuma_mc(const ClusterCensus& census, double alpha);

struct MomentOptions {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};
BoundCheck check_moment_bound_mc(const Graph& g, double p, double alpha, int k,
                                 const MomentOptions& options);

/// Summability of the cluster expansion weighted by (1 + eps/(p(1-p)))^{E_v}
/// with eps = fraction * p(1-p)(e^{zeta} - 1) on the tree law: lhs is the
/// log ratio of the last term to the midpoint term. Passes when the sign
/// matches the prediction (decay iff fraction < 1).
BoundCheck check_analytic_radius(const TreeClusterLaw& law, double fraction);

}  // namespace percolab
