#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "percolab/polynomial.hpp"

namespace percolab {

inline constexpr int kTreeLawExactLimit = 200;
inline constexpr int kTreeLawMaxN = 2000;

/// Exact law of |K_v| on the infinite d-regular tree.
struct TreeClusterLaw {
  int d = 3;
  Rational p;
  /// P(|K| = n) for n = 1..min(n_max, 200), exact.
  std::vector<Rational> exact;
  /// log P(|K| = n) for n = 1..n_max; exact values rounded, then 256-bit
  /// floating continuation.
  std::vector<double> log_probability;
  /// Decay rate of P(|K| = n) in n from the last window slope with two
  /// Richardson steps; zeta_touched = zeta_vertices / (d - 1) is the rate in
  /// E_v = (d - 1)|K| + 1.
  double zeta_vertices = 0.0;
  double zeta_touched = 0.0;
  /// 1 - sum_{n <= n_max} P(|K| = n): mass of larger or infinite clusters.
  double tail_mass = 0.0;

  int n_max() const noexcept { return static_cast<int>(log_probability.size()); }
  double probability(int n) const;
};

/// Generating-function recursion: the subtree law T solves
/// T = x (1 - p + p T)^{d-1} and the root law is x (1 - p + p T)^d, with
/// powers of series taken by the J.C.P. Miller recurrence. Throws
/// ParameterError for d < 3, p outside [0, 1] or n_max outside [1, 2000].
TreeClusterLaw tree_cluster_law(int d, const Rational& p, int n_max);

nlohmann::json to_json(const TreeClusterLaw& law);

}  // namespace percolab
