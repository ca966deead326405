#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "percolab/graph.hpp"
#include "percolab/polynomial.hpp"

namespace percolab {

inline constexpr std::size_t kMaxEnumerationEdges = 22;
inline constexpr std::size_t kMaxEnumerationVertices = 64;
inline constexpr std::uint64_t kMaxAnimals = 10'000'000;

/// Shape of a finite cluster (or connected subgraph) H containing the root.
struct ClusterShape {
  bool censored = false;
  std::uint32_t touched = 0;   // |E(H)|
  std::uint32_t vertices = 0;  // |V(H)|
  std::uint32_t open = 0;      // |E_o(H)|
  std::uint32_t radius = 0;    // intrinsic radius from the root
  std::uint64_t open_mask = 0;
  std::uint64_t vertex_mask = 0;

  std::uint32_t boundary() const noexcept { return touched - open; }
};

/// A cluster functional F evaluated exactly.
struct ClusterFunctional {
  std::string name;
  std::function<Rational(const ClusterShape&)> f;
};

ClusterFunctional functional_one();
ClusterFunctional functional_touched();  // E_v
ClusterFunctional functional_size();     // |K_v|
/// r^{E_v} with r the degree-12 Taylor polynomial of e^{t} at rational t.
ClusterFunctional functional_exp_touched(const Rational& t);
/// "1", "E_v", "K_v" or "exp_E_v/10".
ClusterFunctional functional_by_name(const std::string& name);

/// Every configuration of a small graph grouped by the root's cluster.
/// Each bucket counts configurations by their number of open edges, so its
/// probability is sum_a counts[a] p^a (1-p)^{m-a}. All censored
/// configurations share one bucket.
struct ConfigurationCensus {
  std::size_t edge_count = 0;
  VertexId root = 0;
  struct Bucket {
    ClusterShape shape;
    std::vector<std::uint64_t> counts_by_open;
  };
  std::vector<Bucket> buckets;

  PolynomialInP weight(const Bucket& b) const;
};

/// Throws SizeError beyond 22 edges or 64 vertices, ArgumentError if root
/// lies on the halo.
ConfigurationCensus enumerate_configurations(const Graph& g, VertexId root);

/// E_p[F(K_v) 1(E_v <= n_cap)] as an exact polynomial, by summing over all
/// 2^|E| configurations. An empty n_cap means 1(E_v < infinity).
PolynomialInP enumerate_exact(const Graph& g, VertexId root, const ClusterFunctional& F,
                              std::optional<std::uint32_t> n_cap);
PolynomialInP enumerate_exact(const ConfigurationCensus& census, const ClusterFunctional& F,
                              std::optional<std::uint32_t> n_cap);

/// Visits every connected subgraph H containing root whose vertices avoid
/// the halo and with |E_o(H)| <= n_cap (empty = unbounded). Throws
/// SizeError past kMaxAnimals subgraphs.
void for_each_animal(const Graph& g, VertexId root, std::optional<std::uint32_t> n_cap,
                     const std::function<void(const ClusterShape&)>& visit);

struct AnimalExpansion {
  PolynomialInP value;
  std::uint64_t animals = 0;
  std::map<std::uint32_t, std::uint64_t> count_by_open;  // |E_o(H)| -> #H
};

/// sum over H with |E_o(H)| <= n_cap of F(H) p^{|E_o(H)|} (1-p)^{|∂H|}.
AnimalExpansion animal_expansion(const Graph& g, VertexId root, const ClusterFunctional& F,
                                 std::optional<std::uint32_t> n_cap);

struct RussoPoint {
  Rational p;
  Rational M, U, D, dEdp;
};

struct RussoReport {
  std::string functional;
  std::uint32_t n = 0;
  PolynomialInP expectation;  // E_{p,n}[F]
  PolynomialInP derivative;   // d/dp of expectation
  PolynomialInP h_moment;     // E_{p,n}[h_p F]
  PolynomialInP U, D;
  std::vector<RussoPoint> points;
  /// -p(1-p) dE/dp = E[h F] and dE/dp = U - D as polynomials.
  bool identity_exact = false;

  Rational max_abs_gap() const;  // max over points of |dEdp - (U - D)| and |dEdp + M|
};

/// M from the fluctuation moment, U and D from their sums over edges with
/// the edge forced open or closed, dEdp from the exact polynomial. Grid
/// points must lie in (0, 1).
RussoReport russo_decomposition(const Graph& g, VertexId root, const ClusterFunctional& F,
                                std::uint32_t n, const std::vector<Rational>& p_grid);

/// Joint law of (Lf_k(K_v), E_v) for k <= k_max.
struct QTable {
  int k_max = 1;
  std::map<std::tuple<int, std::uint32_t, std::uint64_t>, PolynomialInP> entries;  // (k, n, m)
  PolynomialInP censored;  // P(cluster reaches the halo)

  PolynomialInP total(int k) const;  // sum over (n, m) plus censored
};

QTable q_table(const Graph& g, VertexId root, int k_max);

/// 1/10, 2/10, ..., (points)/(points+1).
std::vector<Rational> uniform_p_grid(int points);

nlohmann::json to_json(const RussoReport& r);
nlohmann::json to_json(const QTable& q);

}  // namespace percolab
