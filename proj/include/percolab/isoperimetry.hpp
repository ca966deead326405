#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "percolab/graph.hpp"

namespace percolab {

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator<(const Fraction& a, const Fraction& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator==(const Fraction& a, const Fraction& b) {
    return a.num * b.den == b.num * a.den;
  }
};

struct IsoperimetricReport {
  Fraction cheeger_lower{1, 1};
  std::vector<VertexId> cheeger_witness;
  /// volume threshold t -> min |boundary(K)| over enumerated K with vol(K) >= t
  std::map<std::int64_t, std::int64_t> profile;
  std::uint64_t sets_enumerated = 0;
};

inline constexpr int kMaxCheegerSetSize = 12;

/// Exhaustive minimum of |∂_E K| / vol(K) over connected vertex sets K with
/// |K| <= max_set_size. On graphs with a halo, K ranges over interior
/// vertices only (halo degrees are truncated). On halo-free graphs K is
/// restricted to vol(K) <= vol(V)/2 so the whole vertex set is excluded.
///
/// Values are upper bounds for the infinite-graph constant, never the
/// constant itself. Throws SizeError when max_set_size exceeds the guard.
IsoperimetricReport cheeger_exact(const Graph& g, int max_set_size);

}  // namespace percolab
