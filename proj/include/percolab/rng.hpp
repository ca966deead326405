#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "percolab/graph.hpp"

namespace percolab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Pure
/// function of (key, counter); bit-exact on every platform.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter single_round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
};

/// Uniform edge labels U_e in [0,1) keyed on (seed, edge id). An edge is
/// p-open iff U_e < p, which couples every p on one sample and makes p = 0
/// and p = 1 exactly all-closed and all-open.
class EdgeLabelSample {
 public:
  explicit EdgeLabelSample(std::uint64_t seed) noexcept
      : seed_(seed), key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  std::uint64_t seed() const noexcept { return seed_; }

  double operator()(EdgeId e) const noexcept {
    const auto out = Philox4x32::apply({e, 0u, 0x70657263u, 0x6f6c6162u}, key_);
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(out[0]) << 21) ^ (static_cast<std::uint64_t>(out[1]) >> 11);
    return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
  }

  bool open(EdgeId e, double p) const noexcept { return (*this)(e) < p; }

  std::vector<double> materialize(const Graph& g) const;

 private:
  std::uint64_t seed_;
  Philox4x32::Key key_;
};

EdgeLabelSample sample_labels(const Graph& g, std::uint64_t seed);

}  // namespace percolab
