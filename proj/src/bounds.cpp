#include "percolab/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include "percolab/anatomy.hpp"
#include "percolab/cluster.hpp"
#include "percolab/errors.hpp"
#include "percolab/trials.hpp"

namespace percolab {

namespace {

nlohmann::json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

BoundCheck finish(BoundCheck c) {
  c.margin = c.rhs + c.slack - c.lhs;
  c.pass = c.lhs <= c.rhs + c.slack;
  return c;
}

Rational binomial(std::uint32_t n, std::uint32_t k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rational(b);
}

std::vector<EdgeId> edges_of_mask(std::uint64_t mask) {
  std::vector<EdgeId> out;
  for (; mask; mask &= mask - 1) out.push_back(static_cast<EdgeId>(std::countr_zero(mask)));
  return out;
}

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

}  // namespace

nlohmann::json to_json(const BoundCheck& c) {
  return {{"check", c.check},         {"params", c.params},
          {"lhs", number_or_string(c.lhs)}, {"rhs", number_or_string(c.rhs)},
          {"slack", c.slack},         {"margin", number_or_string(c.margin)},
          {"pass", c.pass}};
}

nlohmann::json to_json(const std::vector<BoundCheck>& checks) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks) out.push_back(to_json(c));
  return out;
}

std::vector<BoundCheck> check_skinny_radius(const ConfigurationCensus& census, const Rational& p) {
  std::vector<BoundCheck> out;
  const double pd = p.get_d();
  const auto max_n = static_cast<std::uint32_t>(census.edge_count);
  std::vector<std::pair<const ConfigurationCensus::Bucket*, Rational>> weights;
  for (const auto& b : census.buckets) {
    if (!b.shape.censored) weights.emplace_back(&b, census.weight(b)(p));
  }
  for (std::uint32_t n = 1; n <= max_n; ++n) {
    for (std::uint32_t m = 1; m <= n; ++m) {
      Rational lhs = 0;
      for (const auto& [b, w] : weights) {
        if (b->shape.radius >= m && b->shape.touched <= n) lhs += w;
      }
      BoundCheck c;
      c.check = "skinny_radius";
      c.params = {{"p", p.get_str()}, {"n", n}, {"m", m}};
      c.lhs = lhs.get_d();
      c.rhs = std::exp(-0.5 * std::pow(1.0 - pd, 4.0 * n / m) * m);
      out.push_back(finish(c));
    }
  }
  return out;
}

std::vector<BoundCheck> check_azuma(const ConfigurationCensus& census, const Rational& p,
                                    const Rational& alpha) {
  std::vector<BoundCheck> out;
  const double a = alpha.get_d();
  for (std::uint32_t n = 1; n <= census.edge_count; ++n) {
    Rational lhs = 0;
    for (const auto& b : census.buckets) {
      if (b.shape.censored || b.shape.touched != n) continue;
      const Rational h = p * b.shape.boundary() - (1 - p) * b.shape.open;
      if (abs(h) >= alpha * n) lhs += census.weight(b)(p);
    }
    BoundCheck c;
    c.check = "azuma";
    c.params = {{"p", p.get_str()}, {"alpha", alpha.get_str()}, {"n", n}};
    c.lhs = lhs.get_d();
    c.rhs = 2.0 * std::exp(-a * a * n / 2.0);
    out.push_back(finish(c));
  }
  return out;
}

double moment_bound_log_rhs(double p, double alpha, int k) {
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  const double base = 18.0 * std::log(2.0) + 2.0 - 3.0 * std::log(alpha) -
                      (96.0 / alpha) * std::log1p(-p);
  return log_factorial(k) + k * base;
}

BoundCheck check_moment_bound(const Graph& g, const ConfigurationCensus& census,
                              const Rational& p, const Rational& alpha, int k) {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (alpha <= 0 || alpha > 1) throw ParameterError("alpha must lie in (0, 1]");
  Rational lhs = 0;
  for (const auto& b : census.buckets) {
    if (b.shape.censored) continue;
    const auto tree = bridge_tree(g, edges_of_mask(b.shape.open_mask), census.root);
    const Rational br(static_cast<unsigned long>(br_k(tree, k)));
    if (alpha * b.shape.touched > br) continue;
    Rational power = 1;
    for (int i = 0; i <= k; ++i) power *= b.shape.touched;
    lhs += power * census.weight(b)(p);
  }
  BoundCheck c;
  c.check = "moment_bound";
  const double log_rhs = moment_bound_log_rhs(p.get_d(), alpha.get_d(), k);
  c.params = {{"p", p.get_str()}, {"alpha", alpha.get_str()}, {"k", k}, {"log_rhs", number_or_string(log_rhs)}};
  c.lhs = lhs.get_d();
  c.rhs = std::exp(log_rhs);
  c.margin = log_rhs - (c.lhs > 0 ? std::log(c.lhs) : -std::numeric_limits<double>::infinity());
  c.pass = c.lhs == 0.0 || std::log(c.lhs) <= log_rhs;
  return c;
}

std::vector<BoundCheck> check_recursion(const Graph& g, VertexId root, const Rational& p, int k) {
  if (k < 1) throw ParameterError("k must be >= 1");
  const QTable table = q_table(g, root, k + 1);
  const auto edges = static_cast<std::uint32_t>(g.edge_count());
  std::vector<BoundCheck> out;
  for (std::uint32_t n = 1; n <= edges; ++n) {
    for (std::uint32_t m = 1; m <= edges; ++m) {
      Rational lhs = 0;
      const auto it = table.entries.find({k + 1, n, m});
      if (it != table.entries.end()) lhs = it->second(p);
      std::uint64_t terms = 0;
      for (std::uint32_t m1 = 1; m1 + 1 <= m; ++m1) {
        if (m1 < static_cast<std::uint32_t>(k)) continue;  // Q_k(., n1, m1) = 0 for 0 < m1 < k
        const std::uint32_t m2 = m - m1 - 1;
        for (std::uint32_t n1 = m1; n1 <= n; ++n1) {       // n1 >= m1
          if (n - n1 >= m2) ++terms;                       // Q_1(., n2, m2) = 0 for n2 < m2
        }
      }
      BoundCheck c;
      c.check = "recursion";
      c.params = {{"p", p.get_str()}, {"k", k}, {"n", n}, {"m", m}};
      c.lhs = lhs.get_d();
      c.rhs = 2.0 * std::exp(1.0) * n / (k + 1) * static_cast<double>(terms);
      out.push_back(finish(c));
    }
  }
  return out;
}

BoundCheck check_expansion_union(const Graph& g, VertexId root, const Rational& p,
                                 const Rational& alpha) {
  if (p <= 0 || p >= 1) throw ParameterError("p must lie in (0, 1)");
  if (alpha <= 0 || alpha > p) throw ParameterError("alpha must lie in (0, p]");
  const Rational odds = p / (1 - p);
  auto max_m = [&](std::uint32_t n) {
    const Rational x = alpha * n;
    return static_cast<std::uint32_t>(mpz_class(x.get_num() / x.get_den()).get_ui());
  };
  auto pow_q = [](const Rational& x, std::uint32_t e) {
    Rational out = 1;
    for (std::uint32_t i = 0; i < e; ++i) out *= x;
    return out;
  };
  Rational lhs = 0;
  for_each_animal(g, root, std::nullopt, [&](const ClusterShape& h) {
    const Rational weight = pow_q(p, h.open) * pow_q(1 - p, h.boundary());
    for (std::uint32_t m = 1; m <= max_m(h.touched); ++m) {
      lhs += binomial(h.boundary(), m) * pow_q(odds, m) * weight;
    }
  });
  const ConfigurationCensus census = enumerate_configurations(g, root);
  Rational rhs = 0;
  for (const auto& b : census.buckets) {
    if (b.shape.censored) continue;
    const Rational w = census.weight(b)(p);
    for (std::uint32_t m = 1; m <= max_m(b.shape.touched); ++m) {
      rhs += binomial(b.shape.touched, m) * pow_q(odds, m) * w;
    }
  }
  BoundCheck c;
  c.check = "expansion_union";
  c.params = {{"p", p.get_str()}, {"alpha", alpha.get_str()}, {"exact", lhs <= rhs}};
  c.lhs = lhs.get_d();
  c.rhs = rhs.get_d();
  c.margin = Rational(rhs - lhs).get_d();
  c.pass = lhs <= rhs;
  return c;
}

// ---------------------------------------------------------------------------

std::vector<BoundCheck> check_skinny_radius_mc(const ClusterCensus& census, std::uint32_t n_limit) {
  std::uint32_t top = 0;
  for (const auto& [key, count] : census.joint) top = std::max(top, std::get<0>(key));
  top = std::min(top, n_limit);
  // at_most[n][r]: trials with E_v <= n and R_v == r (r capped at top)
  std::vector<std::vector<std::uint64_t>> cell(top + 1, std::vector<std::uint64_t>(top + 2, 0));
  for (const auto& [key, count] : census.joint) {
    const auto [touched, open, radius] = key;
    (void)open;
    if (touched > top) continue;
    cell[touched][std::min<std::uint32_t>(radius, top + 1)] += count;
  }
  const double trials = static_cast<double>(census.trials);
  const double p = census.p;
  std::vector<BoundCheck> out;
  std::vector<std::uint64_t> at_least(top + 3, 0);  // running over n: R_v >= m, E_v <= n
  std::vector<std::uint64_t> by_radius(top + 2, 0);
  for (std::uint32_t n = 1; n <= top; ++n) {
    for (std::uint32_t r = 0; r <= top + 1; ++r) by_radius[r] += cell[n][r];
    if (n == 1) {
      for (std::uint32_t r = 0; r <= top + 1; ++r) by_radius[r] += cell[0][r];
    }
    std::uint64_t suffix = 0;
    for (std::uint32_t r = top + 1; r >= 1; --r) {
      suffix += by_radius[r];
      at_least[r] = suffix;
    }
    for (std::uint32_t m = 1; m <= n; ++m) {
      const double q = static_cast<double>(at_least[m]) / trials;
      BoundCheck c;
      c.check = "skinny_radius_mc";
      c.params = {{"p", p}, {"n", n}, {"m", m}, {"trials", census.trials}};
      c.lhs = q;
      c.rhs = std::exp(-0.5 * std::pow(1.0 - p, 4.0 * n / m) * m);
      c.slack = 3.0 * std::sqrt(q * (1.0 - q) / trials);
      out.push_back(finish(c));
    }
  }
  return out;
}

std::vector<BoundCheck> check_azuma_mc(const ClusterCensus& census, double alpha) {
  std::map<std::uint32_t, std::uint64_t> hits, seen;
  const double p = census.p;
  for (const auto& [key, count] : census.joint) {
    const auto [touched, open, radius] = key;
    (void)radius;
    seen[touched] += count;
    const double h = p * (touched - open) - (1.0 - p) * open;
    if (std::abs(h) >= alpha * touched) hits[touched] += count;
  }
  const double trials = static_cast<double>(census.trials);
  std::vector<BoundCheck> out;
  for (const auto& [n, count] : seen) {
    const double q = static_cast<double>(hits[n]) / trials;
    BoundCheck c;
    c.check = "azuma_mc";
    c.params = {{"p", p}, {"alpha", alpha}, {"n", n}, {"trials", census.trials}};
    c.lhs = q;
    c.rhs = 2.0 * std::exp(-alpha * alpha * n / 2.0);
    c.slack = 3.0 * std::sqrt(q * (1.0 - q) / trials);
    out.push_back(finish(c));
  }
  return out;
}

namespace {

struct MomentAccumulator {
  unsigned __int128 sum = 0;
  unsigned __int128 sum_sq = 0;
  std::uint64_t hits = 0;
  void merge(const MomentAccumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    hits += o.hits;
  }
};

}  // namespace

BoundCheck check_moment_bound_mc(const Graph& g, double p, double alpha, int k,
                                 const MomentOptions& options) {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
  const VertexId root = g.origin();
  const auto acc = run_trials<MomentAccumulator>(
      options.trials, resolve_workers(options.workers),
      [&](MomentAccumulator& a, std::uint64_t t, ClusterScratch&) {
        const EdgeLabelSample labels(options.seed + t);
        const Cluster c = explore_cluster(g, labels, p, root);
        if (c.censored) return;
        const double touched = static_cast<double>(c.touched_count());
        const auto br = br_k(bridge_tree(g, c), k);
        if (alpha * touched > static_cast<double>(br)) return;
        unsigned __int128 power = 1;
        for (int i = 0; i <= k; ++i) power *= c.touched_count();
        a.sum += power;
        a.sum_sq += power * power;
        ++a.hits;
      });
  const double n = static_cast<double>(options.trials);
  const double mean = static_cast<double>(acc.sum) / n;
  const double var = std::max(0.0, static_cast<double>(acc.sum_sq) / n - mean * mean);
  BoundCheck c;
  c.check = "moment_bound_mc";
  const double log_rhs = moment_bound_log_rhs(p, alpha, k);
  c.params = {{"p", p}, {"alpha", alpha}, {"k", k}, {"trials", options.trials},
              {"hits", acc.hits}, {"log_rhs", number_or_string(log_rhs)}};
  c.lhs = mean;
  c.rhs = std::exp(log_rhs);
  c.slack = 3.0 * std::sqrt(var / n);
  const double upper = mean + c.slack;
  c.margin = log_rhs - (upper > 0 ? std::log(upper) : -std::numeric_limits<double>::infinity());
  c.pass = upper == 0.0 || std::log(upper) <= log_rhs;
  return c;
}

BoundCheck check_analytic_radius(const TreeClusterLaw& law, double fraction) {
  const double p = law.p.get_d();
  const int n = law.n_max();
  if (n < 4) throw ParameterError("tree law too short for a summability check");
  const double eps = fraction * p * (1.0 - p) * std::expm1(law.zeta_touched);
  const double log_lambda = std::log1p(eps / (p * (1.0 - p)));
  auto log_term = [&](int size) {
    return law.log_probability[size - 1] + ((law.d - 1.0) * size + 1.0) * log_lambda;
  };
  BoundCheck c;
  c.check = "analytic_radius";
  c.params = {{"d", law.d}, {"p", law.p.get_str()}, {"fraction", fraction}, {"epsilon", eps},
              {"zeta_touched", law.zeta_touched}, {"n_max", n}};
  c.lhs = log_term(n) - log_term(n / 2);
  c.rhs = 0.0;
  const bool decays = c.lhs < 0.0;
  c.margin = -c.lhs;
  c.pass = decays == (fraction < 1.0);
  return c;
}

}  // namespace percolab
