#include "percolab/tree_law.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>

#include "percolab/errors.hpp"

namespace percolab {

namespace {

using Float = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;

Float to_float(const Rational& q) {
  return Float(q.get_num().get_str()) / Float(q.get_den().get_str());
}

// Coefficient n of S^alpha given S_0..S_n and B_0..B_{n-1} (Miller).
template <class T>
T miller_step(const std::vector<T>& s, const std::vector<T>& b, int alpha, int n) {
  T acc = 0;
  for (int k = 1; k <= n; ++k) {
    const long factor = static_cast<long>(alpha + 1) * k - n;
    if (factor != 0 && s[k] != 0) acc += T(factor) * s[k] * b[n - k];
  }
  return acc / (T(n) * s[0]);
}

template <class T>
T int_pow(T x, int e) {
  T out = 1;
  for (int i = 0; i < e; ++i) out *= x;
  return out;
}

}  // namespace

double TreeClusterLaw::probability(int n) const {
  if (n < 1 || n > n_max()) throw ArgumentError("n outside the computed range");
  return std::exp(log_probability[n - 1]);
}

TreeClusterLaw tree_cluster_law(int d, const Rational& p, int n_max) {
  if (d < 3) throw ParameterError("tree degree must be >= 3");
  if (p < 0 || p > 1) throw ParameterError("p must lie in [0, 1]");
  if (n_max < 1 || n_max > kTreeLawMaxN) throw ParameterError("n_max must lie in [1, 2000]");
  TreeClusterLaw law;
  law.d = d;
  law.p = p;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  if (p == 1) {  // every cluster is infinite
    law.log_probability.assign(n_max, neg_inf);
    law.exact.assign(std::min(n_max, kTreeLawExactLimit), Rational(0));
    law.zeta_vertices = law.zeta_touched = std::numeric_limits<double>::infinity();
    law.tail_mass = 1.0;
    return law;
  }

  // s = 1 - p + p T, b = s^{d-1}, c = s^d, indexed by power of x.
  const int exact_n = std::min(n_max, kTreeLawExactLimit);
  std::vector<Rational> s{1 - p}, b{int_pow<Rational>(1 - p, d - 1)}, c{int_pow<Rational>(1 - p, d)};
  Rational exact_sum = 0;
  for (int n = 1; n <= exact_n; ++n) {
    // T_n = b_{n-1}, R_n = c_{n-1}; both only need s_0..s_{n-1}.
    if (n >= 2) {
      b.push_back(miller_step(s, b, d - 1, n - 1));
      c.push_back(miller_step(s, c, d, n - 1));
    }
    const Rational t_n = b[n - 1];
    law.exact.push_back(c[n - 1]);
    exact_sum += c[n - 1];
    s.push_back(p * t_n);
  }

  std::vector<Float> sf, bf, cf;
  for (const auto& x : s) sf.push_back(to_float(x));
  for (const auto& x : b) bf.push_back(to_float(x));
  for (const auto& x : c) cf.push_back(to_float(x));
  const Float pf = to_float(p);
  for (int n = exact_n + 1; n <= n_max; ++n) {
    bf.push_back(miller_step(sf, bf, d - 1, n - 1));
    cf.push_back(miller_step(sf, cf, d, n - 1));
    sf.push_back(pf * bf[n - 1]);
  }

  Float total = 0;
  for (int n = 1; n <= n_max; ++n) {
    const Float r = n <= exact_n ? to_float(law.exact[n - 1]) : cf[n - 1];
    total += r;
    law.log_probability.push_back(r > 0 ? static_cast<double>(log(r)) : neg_inf);
  }
  law.tail_mass = static_cast<double>(Float(1) - total);

  // s(n) = log P_n - log P_{n+1} ~ zeta + a/n + b/n^2; fit through three
  // points n, n/2, n/4 from the end of the window.
  auto slope = [&](int n) { return law.log_probability[n - 1] - law.log_probability[n]; };
  const int last = n_max - 1;
  if (last < 1 || !std::isfinite(law.log_probability[last])) {
    law.zeta_vertices = std::numeric_limits<double>::infinity();
  } else if (last < 8) {
    law.zeta_vertices = slope(last);
  } else {
    const int ns[3] = {last / 4, last / 2, last};
    Eigen::Matrix3d A;
    Eigen::Vector3d y;
    for (int i = 0; i < 3; ++i) {
      const double inv = 1.0 / ns[i];
      A.row(i) << 1.0, inv, inv * inv;
      y(i) = slope(ns[i]);
    }
    law.zeta_vertices = A.fullPivLu().solve(y)(0);
  }
  law.zeta_touched = law.zeta_vertices / (d - 1);
  return law;
}

nlohmann::json to_json(const TreeClusterLaw& law) {
  nlohmann::json exact = nlohmann::json::array();
  for (const auto& q : law.exact) exact.push_back(q.get_str());
  nlohmann::json logs = nlohmann::json::array();
  for (double x : law.log_probability) {
    if (std::isfinite(x)) {
      logs.push_back(x);
    } else {
      logs.push_back(nullptr);
    }
  }
  return {{"d", law.d},
          {"p", law.p.get_str()},
          {"n_max", law.n_max()},
          {"exact", exact},
          {"log_probability", logs},
          {"zeta_vertices", law.zeta_vertices},
          {"zeta_touched", law.zeta_touched},
          {"tail_mass", law.tail_mass}};
}

}  // namespace percolab
