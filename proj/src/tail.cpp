#include "percolab/tail.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <vector>

#include "percolab/cluster.hpp"
#include "percolab/errors.hpp"
#include "percolab/trials.hpp"

namespace percolab {

std::uint64_t TailReport::finite_total() const {
  std::uint64_t total = 0;
  for (const auto& [n, c] : finite_counts) total += c;
  return total;
}

std::map<std::uint32_t, std::uint64_t> TailReport::survival_counts() const {
  std::map<std::uint32_t, std::uint64_t> out;
  std::uint64_t running = 0;
  for (auto it = finite_counts.rbegin(); it != finite_counts.rend(); ++it) {
    running += it->second;
    out[it->first] = running;
  }
  return out;
}

namespace {

void validate_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0, 1]");
}

struct TailAccumulator {
  std::map<std::uint32_t, std::uint64_t> by_touched;
  std::map<std::uint32_t, std::uint64_t> by_size;
  std::uint64_t censored = 0;

  void merge(const TailAccumulator& o) {
    for (const auto& [k, c] : o.by_touched) by_touched[k] += c;
    for (const auto& [k, c] : o.by_size) by_size[k] += c;
    censored += o.censored;
  }
};

struct SurvivalPoint {
  double x;
  double y;       // log survival
  double weight;  // inverse variance of y
};

std::vector<SurvivalPoint> survival_points(const TailReport& r, const FitWindow& w) {
  std::vector<SurvivalPoint> pts;
  const double trials = static_cast<double>(r.trials);
  for (const auto& [n, count] : r.survival_counts()) {
    if (n < w.n_min || n > w.n_max || count < kMinSamplesPerBin) continue;
    const double s = static_cast<double>(count) / trials;
    // Var(log S) ~ (1 - S) / (trials * S) by the delta method.
    const double var = std::max((1.0 - s) / (trials * s), 1e-300);
    pts.push_back({static_cast<double>(n), std::log(s), 1.0 / var});
  }
  return pts;
}

// Weighted least squares for y = a + b * f(x); returns (a, b, cov_bb, ssr).
struct LineFit {
  double intercept, slope, slope_var, ssr;
};

template <class Feature>
LineFit weighted_line(const std::vector<SurvivalPoint>& pts, Feature feature) {
  const auto k = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd X(k, 2);
  Eigen::VectorXd y(k), w(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = feature(pts[i].x);
    y(i) = pts[i].y;
    w(i) = pts[i].weight;
  }
  const Eigen::Matrix2d normal = X.transpose() * w.asDiagonal() * X;
  const Eigen::Vector2d rhs = X.transpose() * w.asDiagonal() * y;
  const Eigen::Vector2d beta = normal.ldlt().solve(rhs);
  const Eigen::VectorXd resid = y - X * beta;
  const double ssr = resid.cwiseProduct(resid).dot(w);
  const Eigen::Matrix2d cov = normal.inverse();
  return {beta(0), beta(1), cov(1, 1), ssr};
}

}  // namespace

TailFit fit_exponential_tail(const TailReport& report, const FitWindow& window) {
  const auto pts = survival_points(report, window);
  if (pts.size() < 2) {
    throw FitError("fit window holds fewer than two bins with >= " +
                   std::to_string(kMinSamplesPerBin) + " samples");
  }
  const auto line = weighted_line(pts, [](double x) { return x; });
  TailFit fit;
  fit.points = pts.size();
  fit.n_min = static_cast<std::uint32_t>(pts.front().x);
  fit.n_max = static_cast<std::uint32_t>(pts.back().x);
  fit.zeta_stderr = std::sqrt(line.slope_var);
  if (line.slope >= 0.0) {
    fit.zeta_hat = 0.0;
    fit.nonnegative_slope = true;
  } else {
    fit.zeta_hat = -line.slope;
  }
  return fit;
}

StretchedFit fit_stretched_tail(const TailReport& report, const FitWindow& window) {
  const auto pts = survival_points(report, window);
  if (pts.size() < 3) throw FitError("stretched fit needs at least three usable bins");
  StretchedFit best;
  best.points = pts.size();
  best.exponential_residual = weighted_line(pts, [](double x) { return x; }).ssr;
  best.residual = INFINITY;
  auto try_kappa = [&](double kappa) {
    const auto line = weighted_line(pts, [kappa](double x) { return std::pow(x, kappa); });
    if (line.ssr < best.residual) {
      best.residual = line.ssr;
      best.kappa = kappa;
      best.c = -line.slope;
    }
  };
  for (int i = 1; i <= 300; ++i) try_kappa(0.005 * i);
  const double coarse = best.kappa;
  for (int i = -50; i <= 50; ++i) {
    const double kappa = coarse + 0.0001 * i;
    if (kappa > 0.0) try_kappa(kappa);
  }
  return best;
}

TailReport tail_histogram(const Graph& g, double p, const TailOptions& options) {
  validate_p(p);
  if (options.trials < 1) throw ParameterError("trials must be >= 1");
  const VertexId root = options.root.value_or(g.origin());
  if (root >= g.vertex_count() || g.on_boundary(root)) {
    throw ArgumentError("root must be an interior vertex");
  }
  auto acc = run_trials<TailAccumulator>(
      options.trials, resolve_workers(options.workers),
      [&](TailAccumulator& a, std::uint64_t t, ClusterScratch& scratch) {
        const EdgeLabelSample labels(options.seed + t);
        const auto s = measure_cluster(g, labels, p, root, scratch);
        if (s.censored) {
          ++a.censored;
        } else {
          ++a.by_touched[s.touched];
          ++a.by_size[s.vertices];
        }
      });
  TailReport r;
  r.p = p;
  r.trials = options.trials;
  r.seed = options.seed;
  r.root = root;
  r.finite_counts = std::move(acc.by_touched);
  r.finite_size_counts = std::move(acc.by_size);
  r.censored_count = acc.censored;
  try {
    r.fit = fit_exponential_tail(r, options.window.value_or(FitWindow{}));
  } catch (const FitError& ex) {
    r.fit_error = ex.what();
  }
  return r;
}

void write_tail_csv(std::ostream& out, const TailReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# p=%.17g\n", r.p);
  out << buf;
  out << "# trials=" << r.trials << '\n';
  out << "# seed=" << r.seed << '\n';
  out << "# root=" << r.root << '\n';
  out << "# censored_count=" << r.censored_count << '\n';
  if (r.fit) {
    std::snprintf(buf, sizeof buf, "# zeta_hat=%.17g\n# zeta_stderr=%.17g\n", r.fit->zeta_hat,
                  r.fit->zeta_stderr);
    out << buf;
    out << "# fit_window=" << r.fit->n_min << ':' << r.fit->n_max << '\n';
  } else {
    out << "# zeta_hat=nan\n# zeta_stderr=nan\n# fit_error=" << r.fit_error << '\n';
  }
  out << "n,finite_count,survival,survival_stderr\n";
  const auto surv = r.survival_counts();
  const double trials = static_cast<double>(r.trials);
  for (const auto& [n, count] : r.finite_counts) {
    const double s = static_cast<double>(surv.at(n)) / trials;
    const double se = std::sqrt(s * (1.0 - s) / trials);
    std::snprintf(buf, sizeof buf, "%u,%llu,%.17g,%.17g\n", n,
                  static_cast<unsigned long long>(count), s, se);
    out << buf;
  }
}

// ---------------------------------------------------------------------------

namespace {

struct ObservableAccumulator {
  std::map<std::uint32_t, std::uint64_t> by_size;
  std::uint64_t censored = 0;
  std::uint64_t co_cluster = 0;

  void merge(const ObservableAccumulator& o) {
    for (const auto& [k, c] : o.by_size) by_size[k] += c;
    censored += o.censored;
    co_cluster += o.co_cluster;
  }
};

}  // namespace

Observables observables(const Graph& g, double p, const ObservablesOptions& options) {
  validate_p(p);
  if (options.trials < 1) throw ParameterError("trials must be >= 1");
  VertexId root = g.origin();
  VertexId target = kNoVertex;
  if (options.pair) {
    root = options.pair->first;
    target = options.pair->second;
    if (root >= g.vertex_count() || target >= g.vertex_count() || g.on_boundary(root) ||
        g.on_boundary(target)) {
      throw ArgumentError("pair vertices must be interior");
    }
  }
  auto acc = run_trials<ObservableAccumulator>(
      options.trials, resolve_workers(options.workers),
      [&](ObservableAccumulator& a, std::uint64_t t, ClusterScratch& scratch) {
        const EdgeLabelSample labels(options.seed + t);
        const auto s = measure_cluster(g, labels, p, root, scratch, false, target);
        if (s.censored) {
          ++a.censored;
          return;
        }
        ++a.by_size[s.vertices];
        if (s.hit_target) ++a.co_cluster;
      });
  Observables o;
  o.trials = options.trials;
  const double trials = static_cast<double>(options.trials);
  o.theta_hat = static_cast<double>(acc.censored) / trials;
  std::uint64_t finite = 0, volume = 0;
  double inverse = 0.0;
  for (const auto& [k, c] : acc.by_size) {
    finite += c;
    volume += static_cast<std::uint64_t>(k) * c;
    inverse += static_cast<double>(c) / static_cast<double>(k);
  }
  if (finite > 0) o.chi_f_hat = static_cast<double>(volume) / static_cast<double>(finite);
  o.kappa_hat = inverse / trials;
  if (options.pair) o.tau_f_hat = static_cast<double>(acc.co_cluster) / trials;
  return o;
}

// ---------------------------------------------------------------------------

namespace {

struct CensusAccumulator {
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::uint64_t> joint;
  std::uint64_t censored = 0;

  void merge(const CensusAccumulator& o) {
    for (const auto& [k, c] : o.joint) joint[k] += c;
    censored += o.censored;
  }
};

}  // namespace

ClusterCensus cluster_census(const Graph& g, double p, const TailOptions& options) {
  validate_p(p);
  if (options.trials < 1) throw ParameterError("trials must be >= 1");
  const VertexId root = options.root.value_or(g.origin());
  auto acc = run_trials<CensusAccumulator>(
      options.trials, resolve_workers(options.workers),
      [&](CensusAccumulator& a, std::uint64_t t, ClusterScratch& scratch) {
        const EdgeLabelSample labels(options.seed + t);
        const auto s = measure_cluster(g, labels, p, root, scratch, true);
        if (s.censored) {
          ++a.censored;
        } else {
          ++a.joint[{s.touched, s.open, s.radius}];
        }
      });
  ClusterCensus c;
  c.p = p;
  c.trials = options.trials;
  c.censored = acc.censored;
  c.joint = std::move(acc.joint);
  return c;
}

}  // namespace percolab
