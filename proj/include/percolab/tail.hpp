#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>

#include "percolab/graph.hpp"

namespace percolab {

struct FitWindow {
  std::uint32_t n_min = 1;
  std::uint32_t n_max = 0xFFFFFFFFu;
};

/// Bins whose survival count falls below this are dropped from every fit.
inline constexpr std::uint64_t kMinSamplesPerBin = 50;

struct TailFit {
  double zeta_hat = 0.0;
  double zeta_stderr = 0.0;
  std::uint32_t n_min = 0;  // effective window after filtering
  std::uint32_t n_max = 0;
  std::size_t points = 0;
  bool nonnegative_slope = false;  // zeta_hat clamped to 0
};

/// Empirical law of E_v with censoring accounting.
struct TailReport {
  double p = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  VertexId root = 0;
  std::map<std::uint32_t, std::uint64_t> finite_counts;       // E_v -> count
  std::map<std::uint32_t, std::uint64_t> finite_size_counts;  // |K_v| -> count
  std::uint64_t censored_count = 0;
  std::optional<TailFit> fit;
  std::string fit_error;  // set when the requested window had no usable bins

  std::uint64_t finite_total() const;
  /// (n, #trials with n <= E_v < inf) at every n in the finite support.
  std::map<std::uint32_t, std::uint64_t> survival_counts() const;
};

struct TailOptions {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<FitWindow> window;
  std::optional<VertexId> root;  // defaults to g.origin()
  unsigned workers = 0;
};

/// Runs independent explorations (trial t uses seed + t), tabulates finite
/// E_v and censoring, and fits zeta_hat as minus the weighted least-squares
/// slope of log P(E_v >= n, finite) over the window.
TailReport tail_histogram(const Graph& g, double p, const TailOptions& options);

/// Refits an existing report. Throws FitError when no bin in the window
/// carries kMinSamplesPerBin samples.
TailFit fit_exponential_tail(const TailReport& report, const FitWindow& window);

/// Fit of log survival to a - c n^kappa over a kappa grid, compared with the
/// pure exponential (kappa = 1) fit on the same points.
struct StretchedFit {
  double kappa = 1.0;
  double c = 0.0;
  double residual = 0.0;              // weighted SSR at the best kappa
  double exponential_residual = 0.0;  // weighted SSR at kappa = 1
  std::size_t points = 0;
};
StretchedFit fit_stretched_tail(const TailReport& report, const FitWindow& window);

/// Columns n, finite_count, survival, survival_stderr; '#' metadata header.
void write_tail_csv(std::ostream& out, const TailReport& report);

// ---------------------------------------------------------------------------

struct Observables {
  double theta_hat = 0.0;
  std::optional<double> chi_f_hat;  // empty when every trial was censored
  double kappa_hat = 0.0;
  std::optional<double> tau_f_hat;  // present when a pair was supplied
  std::uint64_t trials = 0;
};

struct ObservablesOptions {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<std::pair<VertexId, VertexId>> pair;  // root = pair.first
  unsigned workers = 0;
};

Observables observables(const Graph& g, double p, const ObservablesOptions& options);

// ---------------------------------------------------------------------------

/// Joint counts of (E_v, |E_o|, R_v) over uncensored trials.
struct ClusterCensus {
  double p = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t censored = 0;
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::uint64_t> joint;
};

ClusterCensus cluster_census(const Graph& g, double p, const TailOptions& options);

}  // namespace percolab
