#pragma once

#include <cstdint>
#include <thread>
#include <vector>

#include "percolab/cluster.hpp"
#include "percolab/graph.hpp"

namespace percolab {

/// Worker count: `requested` if nonzero, else PERCOLAB_WORKERS, else the
/// machine's hardware concurrency.
unsigned resolve_workers(unsigned requested);

/// Runs `trials` independent tasks split into contiguous index blocks, one
/// accumulator per worker, then folds them with `merge`. Accumulators must
/// hold only order-independent data (integer counts), so the result does
/// not depend on the worker count or the merge order.
///
/// `visit(acc, trial_index, scratch)` performs one trial.
template <class Accumulator, class Visit>
Accumulator run_trials(std::uint64_t trials, unsigned workers, Visit visit) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(1, trials))));
  std::vector<Accumulator> parts(workers);
  auto block = [&](unsigned w) {
    const std::uint64_t begin = trials * w / workers;
    const std::uint64_t end = trials * (w + 1) / workers;
    ClusterScratch scratch;
    for (std::uint64_t t = begin; t < end; ++t) visit(parts[w], t, scratch);
  };
  if (workers == 1) {
    block(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(block, w);
  }
  Accumulator total = std::move(parts[0]);
  for (unsigned w = 1; w < workers; ++w) total.merge(parts[w]);
  return total;
}

}  // namespace percolab
