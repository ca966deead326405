#include "percolab/isoperimetry.hpp"

#include <algorithm>
#include <limits>

#include "percolab/errors.hpp"

namespace percolab {

namespace {

// ESU-style enumeration: every connected set whose smallest vertex is
// `anchor` is visited exactly once.
class SubsetEnumerator {
 public:
  SubsetEnumerator(const Graph& g, int max_size, std::int64_t volume_cap)
      : g_(g), max_size_(max_size), volume_cap_(volume_cap), in_set_(g.vertex_count(), 0),
        near_(g.vertex_count(), 0) {}

  void run(IsoperimetricReport& report) {
    report_ = &report;
    for (VertexId s = 0; s < g_.vertex_count(); ++s) {
      if (!allowed(s)) continue;
      anchor_ = s;
      add(s);
      std::vector<VertexId> ext;
      for (const auto& h : g_.incident(s)) {
        if (h.neighbor > s && allowed(h.neighbor)) ext.push_back(h.neighbor);
      }
      extend(ext);
      remove(s);
    }
  }

  std::vector<std::int64_t> best_boundary_at_volume;

 private:
  bool allowed(VertexId v) const { return !g_.on_boundary(v); }

  void add(VertexId w) {
    std::int64_t inside = 0;
    for (const auto& h : g_.incident(w)) {
      inside += in_set_[h.neighbor];
      ++near_[h.neighbor];
    }
    ++near_[w];
    in_set_[w] = 1;
    internal_ += inside;
    volume_ += static_cast<std::int64_t>(g_.degree(w));
    set_.push_back(w);
  }

  void remove(VertexId w) {
    set_.pop_back();
    in_set_[w] = 0;
    std::int64_t inside = 0;
    for (const auto& h : g_.incident(w)) {
      inside += in_set_[h.neighbor];
      --near_[h.neighbor];
    }
    --near_[w];
    internal_ -= inside;
    volume_ -= static_cast<std::int64_t>(g_.degree(w));
  }

  void record() {
    ++report_->sets_enumerated;
    if (volume_ == 0 || volume_ > volume_cap_) return;
    const std::int64_t boundary = volume_ - 2 * internal_;
    const Fraction ratio{boundary, volume_};
    if (report_->cheeger_witness.empty() || ratio < report_->cheeger_lower) {
      report_->cheeger_lower = ratio;
      report_->cheeger_witness = set_;
    }
    if (static_cast<std::size_t>(volume_) >= best_boundary_at_volume.size()) {
      best_boundary_at_volume.resize(volume_ + 1, std::numeric_limits<std::int64_t>::max());
    }
    best_boundary_at_volume[volume_] = std::min(best_boundary_at_volume[volume_], boundary);
  }

  void extend(std::vector<VertexId> ext) {
    record();
    if (static_cast<int>(set_.size()) == max_size_) return;
    while (!ext.empty()) {
      const VertexId w = ext.back();
      ext.pop_back();
      // Exclusive neighbourhood of w relative to the current set, computed
      // before w joins it.
      std::vector<VertexId> next = ext;
      for (const auto& h : g_.incident(w)) {
        const VertexId u = h.neighbor;
        if (u > anchor_ && allowed(u) && near_[u] == 0) next.push_back(u);
      }
      add(w);
      extend(std::move(next));
      remove(w);
    }
  }

  const Graph& g_;
  int max_size_;
  std::int64_t volume_cap_;
  std::vector<std::uint8_t> in_set_;
  std::vector<std::uint32_t> near_;  // number of set members in the closed neighbourhood
  std::vector<VertexId> set_;
  VertexId anchor_ = 0;
  std::int64_t internal_ = 0;
  std::int64_t volume_ = 0;
  IsoperimetricReport* report_ = nullptr;
};

}  // namespace

IsoperimetricReport cheeger_exact(const Graph& g, int max_set_size) {
  if (max_set_size < 1) throw ParameterError("max_set_size must be >= 1");
  if (max_set_size > kMaxCheegerSetSize) {
    throw SizeError("max_set_size exceeds enumeration guard of " +
                    std::to_string(kMaxCheegerSetSize));
  }
  std::int64_t cap = std::numeric_limits<std::int64_t>::max();
  if (!g.has_boundary()) cap = static_cast<std::int64_t>(g.edge_count());  // vol(V)/2
  IsoperimetricReport report;
  SubsetEnumerator enumerator(g, max_set_size, cap);
  enumerator.run(report);
  if (report.cheeger_witness.empty()) {
    throw StateError("no admissible vertex set to enumerate");
  }
  // psi(t) = min over vol >= t, i.e. a suffix minimum.
  const auto& best = enumerator.best_boundary_at_volume;
  std::int64_t running = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> suffix(best.size(), running);
  for (std::size_t t = best.size(); t-- > 1;) {
    running = std::min(running, best[t]);
    suffix[t] = running;
  }
  for (std::size_t t = 1; t < suffix.size(); ++t) report.profile[static_cast<std::int64_t>(t)] = suffix[t];
  std::sort(report.cheeger_witness.begin(), report.cheeger_witness.end());
  return report;
}

}  // namespace percolab
