#include "percolab/rng.hpp"

namespace percolab {

std::vector<double> EdgeLabelSample::materialize(const Graph& g) const {
  std::vector<double> out(g.edge_count());
  for (EdgeId e = 0; e < out.size(); ++e) out[e] = (*this)(e);
  return out;
}

EdgeLabelSample sample_labels(const Graph&, std::uint64_t seed) { return EdgeLabelSample(seed); }

}  // namespace percolab
