#include "edgesign/batch.hpp"

namespace edgesign {

BlcModel blc_fit(const SignedDigraph& g, const EdgeSplit& split) {
  if (split.training_mask.size() != g.edge_count())
    throw ArgumentError("split does not match the graph's edge count");
  BlcModel m;
  std::size_t train = 0, positive = 0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!split.is_training(e)) continue;
    ++train;
    positive += g.label(e) == Sign::positive;
  }
  if (train == 0) throw ArgumentError("blc needs at least one training edge");
  m.features = troll_trust(g, split.training_mask, 0.5);
  m.tau = static_cast<double>(positive) / static_cast<double>(train);
  return m;
}

double blc_score(const BlcModel& m, NodeId i, NodeId j) {
  return (1.0 - m.features.tr[i]) + (1.0 - m.features.un[j]) - 0.5 - m.tau;
}

Prediction blc_predict(const BlcModel& m, const SignedDigraph& g, std::span<const EdgeId> edges) {
  Prediction pred;
  pred.method = "blc";
  pred.threshold = 0.0;
  pred.edges.assign(edges.begin(), edges.end());
  pred.scores.reserve(edges.size());
  pred.labels.reserve(edges.size());
  for (EdgeId e : edges) {
    const double s = blc_score(m, g.edge(e).src, g.edge(e).dst);
    pred.scores.push_back(s);
    pred.labels.push_back(threshold_sign(s, 0.0));
  }
  return pred;
}

}  // namespace edgesign
