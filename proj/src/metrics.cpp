#include "edgesign/metrics.hpp"

#include <cmath>

namespace edgesign {

ConfusionCounts confusion(std::span<const Sign> predicted, std::span<const Sign> truth) {
  if (predicted.size() != truth.size()) throw ArgumentError("prediction and truth differ in length");
  ConfusionCounts c;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const bool pred_pos = predicted[k] == Sign::positive;
    const bool true_pos = truth[k] == Sign::positive;
    if (pred_pos && true_pos) ++c.tp;
    else if (!pred_pos && !true_pos) ++c.tn;
    else if (pred_pos) ++c.fp;
    else ++c.fn;
  }
  return c;
}

ConfusionCounts confusion(const Prediction& pred, const SignedDigraph& g, const EdgeSplit& split) {
  if (split.training_mask.size() != g.edge_count())
    throw ArgumentError("split does not match the graph's edge count");
  if (pred.labels.size() != pred.edges.size()) throw ArgumentError("prediction is missing labels");
  std::vector<std::uint8_t> seen(g.edge_count(), 0);
  std::vector<Sign> truth;
  truth.reserve(pred.edges.size());
  for (EdgeId e : pred.edges) {
    if (e >= g.edge_count() || split.is_training(e) || seen[e])
      throw ArgumentError("prediction does not cover exactly the test edges");
    seen[e] = 1;
    truth.push_back(g.label(e));
  }
  if (pred.edges.size() != g.edge_count() - split.training_count())
    throw ArgumentError("prediction does not cover exactly the test edges");
  return confusion(pred.labels, truth);
}

double mcc(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

double accuracy(const ConfusionCounts& c) {
  const auto n = c.total();
  return n == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
}

}  // namespace edgesign
