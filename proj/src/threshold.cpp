#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "edgesign/batch.hpp"

namespace edgesign {

double tune_threshold(std::span<const double> scores, std::span<const Sign> labels) {
  if (scores.size() != labels.size()) throw ArgumentError("scores and labels differ in length");
  if (scores.empty()) throw ArgumentError("threshold tuning needs at least one score");
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Candidate k sits just below the k-th distinct score: everything at or
  // above it is predicted +1. Start at -inf (all +1).
  std::size_t negatives = 0;
  for (Sign s : labels) negatives += s == Sign::negative;
  std::size_t mistakes = negatives;
  std::size_t best = mistakes;
  double best_t = -inf;

  std::size_t k = 0;
  while (k < order.size()) {
    const double v = scores[order[k]];
    std::size_t end = k;
    while (end < order.size() && scores[order[end]] == v) {
      // Crossing this group flips its predictions to -1.
      mistakes += labels[order[end]] == Sign::positive ? 1 : 0;
      mistakes -= labels[order[end]] == Sign::negative ? 1 : 0;
      ++end;
    }
    double t = inf;
    if (end < order.size()) {
      const double next = scores[order[end]];
      t = v + 0.5 * (next - v);
      if (!(t > v)) t = next;  // adjacent doubles
    }
    if (mistakes < best) {
      best = mistakes;
      best_t = t;
    }
    k = end;
  }
  return best_t;
}

std::size_t threshold_mistakes(std::span<const double> scores, std::span<const Sign> labels,
                               double threshold) {
  std::size_t m = 0;
  for (std::size_t k = 0; k < scores.size(); ++k)
    m += threshold_sign(scores[k], threshold) != labels[k];
  return m;
}

void write_prediction_csv(const SignedDigraph& g, const Prediction& pred, std::ostream& out) {
  out << "src,dst,score,label\n";
  char buf[64];
  for (std::size_t k = 0; k < pred.edges.size(); ++k) {
    const Edge& e = g.edge(pred.edges[k]);
    std::snprintf(buf, sizeof buf, "%.17g", pred.scores[k]);
    out << g.node_name(e.src) << ',' << g.node_name(e.dst) << ',' << buf << ','
        << value(pred.labels[k]) << '\n';
  }
}

}  // namespace edgesign
