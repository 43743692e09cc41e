#pragma once

#include <cstdint>
#include <span>

#include "edgesign/batch.hpp"

namespace edgesign {

/// +1 is the positive class.
struct ConfusionCounts {
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const Sign> predicted, std::span<const Sign> truth);

/// Scores a prediction against the graph's labels. The prediction must
/// cover exactly the test edges of `split`, each once.
ConfusionCounts confusion(const Prediction& pred, const SignedDigraph& g, const EdgeSplit& split);

/// Matthews correlation; 0 when any marginal is empty.
double mcc(const ConfusionCounts& c);
double accuracy(const ConfusionCounts& c);

}  // namespace edgesign
