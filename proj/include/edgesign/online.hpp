#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "edgesign/graph.hpp"
#include "json.hpp"

namespace edgesign {

/// Randomized weighted majority over two experts. Weights are
/// exp(-eta * L) for cumulative losses L, with the self-confident rate
/// eta = min(1/2, sqrt(ln 2 / (1 + L*))), L* the smaller of the two losses.
/// Only the loss difference enters the probabilities, so nothing over- or
/// underflows however long the run.
struct TwoExpertRwm {
  double loss_a = 0.0;  // first expert
  double loss_b = 0.0;  // second expert

  double eta() const;
  /// Probability of following the first expert.
  double prob_a() const;
  /// Log-weights, for inspection.
  double log_weight_a() const { return -eta() * loss_a; }
  double log_weight_b() const { return -eta() * loss_b; }
  void update(double la, double lb) {
    loss_a += la;
    loss_b += lb;
  }
};

/// Stacked learner: per node an out-instance and an in-instance over the
/// constant experts {+1, -1}; two meta-experts (out-instance of the source,
/// in-instance of the destination); and a top-level combiner over the two
/// meta-experts driven by their expected losses.
class OnlineLearner {
 public:
  struct Forecast {
    EdgeId edge = 0;
    double p_positive = 0.5;
    Sign prediction = Sign::positive;  // randomized draw

    double mistake_if(Sign label) const { return label == Sign::positive ? 1.0 - p_positive : p_positive; }
  };

  /// Instances are created on first use.
  explicit OnlineLearner(const SignedDigraph& g);

  /// Errors: edge already revealed, or another prediction still pending.
  Forecast predict(EdgeId e, std::mt19937_64& rng);
  /// Exact probability of predicting +1 on `e` under the current weights.
  double prob_positive(EdgeId e) const;
  /// Errors: no pending prediction for `e`.
  void update(EdgeId e, Sign label);

  double expected_mistakes() const noexcept { return expected_; }
  std::uint64_t realized_mistakes() const noexcept { return realized_; }
  std::uint64_t edges_seen() const noexcept { return seen_; }
  std::size_t instances_allocated() const noexcept { return out_.size() + in_.size(); }
  const TwoExpertRwm& top() const noexcept { return top_; }

  nlohmann::json to_json() const;
  static OnlineLearner from_json(const SignedDigraph& g, const nlohmann::json& j);

 private:
  const SignedDigraph* g_;
  // Expert a is the constant +1 at the base level and the out meta-expert at the top.
  std::unordered_map<NodeId, TwoExpertRwm> out_, in_;
  TwoExpertRwm top_;
  std::vector<bool> revealed_;
  std::optional<Forecast> pending_;
  double expected_ = 0.0;
  std::uint64_t realized_ = 0;
  std::uint64_t seen_ = 0;

  double base_positive(const std::unordered_map<NodeId, TwoExpertRwm>& side, NodeId v) const;
};

// ---------------------------------------------------------------------------
// Runs and reports

/// Constant c in the reported bound psi_g + c (sqrt(|V| psi_g) + |V|).
/// Measured, see the README.
inline constexpr double kOnlineBoundConstant = 4.0;

double online_bound(std::size_t psi_g, std::size_t node_count, double c = kOnlineBoundConstant);

struct OnlineReport {
  std::uint64_t rounds = 0;
  std::uint64_t realized_mistakes = 0;
  double expected_mistakes = 0.0;
  std::size_t psi_g = 0;
  double bound = 0.0;
  std::uint64_t seed = 0;
  std::string order;  // descriptor

  // Adversary runs only: the forced prefix versus the optional tail.
  std::uint64_t tail_rounds = 0;
  std::uint64_t tail_realized = 0;
  double tail_expected = 0.0;
};

nlohmann::json to_json(const OnlineReport& r);

/// Uniformly random presentation order.
std::vector<EdgeId> random_order(std::size_t edge_count, std::uint64_t seed);

/// Runs the protocol on g's labels in the given order. Errors: an order
/// that repeats an edge or misses one.
OnlineReport run_online(const SignedDigraph& g, std::span<const EdgeId> order, std::uint64_t seed,
                        const std::string& order_name = "given");

// ---------------------------------------------------------------------------
// Adversary

struct Reveal {
  EdgeId edge;
  Sign label;
};

/// A labeling with exactly K negatives drawn uniformly, and the reveal
/// sequence: each round picks a label value by a fair coin (the other one
/// once a class is exhausted) and reveals a uniformly random unrevealed edge
/// with that label, until every negative is out. `tail` holds the remaining
/// positives in random order when a full pass was requested.
struct AdversarySequence {
  std::size_t budget = 0;  // K
  std::uint64_t seed = 0;
  std::size_t edge_count = 0;
  std::vector<Reveal> forced;
  std::vector<Reveal> tail;

  /// Full labeling (positives everywhere but the K negatives).
  std::vector<Sign> labeling() const;
};

/// Errors: K outside [1, floor(|E|/2)].
AdversarySequence adversary_generate(const SignedDigraph& g, std::size_t budget, std::uint64_t seed,
                                     bool full_pass = false);

/// Plays the sequence against a fresh learner. Forced and tail tallies are
/// kept apart.
OnlineReport run_adversary(const SignedDigraph& g, const AdversarySequence& seq, std::uint64_t seed);

/// m_{r,c} = C(r-1, c-1) / 2^r, evaluated in log space.
double adversary_m(std::size_t r, std::size_t c);

/// sum_{c=1..K} sum_{r=c..r_max} m_{r,c}. Tends to K as r_max grows.
double adversary_expected_mistakes(std::size_t budget, std::size_t r_max);

}  // namespace edgesign
