#include <cmath>
#include <unordered_map>

#include "edgesign/online.hpp"

namespace edgesign {

namespace {

// Fisher-Yates over 0..m-1 that only stores displaced slots, so drawing the
// first k elements costs O(k).
class LazyShuffle {
 public:
  LazyShuffle(std::size_t m, std::mt19937_64& rng) : m_(m), rng_(rng) {}

  std::size_t drawn() const noexcept { return next_; }

  EdgeId draw() {
    std::uniform_int_distribution<std::size_t> pick(next_, m_ - 1);
    const std::size_t j = pick(rng_);
    const EdgeId at_j = slot(j);
    swapped_[j] = slot(next_);
    ++next_;
    return at_j;
  }

 private:
  EdgeId slot(std::size_t k) const {
    const auto it = swapped_.find(k);
    return it == swapped_.end() ? static_cast<EdgeId>(k) : it->second;
  }

  std::size_t m_;
  std::size_t next_ = 0;
  std::mt19937_64& rng_;
  std::unordered_map<std::size_t, EdgeId> swapped_;
};

// Psi_G of the adversary labeling from its negatives alone: only nodes
// touching a negative edge have a nonzero minority count.
std::size_t psi_from_negatives(const SignedDigraph& g, const AdversarySequence& seq) {
  std::unordered_map<NodeId, std::size_t> neg_out, neg_in;
  for (const auto& r : seq.forced) {
    if (r.label != Sign::negative) continue;
    ++neg_out[g.edge(r.edge).src];
    ++neg_in[g.edge(r.edge).dst];
  }
  std::size_t psi_out = 0, psi_in = 0;
  for (const auto& [v, k] : neg_out) psi_out += std::min(k, g.out_degree(v) - k);
  for (const auto& [v, k] : neg_in) psi_in += std::min(k, g.in_degree(v) - k);
  return std::min(psi_out, psi_in);
}

}  // namespace

std::vector<Sign> AdversarySequence::labeling() const {
  std::vector<Sign> y(edge_count, Sign::positive);
  for (const auto& r : forced)
    if (r.label == Sign::negative) y[r.edge] = Sign::negative;
  return y;
}

AdversarySequence adversary_generate(const SignedDigraph& g, std::size_t budget, std::uint64_t seed,
                                     bool full_pass) {
  const std::size_t m = g.edge_count();
  if (budget < 1 || budget > m / 2)
    throw ArgumentError("adversary budget K=" + std::to_string(budget) + " outside [1, " +
                        std::to_string(m / 2) + "]");
  AdversarySequence seq;
  seq.budget = budget;
  seq.seed = seed;
  seq.edge_count = m;

  std::mt19937_64 rng(seed);
  LazyShuffle shuffle(m, rng);
  // The first K shuffled edges are the negatives, already in reveal order.
  std::vector<EdgeId> negatives(budget);
  for (auto& e : negatives) e = shuffle.draw();

  std::bernoulli_distribution coin(0.5);
  std::size_t neg_next = 0;
  while (neg_next < budget) {
    const bool positives_left = shuffle.drawn() < m;
    if (coin(rng) || !positives_left) {
      seq.forced.push_back({negatives[neg_next++], Sign::negative});
    } else {
      seq.forced.push_back({shuffle.draw(), Sign::positive});
    }
  }
  if (full_pass)
    while (shuffle.drawn() < m) seq.tail.push_back({shuffle.draw(), Sign::positive});
  return seq;
}

OnlineReport run_adversary(const SignedDigraph& g, const AdversarySequence& seq, std::uint64_t seed) {
  if (seq.edge_count != g.edge_count()) throw ArgumentError("sequence was built for another graph");
  OnlineLearner learner(g);
  std::mt19937_64 rng(seed);
  for (const auto& r : seq.forced) {
    learner.predict(r.edge, rng);
    learner.update(r.edge, r.label);
  }
  OnlineReport rep;
  rep.rounds = learner.edges_seen();
  rep.realized_mistakes = learner.realized_mistakes();
  rep.expected_mistakes = learner.expected_mistakes();
  for (const auto& r : seq.tail) {
    learner.predict(r.edge, rng);
    learner.update(r.edge, r.label);
  }
  rep.tail_rounds = learner.edges_seen() - rep.rounds;
  rep.tail_realized = learner.realized_mistakes() - rep.realized_mistakes;
  rep.tail_expected = learner.expected_mistakes() - rep.expected_mistakes;
  rep.psi_g = psi_from_negatives(g, seq);
  rep.bound = online_bound(rep.psi_g, g.node_count());
  rep.seed = seed;
  rep.order = "adversary:K=" + std::to_string(seq.budget);
  return rep;
}

double adversary_m(std::size_t r, std::size_t c) {
  if (c < 1 || r < c) return 0.0;
  const double rd = static_cast<double>(r), cd = static_cast<double>(c);
  const double log_binom = std::lgamma(rd) - std::lgamma(cd) - std::lgamma(rd - cd + 1.0);
  return std::exp(log_binom - rd * std::log(2.0));
}

double adversary_expected_mistakes(std::size_t budget, std::size_t r_max) {
  if (budget < 1) throw ArgumentError("adversary budget must be at least 1");
  double total = 0.0;
  for (std::size_t c = 1; c <= budget; ++c) {
    // log m_{c,c} = -c log 2, then m_{r+1,c} = m_{r,c} * r / (2 (r - c + 1)).
    double log_m = -static_cast<double>(c) * std::log(2.0);
    for (std::size_t r = c; r <= r_max; ++r) {
      total += std::exp(log_m);
      log_m += std::log(static_cast<double>(r)) - std::log(2.0 * static_cast<double>(r - c + 1));
    }
  }
  return total;
}

}  // namespace edgesign
