#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edgesign/graph.hpp"
#include "json.hpp"

namespace edgesign {

struct UniformPrior {};

struct BetaPrior {
  double a_p = 1, b_p = 1, a_q = 1, b_q = 1;
};

/// Value `hi` with probability `weight`, else `lo`.
struct TwoPoint {
  double lo = 0, hi = 1, weight = 0.5;
};

/// Independent two-point marginals for p and q.
struct TwoPointPrior {
  TwoPoint p, q;
};

using PriorSpec = std::variant<UniformPrior, BetaPrior, TwoPointPrior>;

/// Parses "uniform", "beta:ap,bp,aq,bq", "twopoint:lo,hi,w" (same marginal
/// for p and q) or "twopoint:lo,hi,w,qlo,qhi,qw".
PriorSpec parse_prior(const std::string& text);
std::string describe(const PriorSpec& prior);
void validate(const PriorSpec& prior);

struct GenParams {
  std::vector<double> p, q;
  PriorSpec prior;
  std::uint64_t seed = 0;
};

GenParams sample_params(std::size_t n, const PriorSpec& prior, std::uint64_t seed);

nlohmann::json to_json(const GenParams& params);
GenParams params_from_json(const nlohmann::json& j);

/// Each label is +1 with probability (p_i + q_j) / 2, independently.
std::vector<Sign> sample_labels(const SignedDigraph& topology, const GenParams& params,
                                std::uint64_t seed);

/// sgn(p_i + q_j - 1), ties to +1.
Sign bayes_predict(const GenParams& params, NodeId i, NodeId j);

struct EdgeRates {
  std::optional<double> out_rate;  // empty when d_out(i) == 0
  std::optional<double> in_rate;   // empty when d_in(i) == 0
};

/// Probability that a uniformly drawn out-edge (resp. in-edge) of `node`
/// is positive under the model.
EdgeRates edge_rates(const SignedDigraph& g, const GenParams& params, NodeId node);

// ---------------------------------------------------------------------------
// Synthetic topologies

/// Exactly n * mean_out_degree distinct ordered pairs, uniformly at random.
struct ErdosRenyiTopology {
  double mean_out_degree = 10;
};
/// Every node picks `degree` distinct random targets.
struct ConstantOutDegreeTopology {
  std::size_t degree = 10;
};
/// Circulant over a random node permutation: in- and out-degree exactly `degree`.
struct RegularTopology {
  std::size_t degree = 10;
};

using TopologySpec = std::variant<ErdosRenyiTopology, ConstantOutDegreeTopology, RegularTopology>;

/// Parses "er:D", "out:D" or "regular:D".
TopologySpec parse_topology(const std::string& text);
std::string describe(const TopologySpec& topology);

std::vector<Edge> generate_topology(std::size_t n, const TopologySpec& spec, std::uint64_t seed);

struct SyntheticData {
  SignedDigraph graph;
  GenParams params;
};

/// Topology, params and labels from independent streams derived from `seed`.
SyntheticData synthesize(std::size_t n, const TopologySpec& topology, const PriorSpec& prior,
                         std::uint64_t seed);

/// SplitMix64 finalizer of (seed, stream); distinct streams give unrelated seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace edgesign
