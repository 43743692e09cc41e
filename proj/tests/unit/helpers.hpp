#pragma once

#include <random>
#include <vector>

#include "edgesign/graph.hpp"

namespace testing {

using namespace edgesign;

/// The 4-edge graph a->b (+), a->c (-), b->c (+), c->b (-) with a=0, b=1, c=2.
inline SignedDigraph four_edge_graph() {
  return SignedDigraph(3, {{0, 1}, {0, 2}, {1, 2}, {2, 1}},
                       {Sign::positive, Sign::negative, Sign::positive, Sign::negative},
                       {"a", "b", "c"});
}

/// Random simple digraph with uniform labels.
inline SignedDigraph random_graph(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::vector<Edge> edges;
  std::vector<Sign> labels;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  std::bernoulli_distribution coin(0.5);
  std::size_t guard = 0;
  while (edges.size() < m && guard++ < 100 * m + 100) {
    const NodeId a = node(rng), b = node(rng);
    if (a == b || used[a][b]) continue;
    used[a][b] = true;
    edges.push_back({a, b});
    labels.push_back(coin(rng) ? Sign::positive : Sign::negative);
  }
  return SignedDigraph(n, std::move(edges), std::move(labels));
}

inline EdgeSplit mask_split(const std::vector<std::uint8_t>& mask) {
  EdgeSplit s;
  s.training_mask = mask;
  return s;
}

}  // namespace testing
