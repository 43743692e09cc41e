#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "edgesign/graph.hpp"

namespace edgesign {

/// Node numbering shared by both reduced graphs:
/// [all i_in][all i_out][one square node per original edge, in edge order].
struct ReducedIndex {
  std::size_t node_count = 0;  // |V|
  std::size_t edge_count = 0;  // |E|

  std::size_t in_copy(NodeId i) const noexcept { return i; }
  std::size_t out_copy(NodeId i) const noexcept { return node_count + i; }
  std::size_t square(EdgeId e) const noexcept { return 2 * node_count + e; }
  std::size_t size() const noexcept { return 2 * node_count + edge_count; }
};

struct UndirectedEdge {
  std::size_t u, v;
};

struct WeightedEdge {
  std::size_t u, v;
  double weight;
};

/// Unweighted edge-to-node reduction: each original edge (i, j) becomes a
/// square node wired to i_out and j_in. Square nodes carry the edge label;
/// circle nodes are unlabeled.
struct GPrime {
  ReducedIndex index;
  std::vector<UndirectedEdge> edges;          // 2|E|
  std::vector<std::optional<Sign>> labels;    // per reduced node

  std::size_t node_count() const noexcept { return index.size(); }
  std::vector<std::size_t> degrees() const;
};

/// Weighted variant: the 2|E| path edges of GPrime with weight +2 (same
/// order), then one (i_out, j_in) edge of weight -1 per original edge.
struct GSecond {
  ReducedIndex index;
  std::vector<WeightedEdge> edges;  // 3|E|
  std::vector<std::optional<Sign>> labels;

  std::size_t node_count() const noexcept { return index.size(); }
};

GPrime to_gprime(const SignedDigraph& g);
GSecond to_gsecond(const SignedDigraph& g);

/// Number of GPrime edges whose endpoints carry different labels. Every node
/// must be labeled.
std::size_t cutsize(const GPrime& gp, std::span<const Sign> node_labels);

/// `u v w` per line.
void write_weighted_edge_list(const GPrime& gp, std::ostream& out);
void write_weighted_edge_list(const GSecond& gs, std::ostream& out);

}  // namespace edgesign
