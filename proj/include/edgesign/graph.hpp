#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgesign/core.hpp"
#include "json.hpp"

namespace edgesign {

struct Edge {
  NodeId src;
  NodeId dst;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One byte per edge; nonzero means the edge is selected.
using EdgeMask = std::vector<std::uint8_t>;

/**
 * Immutable directed graph with one +/-1 label per edge.
 *
 * Edges keep their construction order. Outgoing and incoming adjacency are
 * CSR-style: a per-node offset array over an edge-id permutation, so
 * out_edges(i) and in_edges(j) are contiguous spans of edge ids.
 * Construction rejects self-loops, duplicate (src, dst) pairs and
 * out-of-range endpoints.
 */
class SignedDigraph {
 public:
  SignedDigraph() = default;
  SignedDigraph(std::size_t node_count, std::vector<Edge> edges, std::vector<Sign> labels,
                std::vector<std::string> node_names = {});

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  Sign label(EdgeId e) const { return labels_[e]; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Sign> labels() const noexcept { return labels_; }

  std::span<const EdgeId> out_edges(NodeId i) const {
    return {out_perm_.data() + out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]};
  }
  std::span<const EdgeId> in_edges(NodeId j) const {
    return {in_perm_.data() + in_offsets_[j], in_offsets_[j + 1] - in_offsets_[j]};
  }
  std::size_t out_degree(NodeId i) const { return out_offsets_[i + 1] - out_offsets_[i]; }
  std::size_t in_degree(NodeId j) const { return in_offsets_[j + 1] - in_offsets_[j]; }

  /// Original identifier of a compacted node (its decimal index when the
  /// graph was built without names).
  std::string node_name(NodeId i) const;
  bool has_node_names() const noexcept { return !names_.empty(); }

  std::optional<EdgeId> find_edge(NodeId src, NodeId dst) const;

  /// Same topology and names, new labels.
  SignedDigraph relabeled(std::vector<Sign> labels) const;

  /// Bytes held by edge, label and adjacency arrays (names excluded).
  std::size_t memory_bytes() const noexcept;

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<Sign> labels_;
  std::vector<std::string> names_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<EdgeId> out_perm_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<EdgeId> in_perm_;
};

// ---------------------------------------------------------------------------
// Ingestion

struct LoadResult {
  SignedDigraph graph;
  std::size_t records = 0;           // data lines parsed
  std::size_t self_loops = 0;        // records dropped as self-loops
  std::size_t merged_duplicates = 0; // same-sign repeats folded into one edge
  std::size_t conflicts = 0;         // (src, dst) pairs dropped for mixed signs
};

/// Reads `src dst sign` records separated by tabs or spaces. Lines starting
/// with '#' or '%' are comments; columns after the third are ignored.
/// Sign tokens are "1", "+1" or "-1". Node ids are compacted to 0..n-1 in
/// order of first appearance; every id that appears keeps its node even if
/// all of its records are dropped.
LoadResult load_edge_list(std::istream& in);
LoadResult load_edge_list_file(const std::string& path);

/// Writes `name<TAB>name<TAB>sign` per edge, in edge order.
void write_edge_list(const SignedDigraph& g, std::ostream& out);

nlohmann::json graph_to_json(const SignedDigraph& g);
SignedDigraph graph_from_json(const nlohmann::json& j);

/// Loads a JSON container (".json" or content starting with '{') or an edge
/// list otherwise.
SignedDigraph read_graph_file(const std::string& path);
void write_graph_json_file(const SignedDigraph& g, const std::string& path);

// ---------------------------------------------------------------------------
// Splits and degree statistics

struct EdgeSplit {
  EdgeMask training_mask;
  double fraction = 0.0;
  std::uint64_t seed = 0;

  std::size_t training_count() const;
  std::vector<EdgeId> training_edges() const;
  std::vector<EdgeId> test_edges() const;
  bool is_training(EdgeId e) const { return training_mask[e] != 0; }
};

/// Exactly round(fraction * |E|) training edges drawn without replacement
/// (seeded partial Fisher-Yates).
EdgeSplit sample_split(const SignedDigraph& g, double fraction, std::uint64_t seed);

nlohmann::json split_to_json(const EdgeSplit& s);
EdgeSplit split_from_json(const nlohmann::json& j, std::size_t edge_count);

struct NodeStats {
  std::vector<std::uint32_t> d_in, d_out;
  std::vector<std::uint32_t> d_in_plus, d_in_minus;
  std::vector<std::uint32_t> d_out_plus, d_out_minus;
};

NodeStats degree_stats(const SignedDigraph& g);
NodeStats degree_stats(const SignedDigraph& g, const EdgeMask& mask);

}  // namespace edgesign
