#include "edgesign/reduction.hpp"

#include <ostream>

namespace edgesign {

namespace {

ReducedIndex index_for(const SignedDigraph& g) {
  return {g.node_count(), g.edge_count()};
}

std::vector<std::optional<Sign>> square_labels(const SignedDigraph& g, const ReducedIndex& idx) {
  std::vector<std::optional<Sign>> labels(idx.size());
  for (EdgeId e = 0; e < g.edge_count(); ++e) labels[idx.square(e)] = g.label(e);
  return labels;
}

}  // namespace

std::vector<std::size_t> GPrime::degrees() const {
  std::vector<std::size_t> deg(node_count(), 0);
  for (const auto& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

GPrime to_gprime(const SignedDigraph& g) {
  GPrime gp;
  gp.index = index_for(g);
  gp.edges.reserve(2 * g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    gp.edges.push_back({gp.index.out_copy(ed.src), gp.index.square(e)});
    gp.edges.push_back({gp.index.square(e), gp.index.in_copy(ed.dst)});
  }
  gp.labels = square_labels(g, gp.index);
  return gp;
}

GSecond to_gsecond(const SignedDigraph& g) {
  GSecond gs;
  gs.index = index_for(g);
  gs.edges.reserve(3 * g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    gs.edges.push_back({gs.index.out_copy(ed.src), gs.index.square(e), 2.0});
    gs.edges.push_back({gs.index.square(e), gs.index.in_copy(ed.dst), 2.0});
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    gs.edges.push_back({gs.index.out_copy(ed.src), gs.index.in_copy(ed.dst), -1.0});
  }
  gs.labels = square_labels(g, gs.index);
  return gs;
}

std::size_t cutsize(const GPrime& gp, std::span<const Sign> node_labels) {
  if (node_labels.size() != gp.node_count())
    throw ArgumentError("cutsize needs a label for each of the " +
                        std::to_string(gp.node_count()) + " reduced nodes");
  std::size_t cut = 0;
  for (const auto& e : gp.edges)
    if (node_labels[e.u] != node_labels[e.v]) ++cut;
  return cut;
}

void write_weighted_edge_list(const GPrime& gp, std::ostream& out) {
  for (const auto& e : gp.edges) out << e.u << ' ' << e.v << " 1\n";
}

void write_weighted_edge_list(const GSecond& gs, std::ostream& out) {
  for (const auto& e : gs.edges) out << e.u << ' ' << e.v << ' ' << e.weight << '\n';
}

}  // namespace edgesign
