#include "edgesign/graph.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace edgesign {

namespace {

void build_csr(std::size_t n, std::span<const Edge> edges, bool outgoing,
               std::vector<std::size_t>& offsets, std::vector<EdgeId>& perm) {
  offsets.assign(n + 1, 0);
  for (const Edge& e : edges) ++offsets[(outgoing ? e.src : e.dst) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  perm.resize(edges.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (EdgeId id = 0; id < edges.size(); ++id) {
    const NodeId key = outgoing ? edges[id].src : edges[id].dst;
    perm[cursor[key]++] = id;
  }
}

std::uint64_t pair_key(NodeId a, NodeId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

SignedDigraph::SignedDigraph(std::size_t node_count, std::vector<Edge> edges,
                             std::vector<Sign> labels, std::vector<std::string> node_names)
    : node_count_(node_count),
      edges_(std::move(edges)),
      labels_(std::move(labels)),
      names_(std::move(node_names)) {
  if (labels_.size() != edges_.size())
    throw DataError("label count " + std::to_string(labels_.size()) + " != edge count " +
                    std::to_string(edges_.size()));
  if (!names_.empty() && names_.size() != node_count_)
    throw DataError("node name count does not match node count");
  if (edges_.size() > std::numeric_limits<EdgeId>::max() ||
      node_count_ > std::numeric_limits<NodeId>::max())
    throw DataError("graph too large for 32-bit ids");
  for (Sign s : labels_)
    if (s != Sign::positive && s != Sign::negative) throw DataError("label is not +1/-1");
  for (const Edge& e : edges_) {
    if (e.src >= node_count_ || e.dst >= node_count_)
      throw DataError("edge endpoint out of range");
    if (e.src == e.dst) throw DataError("self-loop on node " + std::to_string(e.src));
  }
  build_csr(node_count_, edges_, true, out_offsets_, out_perm_);
  build_csr(node_count_, edges_, false, in_offsets_, in_perm_);

  // Duplicate check: sort each out-range by destination and look at neighbours.
  std::vector<NodeId> dsts;
  for (NodeId i = 0; i < node_count_; ++i) {
    auto out = out_edges(i);
    if (out.size() < 2) continue;
    dsts.clear();
    for (EdgeId e : out) dsts.push_back(edges_[e].dst);
    std::sort(dsts.begin(), dsts.end());
    if (std::adjacent_find(dsts.begin(), dsts.end()) != dsts.end())
      throw DataError("duplicate edge out of node " + std::to_string(i));
  }
}

std::string SignedDigraph::node_name(NodeId i) const {
  return names_.empty() ? std::to_string(i) : names_[i];
}

std::optional<EdgeId> SignedDigraph::find_edge(NodeId src, NodeId dst) const {
  if (src >= node_count_) return std::nullopt;
  for (EdgeId e : out_edges(src))
    if (edges_[e].dst == dst) return e;
  return std::nullopt;
}

SignedDigraph SignedDigraph::relabeled(std::vector<Sign> labels) const {
  SignedDigraph g = *this;
  if (labels.size() != edges_.size()) throw ArgumentError("relabel: label count mismatch");
  g.labels_ = std::move(labels);
  return g;
}

std::size_t SignedDigraph::memory_bytes() const noexcept {
  return edges_.size() * sizeof(Edge) + labels_.size() * sizeof(Sign) +
         (out_offsets_.size() + in_offsets_.size()) * sizeof(std::size_t) +
         (out_perm_.size() + in_perm_.size()) * sizeof(EdgeId);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<Sign> parse_sign(std::string_view tok) {
  if (tok == "1" || tok == "+1") return Sign::positive;
  if (tok == "-1") return Sign::negative;
  return std::nullopt;
}

}  // namespace

LoadResult load_edge_list(std::istream& in) {
  struct Record {
    NodeId src, dst;
    Sign sign;
    bool conflicted;
  };
  LoadResult result;
  std::vector<std::string> names;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<Record> records;
  std::unordered_map<std::uint64_t, std::size_t> seen;

  auto intern = [&](std::string_view tok) {
    auto [it, inserted] = ids.try_emplace(std::string(tok), static_cast<NodeId>(names.size()));
    if (inserted) names.emplace_back(tok);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    const auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    if (view[first] == '#' || view[first] == '%') continue;
    const auto fields = split_fields(view);
    if (fields.size() < 3) throw ParseError("expected `src dst sign`", lineno);
    const auto sign = parse_sign(fields[2]);
    if (!sign) throw ParseError("bad sign token '" + std::string(fields[2]) + "'", lineno);
    ++result.records;
    const NodeId a = intern(fields[0]);
    const NodeId b = intern(fields[1]);
    if (a == b) {
      ++result.self_loops;
      continue;
    }
    auto [it, inserted] = seen.try_emplace(pair_key(a, b), records.size());
    if (inserted) {
      records.push_back({a, b, *sign, false});
      continue;
    }
    Record& prev = records[it->second];
    if (prev.conflicted) continue;
    if (prev.sign == *sign) {
      ++result.merged_duplicates;
    } else {
      prev.conflicted = true;
      ++result.conflicts;
    }
  }

  std::vector<Edge> edges;
  std::vector<Sign> labels;
  edges.reserve(records.size());
  labels.reserve(records.size());
  for (const Record& r : records) {
    if (r.conflicted) continue;
    edges.push_back({r.src, r.dst});
    labels.push_back(r.sign);
  }
  const std::size_t n = names.size();
  result.graph = SignedDigraph(n, std::move(edges), std::move(labels), std::move(names));
  return result;
}

LoadResult load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load_edge_list(in);
}

void write_edge_list(const SignedDigraph& g, std::ostream& out) {
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    out << g.node_name(ed.src) << '\t' << g.node_name(ed.dst) << '\t'
        << (g.label(e) == Sign::positive ? "1" : "-1") << '\n';
  }
}

nlohmann::json graph_to_json(const SignedDigraph& g) {
  nlohmann::json j;
  j["format"] = "edgesign-graph";
  j["version"] = 1;
  j["node_count"] = g.node_count();
  std::vector<NodeId> src, dst;
  std::vector<int> sign;
  src.reserve(g.edge_count());
  dst.reserve(g.edge_count());
  sign.reserve(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    src.push_back(g.edge(e).src);
    dst.push_back(g.edge(e).dst);
    sign.push_back(value(g.label(e)));
  }
  j["src"] = std::move(src);
  j["dst"] = std::move(dst);
  j["sign"] = std::move(sign);
  if (g.has_node_names()) {
    std::vector<std::string> names;
    names.reserve(g.node_count());
    for (NodeId i = 0; i < g.node_count(); ++i) names.push_back(g.node_name(i));
    j["ids"] = std::move(names);
  }
  return j;
}

SignedDigraph graph_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "edgesign-graph") throw DataError("not an edgesign graph container");
    if (j.at("version").get<int>() != 1) throw DataError("unsupported graph container version");
    const auto n = j.at("node_count").get<std::size_t>();
    const auto src = j.at("src").get<std::vector<NodeId>>();
    const auto dst = j.at("dst").get<std::vector<NodeId>>();
    const auto sign = j.at("sign").get<std::vector<int>>();
    if (src.size() != dst.size() || src.size() != sign.size())
      throw DataError("graph container arrays differ in length");
    std::vector<Edge> edges(src.size());
    std::vector<Sign> labels(src.size());
    for (std::size_t e = 0; e < src.size(); ++e) {
      edges[e] = {src[e], dst[e]};
      if (sign[e] != 1 && sign[e] != -1) throw DataError("graph container label is not +1/-1");
      labels[e] = sign[e] > 0 ? Sign::positive : Sign::negative;
    }
    std::vector<std::string> names;
    if (j.contains("ids")) names = j.at("ids").get<std::vector<std::string>>();
    return SignedDigraph(n, std::move(edges), std::move(labels), std::move(names));
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed graph container: ") + ex.what());
  }
}

SignedDigraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  const bool by_name = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  in >> std::ws;
  if (by_name || in.peek() == '{') {
    try {
      return graph_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& ex) {
      throw DataError(path + ": " + ex.what());
    }
  }
  return load_edge_list(in).graph;
}

void write_graph_json_file(const SignedDigraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << graph_to_json(g).dump() << '\n';
}

// ---------------------------------------------------------------------------

std::size_t EdgeSplit::training_count() const {
  return static_cast<std::size_t>(
      std::count_if(training_mask.begin(), training_mask.end(), [](auto b) { return b != 0; }));
}

std::vector<EdgeId> EdgeSplit::training_edges() const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < training_mask.size(); ++e)
    if (training_mask[e]) out.push_back(e);
  return out;
}

std::vector<EdgeId> EdgeSplit::test_edges() const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < training_mask.size(); ++e)
    if (!training_mask[e]) out.push_back(e);
  return out;
}

EdgeSplit sample_split(const SignedDigraph& g, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ArgumentError("training fraction must lie in (0,1)");
  if (g.edge_count() == 0) throw ArgumentError("cannot split an empty edge set");
  const std::size_t m = g.edge_count();
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(m)));

  std::vector<EdgeId> idx(m);
  std::iota(idx.begin(), idx.end(), EdgeId{0});
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < k; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, m - 1);
    std::swap(idx[t], idx[pick(rng)]);
  }
  EdgeSplit s;
  s.training_mask.assign(m, 0);
  for (std::size_t t = 0; t < k; ++t) s.training_mask[idx[t]] = 1;
  s.fraction = fraction;
  s.seed = seed;
  return s;
}

nlohmann::json split_to_json(const EdgeSplit& s) {
  return {{"format", "edgesign-split"},
          {"version", 1},
          {"fraction", s.fraction},
          {"seed", s.seed},
          {"edge_count", s.training_mask.size()},
          {"training", s.training_edges()}};
}

EdgeSplit split_from_json(const nlohmann::json& j, std::size_t edge_count) {
  try {
    if (j.value("format", "") != "edgesign-split") throw DataError("not an edgesign split");
    if (j.at("edge_count").get<std::size_t>() != edge_count)
      throw DataError("split was drawn for a graph with a different edge count");
    EdgeSplit s;
    s.fraction = j.at("fraction").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.training_mask.assign(edge_count, 0);
    for (auto e : j.at("training").get<std::vector<EdgeId>>()) {
      if (e >= edge_count) throw DataError("split references edge out of range");
      s.training_mask[e] = 1;
    }
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed split: ") + ex.what());
  }
}

namespace {

NodeStats stats_impl(const SignedDigraph& g, const std::uint8_t* mask) {
  const std::size_t n = g.node_count();
  NodeStats s;
  for (auto* v : {&s.d_in, &s.d_out, &s.d_in_plus, &s.d_in_minus, &s.d_out_plus, &s.d_out_minus})
    v->assign(n, 0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (mask && !mask[e]) continue;
    const Edge& ed = g.edge(e);
    const bool pos = g.label(e) == Sign::positive;
    ++s.d_out[ed.src];
    ++s.d_in[ed.dst];
    ++(pos ? s.d_out_plus : s.d_out_minus)[ed.src];
    ++(pos ? s.d_in_plus : s.d_in_minus)[ed.dst];
  }
  return s;
}

}  // namespace

NodeStats degree_stats(const SignedDigraph& g) { return stats_impl(g, nullptr); }

NodeStats degree_stats(const SignedDigraph& g, const EdgeMask& mask) {
  if (mask.size() != g.edge_count())
    throw ArgumentError("edge mask length " + std::to_string(mask.size()) +
                        " != edge count " + std::to_string(g.edge_count()));
  return stats_impl(g, mask.data());
}

}  // namespace edgesign
