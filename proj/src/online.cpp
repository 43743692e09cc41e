#include "edgesign/online.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edgesign/features.hpp"

namespace edgesign {

double TwoExpertRwm::eta() const {
  const double best = std::min(loss_a, loss_b);
  return std::min(0.5, std::sqrt(std::log(2.0) / (1.0 + best)));
}

double TwoExpertRwm::prob_a() const {
  // w_a / (w_a + w_b) = 1 / (1 + exp(-eta (L_b - L_a)))
  const double z = -eta() * (loss_b - loss_a);
  if (z > 0) {
    const double ez = std::exp(-z);
    return ez / (1.0 + ez);
  }
  return 1.0 / (1.0 + std::exp(z));
}

OnlineLearner::OnlineLearner(const SignedDigraph& g) : g_(&g), revealed_(g.edge_count(), false) {}

double OnlineLearner::base_positive(const std::unordered_map<NodeId, TwoExpertRwm>& side,
                                    NodeId v) const {
  const auto it = side.find(v);
  return it == side.end() ? 0.5 : it->second.prob_a();
}

double OnlineLearner::prob_positive(EdgeId e) const {
  const Edge& ed = g_->edge(e);
  const double w_out = top_.prob_a();
  return w_out * base_positive(out_, ed.src) + (1.0 - w_out) * base_positive(in_, ed.dst);
}

OnlineLearner::Forecast OnlineLearner::predict(EdgeId e, std::mt19937_64& rng) {
  if (e >= g_->edge_count()) throw ProtocolError("edge id " + std::to_string(e) + " out of range");
  if (revealed_[e]) throw ProtocolError("edge " + std::to_string(e) + " was already revealed");
  if (pending_ && pending_->edge != e)
    throw ProtocolError("prediction for edge " + std::to_string(pending_->edge) + " is still pending");
  Forecast f;
  f.edge = e;
  f.p_positive = prob_positive(e);
  // One uniform draw realizes the whole cascade: its marginal is p_positive.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  f.prediction = unit(rng) < f.p_positive ? Sign::positive : Sign::negative;
  pending_ = f;
  return f;
}

void OnlineLearner::update(EdgeId e, Sign label) {
  if (!pending_ || pending_->edge != e)
    throw ProtocolError("update for edge " + std::to_string(e) + " without a prediction");
  const Forecast f = *pending_;
  pending_.reset();
  expected_ += f.mistake_if(label);
  realized_ += f.prediction != label;
  ++seen_;
  revealed_[e] = true;

  const Edge& ed = g_->edge(e);
  const bool pos = label == Sign::positive;
  const double out_pos = base_positive(out_, ed.src);
  const double in_pos = base_positive(in_, ed.dst);
  top_.update(pos ? 1.0 - out_pos : out_pos, pos ? 1.0 - in_pos : in_pos);
  const double la = pos ? 0.0 : 1.0;  // constant +1 expert
  out_[ed.src].update(la, 1.0 - la);
  in_[ed.dst].update(la, 1.0 - la);
}

namespace {

nlohmann::json side_to_json(const std::unordered_map<NodeId, TwoExpertRwm>& side) {
  std::vector<NodeId> keys;
  keys.reserve(side.size());
  for (const auto& kv : side) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  nlohmann::json arr = nlohmann::json::array();
  for (NodeId k : keys) arr.push_back({k, side.at(k).loss_a, side.at(k).loss_b});
  return arr;
}

void side_from_json(const nlohmann::json& arr, std::size_t n,
                    std::unordered_map<NodeId, TwoExpertRwm>& side) {
  for (const auto& row : arr) {
    const auto v = row.at(0).get<NodeId>();
    if (v >= n) throw DataError("online state names node " + std::to_string(v) + " out of range");
    side[v] = TwoExpertRwm{row.at(1).get<double>(), row.at(2).get<double>()};
  }
}

}  // namespace

nlohmann::json OnlineLearner::to_json() const {
  std::vector<EdgeId> revealed;
  for (EdgeId e = 0; e < revealed_.size(); ++e)
    if (revealed_[e]) revealed.push_back(e);
  nlohmann::json j{{"format", "edgesign-online-state"},
                   {"version", 1},
                   {"out", side_to_json(out_)},
                   {"in", side_to_json(in_)},
                   {"top", {top_.loss_a, top_.loss_b}},
                   {"revealed", revealed},
                   {"expected_mistakes", expected_},
                   {"realized_mistakes", realized_},
                   {"edges_seen", seen_}};
  if (pending_)
    j["pending"] = {{"edge", pending_->edge},
                    {"p_positive", pending_->p_positive},
                    {"prediction", value(pending_->prediction)}};
  return j;
}

OnlineLearner OnlineLearner::from_json(const SignedDigraph& g, const nlohmann::json& j) {
  try {
    OnlineLearner l(g);
    side_from_json(j.at("out"), g.node_count(), l.out_);
    side_from_json(j.at("in"), g.node_count(), l.in_);
    l.top_ = TwoExpertRwm{j.at("top").at(0).get<double>(), j.at("top").at(1).get<double>()};
    for (EdgeId e : j.at("revealed").get<std::vector<EdgeId>>()) {
      if (e >= g.edge_count()) throw DataError("online state reveals an unknown edge");
      l.revealed_[e] = true;
    }
    l.expected_ = j.at("expected_mistakes").get<double>();
    l.realized_ = j.at("realized_mistakes").get<std::uint64_t>();
    l.seen_ = j.at("edges_seen").get<std::uint64_t>();
    if (j.contains("pending")) {
      const auto& p = j.at("pending");
      l.pending_ = Forecast{p.at("edge").get<EdgeId>(), p.at("p_positive").get<double>(),
                            p.at("prediction").get<int>() > 0 ? Sign::positive : Sign::negative};
    }
    return l;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed online state: ") + ex.what());
  }
}

// ---------------------------------------------------------------------------

double online_bound(std::size_t psi_g, std::size_t node_count, double c) {
  const double psi = static_cast<double>(psi_g);
  const double n = static_cast<double>(node_count);
  return psi + c * (std::sqrt(n * psi) + n);
}

nlohmann::json to_json(const OnlineReport& r) {
  nlohmann::json j{{"rounds", r.rounds},
                   {"realized_mistakes", r.realized_mistakes},
                   {"expected_mistakes", r.expected_mistakes},
                   {"psi_g", r.psi_g},
                   {"bound", r.bound},
                   {"seed", r.seed},
                   {"order", r.order}};
  if (r.tail_rounds > 0) {
    j["tail_rounds"] = r.tail_rounds;
    j["tail_realized_mistakes"] = r.tail_realized;
    j["tail_expected_mistakes"] = r.tail_expected;
  }
  return j;
}

std::vector<EdgeId> random_order(std::size_t edge_count, std::uint64_t seed) {
  std::vector<EdgeId> order(edge_count);
  std::iota(order.begin(), order.end(), EdgeId{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

OnlineReport run_online(const SignedDigraph& g, std::span<const EdgeId> order, std::uint64_t seed,
                        const std::string& order_name) {
  if (order.size() != g.edge_count())
    throw ProtocolError("order has " + std::to_string(order.size()) + " entries for " +
                        std::to_string(g.edge_count()) + " edges");
  OnlineLearner learner(g);
  std::mt19937_64 rng(seed);
  for (EdgeId e : order) {
    learner.predict(e, rng);
    learner.update(e, g.label(e));
  }
  OnlineReport r;
  r.rounds = learner.edges_seen();
  r.realized_mistakes = learner.realized_mistakes();
  r.expected_mistakes = learner.expected_mistakes();
  r.psi_g = psi_g(g).psi_g;
  r.bound = online_bound(r.psi_g, g.node_count());
  r.seed = seed;
  r.order = order_name;
  return r;
}

}  // namespace edgesign
