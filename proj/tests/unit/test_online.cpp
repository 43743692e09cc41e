#include <cmath>

#include "doctest.h"
#include "edgesign/features.hpp"
#include "edgesign/online.hpp"
#include "unit/helpers.hpp"

using namespace edgesign;
using testing::four_edge_graph;

namespace {

// m_{r,c} from the recurrence m_{r,c} = (m_{r-1,c} + m_{r-1,c-1}) / 2, m_{0,0} = 1.
std::vector<std::vector<double>> m_table(std::size_t rmax, std::size_t cmax) {
  std::vector<std::vector<double>> m(rmax + 1, std::vector<double>(cmax + 1, 0.0));
  m[0][0] = 1.0;
  for (std::size_t r = 1; r <= rmax; ++r)
    for (std::size_t c = 1; c <= cmax; ++c) m[r][c] = 0.5 * (m[r - 1][c] + m[r - 1][c - 1]);
  return m;
}

SignedDigraph star(std::size_t leaves) {
  std::vector<Edge> edges;
  for (NodeId k = 1; k <= leaves; ++k) edges.push_back({0, k});
  return SignedDigraph(leaves + 1, edges, std::vector<Sign>(leaves, Sign::positive));
}

}  // namespace

TEST_CASE("two-expert RWM") {
  TwoExpertRwm r;
  CHECK(r.prob_a() == 0.5);
  CHECK(r.eta() == 0.5);
  r.update(0, 1);
  CHECK(r.prob_a() == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))));
  // Matching expert's weight ratio never falls.
  double last = r.prob_a();
  for (int t = 0; t < 50; ++t) {
    r.update(0, 1);
    CHECK(r.prob_a() >= last);
    last = r.prob_a();
  }
  TwoExpertRwm s{10, 20};
  CHECK(s.eta() == doctest::Approx(std::sqrt(std::log(2.0) / 11)));
}

TEST_CASE("all-positive stream costs a constant number of mistakes") {
  TwoExpertRwm r;
  double expected = 0;
  for (int t = 0; t < 10000; ++t) {
    expected += 1.0 - r.prob_a();
    r.update(0, 1);
  }
  CHECK(expected <= 2.0);
}

TEST_CASE("weights stay finite over a million updates") {
  TwoExpertRwm r;
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.3);
  for (int t = 0; t < 1000000; ++t) {
    const bool a = coin(rng);
    r.update(a ? 0.0 : 1.0, a ? 1.0 : 0.0);
  }
  CHECK(std::isfinite(r.log_weight_a()));
  CHECK(std::isfinite(r.log_weight_b()));
  CHECK(r.prob_a() >= 0.0);
  CHECK(r.prob_a() <= 1.0);
  CHECK(r.prob_a() < 1e-6);  // expert b leads by about 4e5
}

TEST_CASE("fresh learner predicts each sign with probability one half") {
  const auto g = four_edge_graph();
  OnlineLearner l(g);
  std::mt19937_64 rng(3);
  for (EdgeId e = 0; e < 4; ++e) CHECK(l.prob_positive(e) == 0.5);
  const auto f = l.predict(0, rng);
  CHECK(f.mistake_if(Sign::positive) == 0.5);
  CHECK(f.mistake_if(Sign::negative) == 0.5);
  CHECK(l.instances_allocated() == 0);
  l.update(0, Sign::positive);
  CHECK(l.instances_allocated() == 2);
}

TEST_CASE("star graph matches a hand-simulated cascade") {
  // Node 0 emits only +1 edges to fresh targets. The in-instances stay fresh,
  // so P(+) = pi * w(+)/(w(+)+w(-)) + (1 - pi) / 2 with pi from the top combiner.
  const std::size_t T = 40;
  const auto g = star(T);
  OnlineLearner l(g);
  std::mt19937_64 rng(4);
  double out_plus = 0, out_minus = 0;  // base losses at node 0
  double top_out = 0, top_in = 0;       // meta losses
  double last_mistake = 1.0;
  for (EdgeId e = 0; e < T; ++e) {
    const auto eta = [](double a, double b) { return std::min(0.5, std::sqrt(std::log(2.0) / (1 + std::min(a, b)))); };
    const double eb = eta(out_plus, out_minus);
    const double wp = std::exp(-eb * out_plus), wm = std::exp(-eb * out_minus);
    const double base = wp / (wp + wm);
    const double et = eta(top_out, top_in);
    const double to = std::exp(-et * top_out), ti = std::exp(-et * top_in);
    const double pi = to / (to + ti);
    const double expected = pi * base + (1 - pi) * 0.5;
    const auto f = l.predict(e, rng);
    CHECK(f.p_positive == doctest::Approx(expected).epsilon(1e-12));
    const double mistake = f.mistake_if(Sign::positive);
    CHECK(mistake <= 0.5);
    CHECK(mistake <= last_mistake);
    last_mistake = mistake;
    l.update(e, Sign::positive);
    out_minus += 1;
    top_out += 1 - base;
    top_in += 0.5;
  }
}

TEST_CASE("expected tally is the sum of per-round probabilities") {
  std::mt19937_64 rng(5);
  const auto g = testing::random_graph(30, 300, rng);
  OnlineLearner l(g);
  double sum = 0;
  std::uint64_t realized = 0;
  for (EdgeId e : random_order(g.edge_count(), 6)) {
    const double p = l.prob_positive(e);
    const auto f = l.predict(e, rng);
    CHECK(f.p_positive == p);
    sum += g.label(e) == Sign::positive ? 1 - p : p;
    realized += f.prediction != g.label(e);
    l.update(e, g.label(e));
  }
  CHECK(l.expected_mistakes() == doctest::Approx(sum).epsilon(1e-12));
  CHECK(l.realized_mistakes() == realized);
  CHECK(l.edges_seen() == g.edge_count());
}

TEST_CASE("protocol errors") {
  const auto g = four_edge_graph();
  OnlineLearner l(g);
  std::mt19937_64 rng(7);
  CHECK_THROWS_AS(l.update(0, Sign::positive), ProtocolError);
  l.predict(0, rng);
  CHECK_THROWS_AS(l.predict(1, rng), ProtocolError);
  CHECK_THROWS_AS(l.update(1, Sign::positive), ProtocolError);
  l.update(0, Sign::positive);
  CHECK_THROWS_AS(l.predict(0, rng), ProtocolError);
  CHECK_THROWS_AS(l.predict(9, rng), ProtocolError);

  const std::vector<EdgeId> short_order{0, 1};
  CHECK_THROWS_AS(run_online(g, short_order, 1), ProtocolError);
  const std::vector<EdgeId> repeat{0, 1, 1, 2};
  CHECK_THROWS_AS(run_online(g, repeat, 1), ProtocolError);
}

TEST_CASE("learner state round-trips through JSON") {
  std::mt19937_64 gen(8);
  const auto g = testing::random_graph(20, 120, gen);
  const auto order = random_order(g.edge_count(), 9);
  OnlineLearner a(g);
  std::mt19937_64 rng(10);
  for (std::size_t k = 0; k < 60; ++k) {
    a.predict(order[k], rng);
    a.update(order[k], g.label(order[k]));
  }
  auto b = OnlineLearner::from_json(g, nlohmann::json::parse(a.to_json().dump()));
  CHECK(b.to_json() == a.to_json());
  std::mt19937_64 ra = rng, rb = rng;
  for (std::size_t k = 60; k < order.size(); ++k) {
    const auto fa = a.predict(order[k], ra);
    const auto fb = b.predict(order[k], rb);
    CHECK(fa.p_positive == fb.p_positive);
    CHECK(fa.prediction == fb.prediction);
    a.update(order[k], g.label(order[k]));
    b.update(order[k], g.label(order[k]));
  }
  CHECK(a.expected_mistakes() == b.expected_mistakes());
  CHECK(a.realized_mistakes() == b.realized_mistakes());
}

TEST_CASE("fixed order and seed reproduce the run") {
  const auto g = four_edge_graph();
  const std::vector<EdgeId> order{3, 1, 0, 2};
  const auto a = run_online(g, order, 12), b = run_online(g, order, 12);
  CHECK(a.realized_mistakes == b.realized_mistakes);
  CHECK(a.expected_mistakes == b.expected_mistakes);
  CHECK(a.psi_g == 1);
  CHECK(a.bound == doctest::Approx(online_bound(1, 3)));
}

TEST_CASE("negatives-first and random orders both respect the bound") {
  std::mt19937_64 rng(13);
  const auto g = testing::random_graph(25, 200, rng);
  std::vector<EdgeId> adversarial;
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (g.label(e) == Sign::negative) adversarial.push_back(e);
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (g.label(e) == Sign::positive) adversarial.push_back(e);
  const auto worst = run_online(g, adversarial, 14);
  const auto random = run_online(g, random_order(g.edge_count(), 15), 14);
  CHECK(worst.expected_mistakes != random.expected_mistakes);
  CHECK(worst.expected_mistakes <= worst.bound);
  CHECK(random.expected_mistakes <= random.bound);
}

TEST_CASE("adversary sequences") {
  std::mt19937_64 rng(16);
  const auto g = testing::random_graph(40, 301, rng);
  CHECK_THROWS_AS(adversary_generate(g, 0, 1), ArgumentError);
  CHECK_THROWS_AS(adversary_generate(g, 151, 1), ArgumentError);
  CHECK_NOTHROW(adversary_generate(g, 150, 1));
  for (std::size_t k : {1u, 5u, 40u, 150u}) {
    const auto seq = adversary_generate(g, k, 100 + k, true);
    const auto labels = seq.labeling();
    std::size_t neg = 0;
    for (Sign s : labels) neg += s == Sign::negative;
    CHECK(neg == k);
    CHECK(psi_g(g.relabeled(labels)).psi_g <= k);
    std::size_t forced_neg = 0;
    for (const auto& r : seq.forced) {
      forced_neg += r.label == Sign::negative;
      CHECK(labels[r.edge] == r.label);
    }
    CHECK(forced_neg == k);
    CHECK(seq.forced.back().label == Sign::negative);
    CHECK(seq.forced.size() + seq.tail.size() == g.edge_count());
    for (const auto& r : seq.tail) CHECK(r.label == Sign::positive);
  }
  const auto a = adversary_generate(g, 10, 5), b = adversary_generate(g, 10, 5);
  REQUIRE(a.forced.size() == b.forced.size());
  for (std::size_t k = 0; k < a.forced.size(); ++k) CHECK(a.forced[k].edge == b.forced[k].edge);
  CHECK(a.tail.empty());
}

TEST_CASE("adversary run keeps the tail separate") {
  std::mt19937_64 rng(17);
  const auto g = testing::random_graph(40, 300, rng);
  const auto seq = adversary_generate(g, 10, 18, true);
  const auto r = run_adversary(g, seq, 19);
  CHECK(r.rounds == seq.forced.size());
  CHECK(r.tail_rounds == seq.tail.size());
  CHECK(r.expected_mistakes >= 0.0);
  CHECK(r.psi_g <= 10);
}

TEST_CASE("m_{r,c} closed form") {
  CHECK(adversary_m(2, 2) == doctest::Approx(0.25));
  CHECK(adversary_m(3, 2) == doctest::Approx(2.0 / 8));
  CHECK(adversary_m(3, 1) == doctest::Approx(1.0 / 8));
  CHECK(adversary_m(2, 3) == 0.0);
  const auto m = m_table(120, 50);
  for (std::size_t r = 1; r <= 120; ++r)
    for (std::size_t c = 1; c <= 50; ++c) CHECK(std::abs(adversary_m(r, c) - m[r][c]) <= 1e-12);
}

TEST_CASE("expected forced mistakes tend to K") {
  CHECK(adversary_expected_mistakes(1, 200) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k : {1u, 2u, 10u, 50u}) CHECK(std::abs(adversary_expected_mistakes(k, k + 400) - k) <= 1e-9);
  const auto m = m_table(60, 20);
  double sum = 0;
  for (std::size_t c = 1; c <= 20; ++c)
    for (std::size_t r = c; r <= 60; ++r) sum += m[r][c];
  CHECK(adversary_expected_mistakes(20, 60) == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("report JSON") {
  OnlineReport r;
  r.rounds = 4;
  r.order = "random";
  auto j = to_json(r);
  CHECK(j["order"] == "random");
  CHECK_FALSE(j.contains("tail_rounds"));
  r.tail_rounds = 2;
  CHECK(to_json(r).contains("tail_rounds"));
}
