#include <cmath>
#include <set>

#include "doctest.h"
#include "edgesign/genmodel.hpp"
#include "unit/helpers.hpp"

using namespace edgesign;

namespace {

GenParams constant_params(std::size_t n, double p, double q) {
  GenParams gp;
  gp.p.assign(n, p);
  gp.q.assign(n, q);
  return gp;
}

}  // namespace

TEST_CASE("prior parsing") {
  CHECK(std::holds_alternative<UniformPrior>(parse_prior("uniform")));
  const auto b = std::get<BetaPrior>(parse_prior("beta:2,3,4,5"));
  CHECK(b.a_p == 2);
  CHECK(b.b_q == 5);
  const auto t = std::get<TwoPointPrior>(parse_prior("twopoint:0.1,0.9,0.3"));
  CHECK(t.p.lo == 0.1);
  CHECK(t.q.hi == 0.9);
  CHECK(t.q.weight == 0.3);
  const auto t6 = std::get<TwoPointPrior>(parse_prior("twopoint:0.1,0.9,0.5,0.5,0.5,1"));
  CHECK(t6.q.lo == 0.5);
  CHECK(t6.q.weight == 1.0);
  CHECK_THROWS_AS(parse_prior("beta:0,1,1,1"), ArgumentError);
  CHECK_THROWS_AS(parse_prior("twopoint:0.9,0.1,0.5"), ArgumentError);
  CHECK_THROWS_AS(parse_prior("twopoint:0,1,1.5"), ArgumentError);
  CHECK_THROWS_AS(parse_prior("gauss"), ArgumentError);
  CHECK(parse_prior(describe(parse_prior("twopoint:0.1,0.9,0.3"))).index() == 2);
  CHECK(describe(parse_prior("twopoint:0.1,0.9,0.3")) == "twopoint:0.10000000000000001,0.90000000000000002,0.29999999999999999");
  CHECK(describe(parse_prior(describe(t6))) == describe(t6));
}

TEST_CASE("uniform prior mean lies in the Monte-Carlo band") {
  const std::size_t n = 20000;
  const auto gp = sample_params(n, UniformPrior{}, 17);
  double mean = 0;
  for (double v : gp.p) mean += v;
  mean /= n;
  const double band = 3.0 / std::sqrt(12.0 * n);
  CHECK(std::abs(mean - 0.5) <= band);
  for (double v : gp.q) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("two-point prior hits only its support") {
  const auto gp = sample_params(500, parse_prior("twopoint:0,1,0.5"), 3);
  for (double v : gp.p) CHECK((v == 0.0 || v == 1.0));
  CHECK(sample_params(0, UniformPrior{}, 1).p.empty());
  CHECK(sample_params(50, BetaPrior{2, 2, 2, 2}, 9).p == sample_params(50, BetaPrior{2, 2, 2, 2}, 9).p);
}

TEST_CASE("degenerate label probabilities") {
  std::mt19937_64 rng(1);
  const auto topo = testing::random_graph(30, 200, rng);
  for (Sign s : sample_labels(topo, constant_params(30, 1, 1), 4)) CHECK(s == Sign::positive);
  for (Sign s : sample_labels(topo, constant_params(30, 0, 0), 4)) CHECK(s == Sign::negative);
}

TEST_CASE("half probabilities give a balanced labeling") {
  const std::size_t n = 400;
  const auto edges = generate_topology(n, ConstantOutDegreeTopology{250}, 5);
  const SignedDigraph topo(n, edges, std::vector<Sign>(edges.size(), Sign::positive));
  REQUIRE(topo.edge_count() == 100000);
  std::size_t pos = 0;
  for (Sign s : sample_labels(topo, constant_params(n, 0.5, 0.5), 8)) pos += s == Sign::positive;
  CHECK(std::abs(pos / 1e5 - 0.5) <= 0.005);
}

TEST_CASE("bayes prediction and its tie rule") {
  GenParams gp = constant_params(2, 0, 0);
  gp.p[0] = 0.9;
  gp.q[1] = 0.3;
  CHECK(bayes_predict(gp, 0, 1) == Sign::positive);
  gp.p[0] = 0.2;
  gp.q[1] = 0.2;
  CHECK(bayes_predict(gp, 0, 1) == Sign::negative);
  gp.p[0] = 0.25;
  gp.q[1] = 0.75;
  CHECK(bayes_predict(gp, 0, 1) == Sign::positive);
}

TEST_CASE("bayes prediction is invariant under sign-preserving reparameterization") {
  const auto gp = sample_params(60, UniformPrior{}, 21);
  GenParams warped = gp;
  // A common affine contraction around 1/2 scales p + q - 1 by a positive factor.
  for (auto* v : {&warped.p, &warped.q})
    for (double& x : *v) x = 0.5 + 0.3 * (x - 0.5);
  for (NodeId i = 0; i < 60; ++i)
    for (NodeId j = 0; j < 60; ++j) CHECK(bayes_predict(gp, i, j) == bayes_predict(warped, i, j));
}

TEST_CASE("edge rates") {
  const SignedDigraph g(2, {{0, 1}}, {Sign::positive});
  GenParams gp = constant_params(2, 0, 0);
  gp.p[0] = 0.4;
  gp.q[1] = 0.8;
  const auto r = edge_rates(g, gp, 0);
  REQUIRE(r.out_rate.has_value());
  CHECK(*r.out_rate == doctest::Approx(0.6));
  CHECK_FALSE(r.in_rate.has_value());

  std::mt19937_64 rng(2);
  const auto h = testing::random_graph(10, 40, rng);
  const auto c = edge_rates(h, constant_params(10, 0.3, 0.3), 1);
  if (c.out_rate) CHECK(*c.out_rate == doctest::Approx(0.3));
  if (c.in_rate) CHECK(*c.in_rate == doctest::Approx(0.3));

  const auto rp = sample_params(10, UniformPrior{}, 7);
  for (NodeId v = 0; v < 10; ++v) {
    const auto rates = edge_rates(h, rp, v);
    if (h.out_degree(v) > 0) {
      double sum = 0;
      for (EdgeId e : h.out_edges(v)) sum += (rp.p[v] + rp.q[h.edge(e).dst]) / 2;
      CHECK(*rates.out_rate == doctest::Approx(sum / h.out_degree(v)));
    }
    if (h.in_degree(v) > 0) {
      double sum = 0;
      for (EdgeId e : h.in_edges(v)) sum += (rp.p[h.edge(e).src] + rp.q[v]) / 2;
      CHECK(*rates.in_rate == doctest::Approx(sum / h.in_degree(v)));
    }
  }
}

TEST_CASE("empirical out-rate converges to the edge rate") {
  std::mt19937_64 rng(3);
  const auto g = testing::random_graph(12, 60, rng);
  const auto gp = sample_params(12, UniformPrior{}, 5);
  NodeId v = 0;
  while (g.out_degree(v) == 0) ++v;
  const int reps = 4000;
  double pos = 0;
  for (int r = 0; r < reps; ++r) {
    const auto labels = sample_labels(g, gp, static_cast<std::uint64_t>(1000 + r));
    for (EdgeId e : g.out_edges(v)) pos += labels[e] == Sign::positive;
  }
  const double trials = static_cast<double>(reps) * g.out_degree(v);
  const double rate = *edge_rates(g, gp, v).out_rate;
  CHECK(std::abs(pos / trials - rate) <= 3.0 * std::sqrt(0.25 / trials));
}

TEST_CASE("bayes beats the feature-free predictors") {
  // Polarized parameters keep |eta - 1/2| >= 0.1 on every edge.
  const std::size_t n = 200;
  const auto syn = synthesize(n, ConstantOutDegreeTopology{60}, parse_prior("twopoint:0.1,0.9,0.5,0.5,0.5,1"), 12);
  const auto& g = syn.graph;
  REQUIRE(g.edge_count() >= 10000);
  std::size_t bayes = 0, plus = 0, minus = 0, coin = 0;
  std::mt19937_64 rng(4);
  std::bernoulli_distribution fair(0.5);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Sign y = g.label(e);
    bayes += bayes_predict(syn.params, g.edge(e).src, g.edge(e).dst) == y;
    plus += y == Sign::positive;
    minus += y == Sign::negative;
    coin += (fair(rng) ? Sign::positive : Sign::negative) == y;
  }
  const double m = static_cast<double>(g.edge_count());
  const double margin = 3.0 * std::sqrt(m * 0.25);
  CHECK(bayes > plus + margin);
  CHECK(bayes > minus + margin);
  CHECK(bayes > coin + margin);
}

TEST_CASE("topologies") {
  const auto er = generate_topology(100, ErdosRenyiTopology{5}, 1);
  CHECK(er.size() == 500);
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& e : er) {
    CHECK(e.src != e.dst);
    CHECK(seen.insert({e.src, e.dst}).second);
  }
  const auto reg = generate_topology(50, RegularTopology{7}, 2);
  const SignedDigraph g(50, reg, std::vector<Sign>(reg.size(), Sign::positive));
  for (NodeId v = 0; v < 50; ++v) {
    CHECK(g.out_degree(v) == 7);
    CHECK(g.in_degree(v) == 7);
  }
  CHECK_THROWS_AS(generate_topology(10, ErdosRenyiTopology{8}, 1), ArgumentError);
  CHECK(std::holds_alternative<RegularTopology>(parse_topology("regular:4")));
  CHECK_THROWS_AS(parse_topology("grid:3"), ArgumentError);
}

TEST_CASE("synthesis is deterministic and params round-trip") {
  const auto a = synthesize(80, ErdosRenyiTopology{4}, UniformPrior{}, 99);
  const auto b = synthesize(80, ErdosRenyiTopology{4}, UniformPrior{}, 99);
  REQUIRE(a.graph.edge_count() == b.graph.edge_count());
  for (EdgeId e = 0; e < a.graph.edge_count(); ++e) {
    CHECK(a.graph.edge(e) == b.graph.edge(e));
    CHECK(a.graph.label(e) == b.graph.label(e));
  }
  const auto back = params_from_json(to_json(a.params));
  CHECK(back.p == a.params.p);
  CHECK(back.q == a.params.q);
  CHECK(back.seed == a.params.seed);
  CHECK(describe(back.prior) == describe(a.params.prior));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}
