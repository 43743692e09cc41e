#include <cmath>

#include "doctest.h"
#include "edgesign/features.hpp"
#include "unit/helpers.hpp"

using namespace edgesign;
using testing::four_edge_graph;

namespace {

// Brute-force grid minimum of the labeled quadratic loss.
double grid_min(const SignedDigraph& g, double step) {
  const std::size_t n = g.node_count();
  const int ticks = static_cast<int>(std::lround(1.0 / step));
  std::vector<int> idx(2 * n, 0);
  std::vector<double> p(n), q(n);
  double best = 1e300;
  while (true) {
    for (std::size_t k = 0; k < n; ++k) {
      p[k] = idx[k] * step;
      q[k] = idx[n + k] * step;
    }
    best = std::min(best, labeled_quadratic_loss(g, p, q));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] > ticks) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return best;
}

}  // namespace

TEST_CASE("troll and trust on the 4-edge graph") {
  const auto t = troll_trust(four_edge_graph());
  CHECK(t.tr[0] == doctest::Approx(0.5));
  CHECK(t.tr[2] == doctest::Approx(1.0));
  CHECK(t.un[1] == doctest::Approx(0.5));
  CHECK(t.un[0] == 0.5);  // a has no incoming edges
  CHECK(t.un_present[0] == 0);
  CHECK(t.tr_present[0] == 1);
}

TEST_CASE("all-positive graph has zero trollness where defined") {
  std::mt19937_64 rng(1);
  const auto g0 = testing::random_graph(20, 60, rng);
  const auto g = g0.relabeled(std::vector<Sign>(g0.edge_count(), Sign::positive));
  const auto t = troll_trust(g);
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (g.out_degree(v) > 0) CHECK(t.tr[v] == 0.0);
  CHECK(psi_g(g).psi_g == 0);
}

TEST_CASE("fallback outside [0,1] is rejected") {
  CHECK_THROWS_AS(troll_trust(four_edge_graph(), 1.5), ArgumentError);
}

TEST_CASE("psi counts on the 4-edge graph") {
  const auto c = psi_g(four_edge_graph());
  CHECK(c.psi_out == 1);
  CHECK(c.psi_in == 2);
  CHECK(c.psi_g == 1);
}

TEST_CASE("psi_g is invariant under a global sign flip") {
  std::mt19937_64 rng(2);
  const auto g = testing::random_graph(15, 70, rng);
  std::vector<Sign> flipped;
  for (Sign s : g.labels()) flipped.push_back(flip(s));
  const auto a = psi_g(g), b = psi_g(g.relabeled(flipped));
  CHECK(a.psi_in == b.psi_in);
  CHECK(a.psi_out == b.psi_out);
}

TEST_CASE("psi2 of small graphs") {
  const SignedDigraph one(2, {{0, 1}}, {Sign::positive});
  CHECK(psi2(one) <= 1e-12);

  // p_a + q_b = 2 and p_a + q_c = 0 conflict: min 1/4 [(1-p)^2 + p^2] = 1/8.
  const SignedDigraph fork(3, {{0, 1}, {0, 2}}, {Sign::positive, Sign::negative});
  CHECK(psi2(fork) == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("psi2 matches a grid oracle on the 4-edge graph") {
  const auto g = four_edge_graph();
  const double solved = psi2(g);
  // Grid minimum is an upper bound within the grid's resolution.
  const double grid = grid_min(g, 0.05);
  CHECK(solved <= grid + 1e-12);
  CHECK(grid - solved <= 0.01);
}

TEST_CASE("psi2 is bounded by explicit points and nonincreasing") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto g = testing::random_graph(12, 40, rng);
    BoxLsOptions opt;
    opt.track_objective = true;
    const auto r = psi2_solve(g, opt);
    std::vector<double> half(g.node_count(), 0.5);
    CHECK(r.value <= labeled_quadratic_loss(g, half, half) + 1e-12);
    CHECK(labeled_quadratic_loss(g, half, half) == doctest::Approx(g.edge_count() / 4.0));
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k)
      CHECK(r.objective_trace[k] <= r.objective_trace[k - 1] + 1e-12);
    CHECK(r.projected_gradient <= opt.tol);

    // Majority construction: p_i = 1 if most out-edges are positive, q = 1/2.
    const auto s = degree_stats(g);
    std::vector<double> p(g.node_count()), q(g.node_count(), 0.5);
    for (NodeId v = 0; v < g.node_count(); ++v) p[v] = s.d_out_plus[v] >= s.d_out_minus[v] ? 1.0 : 0.0;
    CHECK(r.value <= labeled_quadratic_loss(g, p, q) + 1e-12);
  }
}

TEST_CASE("psi2 reports non-convergence with the best value") {
  std::mt19937_64 rng(6);
  const auto g = testing::random_graph(30, 150, rng);
  BoxLsOptions opt;
  opt.max_iter = 1;
  opt.tol = 1e-15;
  try {
    psi2_solve(g, opt);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& ex) {
    CHECK(ex.best_value() >= 0.0);
    CHECK(ex.exit_code() == 4);
  }
}

TEST_CASE("regularity report fields are consistent") {
  std::mt19937_64 rng(8);
  const auto g = testing::random_graph(20, 90, rng);
  const auto r = regularity_report(g);
  CHECK(r.psi_g == std::min(r.psi_in, r.psi_out));
  CHECK(r.psi_g <= g.edge_count() / 2);
  CHECK(r.psi2 >= 0.0);
  CHECK(r.psi_g_rate == doctest::Approx(static_cast<double>(r.psi_g) / g.edge_count()));
  const auto j = to_json(r);
  CHECK(j.size() == 6);
}
