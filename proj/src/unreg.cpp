#include <cmath>

#include "edgesign/batch.hpp"

namespace edgesign {

UnregResult unreg_solve(const SignedDigraph& g, const EdgeSplit& split, const UnregOptions& opt) {
  if (split.training_mask.size() != g.edge_count())
    throw ArgumentError("split does not match the graph's edge count");
  const std::size_t n = g.node_count();

  // Any (p, q) in the box admits y = p + q - 1 in [-1, 1], which zeroes every
  // test term. So the minimum is the box least-squares fit of the training
  // edges alone, followed by that choice of y.
  std::vector<Edge> edges;
  std::vector<Sign> labels;
  for (EdgeId e : split.training_edges()) {
    edges.push_back(g.edge(e));
    labels.push_back(g.label(e));
  }
  const SignedDigraph train(n, std::move(edges), std::move(labels));
  BoxLsOptions box;
  box.tol = opt.tol;
  box.max_iter = opt.max_iter;
  Psi2Result fit;
  try {
    fit = psi2_solve(train, box);
  } catch (const ConvergenceError& ex) {
    throw ConvergenceError(std::string("unregularized solve: ") + ex.what(), ex.best_value());
  }

  UnregResult res;
  res.p = std::move(fit.p);
  res.q = std::move(fit.q);
  res.iterations = fit.iterations;
  res.y.assign(g.edge_count(), 0.0);
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    res.y[e] = split.is_training(e) ? static_cast<double>(value(g.label(e)))
                                    : res.p[g.edge(e).src] + res.q[g.edge(e).dst] - 1.0;
  res.objective = f_unreg(g, res.p, res.q, res.y);

  // Projected-gradient norm of the full problem, for the caller.
  FullGradient grad = f_hat_gradient(g, split, res.p, res.q, res.y);
  double pg = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    grad.dp[i] -= static_cast<double>(g.out_degree(i)) * (res.p[i] - 0.5);
    grad.dq[i] -= static_cast<double>(g.in_degree(i)) * (res.q[i] - 0.5);
    pg = std::max(pg, std::abs(res.p[i] - std::clamp(res.p[i] - grad.dp[i], 0.0, 1.0)));
    pg = std::max(pg, std::abs(res.q[i] - std::clamp(res.q[i] - grad.dq[i], 0.0, 1.0)));
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    pg = std::max(pg, std::abs(res.y[e] - std::clamp(res.y[e] - grad.dy[e], -1.0, 1.0)));
  res.projected_gradient = pg;
  return res;
}

}  // namespace edgesign
