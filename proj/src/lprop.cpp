#include <cmath>

#include "edgesign/batch.hpp"

namespace edgesign {

namespace {

inline double pinned(Sign s) { return static_cast<double>(value(s)); }

}  // namespace

LpState lp_run(const SignedDigraph& g, const EdgeSplit& split, const LpOptions& opt) {
  if (split.training_mask.size() != g.edge_count())
    throw ArgumentError("split does not match the graph's edge count");
  const std::size_t n = g.node_count();
  const std::size_t m = g.edge_count();
  LpState st;
  st.p.assign(n, 0.5);
  st.q.assign(n, 0.5);
  st.y.assign(m, 0.0);
  for (EdgeId e = 0; e < m; ++e)
    if (split.is_training(e)) st.y[e] = pinned(g.label(e));
  if (opt.track_objective) st.objective_trace.push_back(f_hat(g, st.p, st.q, st.y));
  if (m == 0) {
    st.objective = 0.0;
    return st;
  }

  std::vector<EdgeId> test = split.test_edges();
  auto& p = st.p;
  auto& q = st.q;
  auto& y = st.y;

  for (std::size_t sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    const double dp = parallel_max(n, opt.threads, [&](std::size_t lo, std::size_t hi) {
      double worst = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const auto out = g.out_edges(static_cast<NodeId>(i));
        if (out.empty()) continue;
        double acc = 0.0;
        for (EdgeId e : out) acc += 1.0 + y[e] - q[g.edge(e).dst];
        const double d = static_cast<double>(out.size());
        const double next = (acc + d) / (3.0 * d);
        worst = std::max(worst, std::abs(next - p[i]));
        p[i] = next;
      }
      return worst;
    });
    const double dq = parallel_max(n, opt.threads, [&](std::size_t lo, std::size_t hi) {
      double worst = 0.0;
      for (std::size_t j = lo; j < hi; ++j) {
        const auto in = g.in_edges(static_cast<NodeId>(j));
        if (in.empty()) continue;
        double acc = 0.0;
        for (EdgeId e : in) acc += 1.0 + y[e] - p[g.edge(e).src];
        const double d = static_cast<double>(in.size());
        const double next = (acc + d) / (3.0 * d);
        worst = std::max(worst, std::abs(next - q[j]));
        q[j] = next;
      }
      return worst;
    });
    const double dy = parallel_max(test.size(), opt.threads, [&](std::size_t lo, std::size_t hi) {
      double worst = 0.0;
      for (std::size_t k = lo; k < hi; ++k) {
        const EdgeId e = test[k];
        const double next = p[g.edge(e).src] + q[g.edge(e).dst] - 1.0;
        worst = std::max(worst, std::abs(next - y[e]));
        y[e] = next;
      }
      return worst;
    });
    st.iterations = sweep;
    st.residual = std::max({dp, dq, dy});
    if (opt.track_objective) st.objective_trace.push_back(f_hat(g, p, q, y));
    if (st.residual <= opt.tol) {
      st.objective = f_hat(g, p, q, y);
      return st;
    }
  }
  st.objective = f_hat(g, p, q, y);
  const std::string msg = "label propagation: residual " + std::to_string(st.residual) +
                          " above tolerance after " + std::to_string(opt.max_sweeps) + " sweeps";
  throw LpNotConverged(msg, std::move(st));
}

Prediction lp_predict(const LpState& state, const SignedDigraph& g, const EdgeSplit& split) {
  std::vector<double> train_scores;
  std::vector<Sign> train_labels;
  Prediction pred;
  pred.method = "lprop";
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (split.is_training(e)) {
      train_scores.push_back(state.p[g.edge(e).src] + state.q[g.edge(e).dst] - 1.0);
      train_labels.push_back(g.label(e));
    } else {
      pred.edges.push_back(e);
      pred.scores.push_back(state.y[e]);
    }
  }
  pred.threshold = train_scores.empty() ? 0.0 : tune_threshold(train_scores, train_labels);
  for (double s : pred.scores) pred.labels.push_back(threshold_sign(s, pred.threshold));
  return pred;
}

}  // namespace edgesign
