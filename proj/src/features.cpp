#include "edgesign/features.hpp"

#include <algorithm>
#include <cmath>

namespace edgesign {

namespace {

TrollTrust from_stats(const NodeStats& s, double fallback) {
  if (!(fallback >= 0.0 && fallback <= 1.0)) throw ArgumentError("fallback must lie in [0,1]");
  const std::size_t n = s.d_out.size();
  TrollTrust t;
  t.tr.assign(n, fallback);
  t.un.assign(n, fallback);
  t.tr_present.assign(n, 0);
  t.un_present.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.d_out[i] > 0) {
      t.tr[i] = static_cast<double>(s.d_out_minus[i]) / s.d_out[i];
      t.tr_present[i] = 1;
    }
    if (s.d_in[i] > 0) {
      t.un[i] = static_cast<double>(s.d_in_minus[i]) / s.d_in[i];
      t.un_present[i] = 1;
    }
  }
  return t;
}

inline double target(Sign s) { return s == Sign::positive ? 1.0 : 0.0; }

}  // namespace

TrollTrust troll_trust(const SignedDigraph& g, const EdgeMask& mask, double fallback) {
  return from_stats(degree_stats(g, mask), fallback);
}

TrollTrust troll_trust(const SignedDigraph& g, double fallback) {
  return from_stats(degree_stats(g), fallback);
}

PsiCounts psi_g(const SignedDigraph& g) {
  const NodeStats s = degree_stats(g);
  PsiCounts c;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    c.psi_in += std::min(s.d_in_plus[i], s.d_in_minus[i]);
    c.psi_out += std::min(s.d_out_plus[i], s.d_out_minus[i]);
  }
  c.psi_g = std::min(c.psi_in, c.psi_out);
  return c;
}

double labeled_quadratic_loss(const SignedDigraph& g, std::span<const double> p,
                              std::span<const double> q) {
  double total = 0.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const double r = target(g.label(e)) - 0.5 * (p[ed.src] + q[ed.dst]);
    total += r * r;
  }
  return total;
}

Psi2Result psi2_solve(const SignedDigraph& g, const BoxLsOptions& opt) {
  const std::size_t n = g.node_count();
  Psi2Result res;
  res.p.assign(n, 0.5);
  res.q.assign(n, 0.5);
  auto& p = res.p;
  auto& q = res.q;

  // Sums of (1+y) per node are fixed; only the partner-variable sums move.
  std::vector<double> out_target(n, 0.0), in_target(n, 0.0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const double t = 2.0 * target(g.label(e));
    out_target[g.edge(e).src] += t;
    in_target[g.edge(e).dst] += t;
  }

  // Projected-gradient norm of the p block (the q block is exactly
  // stationary right after its own update).
  auto p_stationarity = [&](std::size_t lo, std::size_t hi) {
    double worst = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto out = g.out_edges(static_cast<NodeId>(i));
      if (out.empty()) continue;
      double qs = 0.0;
      for (EdgeId e : out) qs += q[g.edge(e).dst];
      const double d = static_cast<double>(out.size());
      const double grad = -0.5 * (out_target[i] - qs - d * p[i]);
      const double moved = std::clamp(p[i] - grad, 0.0, 1.0);
      worst = std::max(worst, std::abs(p[i] - moved));
    }
    return worst;
  };

  double best = labeled_quadratic_loss(g, p, q);
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    parallel_for(n, opt.threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const auto out = g.out_edges(static_cast<NodeId>(i));
        if (out.empty()) continue;
        double qs = 0.0;
        for (EdgeId e : out) qs += q[g.edge(e).dst];
        p[i] = std::clamp((out_target[i] - qs) / static_cast<double>(out.size()), 0.0, 1.0);
      }
    });
    parallel_for(n, opt.threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j) {
        const auto in = g.in_edges(static_cast<NodeId>(j));
        if (in.empty()) continue;
        double ps = 0.0;
        for (EdgeId e : in) ps += p[g.edge(e).src];
        q[j] = std::clamp((in_target[j] - ps) / static_cast<double>(in.size()), 0.0, 1.0);
      }
    });
    res.iterations = it;
    best = labeled_quadratic_loss(g, p, q);
    if (opt.track_objective) res.objective_trace.push_back(best);
    res.projected_gradient = parallel_max(n, opt.threads, p_stationarity);
    if (res.projected_gradient <= opt.tol) {
      res.value = best;
      return res;
    }
  }
  throw ConvergenceError("psi2: projected gradient " + std::to_string(res.projected_gradient) +
                             " above tolerance after " + std::to_string(opt.max_iter) +
                             " iterations",
                         best);
}

double psi2(const SignedDigraph& g, const BoxLsOptions& opt) { return psi2_solve(g, opt).value; }

RegularityReport regularity_report(const SignedDigraph& g, const BoxLsOptions& opt) {
  const PsiCounts c = psi_g(g);
  RegularityReport r;
  r.psi_in = c.psi_in;
  r.psi_out = c.psi_out;
  r.psi_g = c.psi_g;
  r.psi2 = psi2(g, opt);
  const double m = static_cast<double>(g.edge_count());
  r.psi_g_rate = m > 0 ? static_cast<double>(r.psi_g) / m : 0.0;
  r.psi2_rate = m > 0 ? r.psi2 / m : 0.0;
  return r;
}

nlohmann::json to_json(const RegularityReport& r) {
  return {{"psi_in", r.psi_in},       {"psi_out", r.psi_out},     {"psi_g", r.psi_g},
          {"psi2", r.psi2},           {"psi_g_rate", r.psi_g_rate}, {"psi2_rate", r.psi2_rate}};
}

}  // namespace edgesign
