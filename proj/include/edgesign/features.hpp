#pragma once

#include <cstddef>
#include <vector>

#include "edgesign/graph.hpp"
#include "json.hpp"

namespace edgesign {

/// Per-node trollness tr(i) (fraction of negative outgoing edges) and
/// untrustworthiness un(j) (fraction of negative incoming edges) over a mask.
/// Nodes without masked edges on a side get `fallback` and a false flag.
struct TrollTrust {
  std::vector<double> tr, un;
  std::vector<std::uint8_t> tr_present, un_present;
};

TrollTrust troll_trust(const SignedDigraph& g, const EdgeMask& mask, double fallback = 0.5);
TrollTrust troll_trust(const SignedDigraph& g, double fallback = 0.5);

struct PsiCounts {
  std::size_t psi_in = 0;
  std::size_t psi_out = 0;
  std::size_t psi_g = 0;
};

/// Sum of per-node minority-sign counts over in- and out-edges, and their min.
PsiCounts psi_g(const SignedDigraph& g);

struct BoxLsOptions {
  double tol = 1e-8;
  std::size_t max_iter = 10000;
  unsigned threads = 1;
  bool track_objective = false;
};

struct Psi2Result {
  double value = 0.0;
  std::vector<double> p, q;
  std::size_t iterations = 0;
  double projected_gradient = 0.0;
  std::vector<double> objective_trace;  // after each iteration, when tracked
};

/// Full-graph quadratic loss sum_e ((1+y)/2 - (p_i+q_j)/2)^2 with y the true labels.
double labeled_quadratic_loss(const SignedDigraph& g, std::span<const double> p,
                              std::span<const double> q);

/// Minimizes labeled_quadratic_loss over p, q in [0,1]^n by alternating
/// exact minimization of the p block and the q block. Each block is
/// separable per node, so the sweep is monotone and thread-count
/// independent. Stops when the projected-gradient infinity norm <= tol.
/// Throws ConvergenceError (carrying the best value) after max_iter.
Psi2Result psi2_solve(const SignedDigraph& g, const BoxLsOptions& opt = {});
double psi2(const SignedDigraph& g, const BoxLsOptions& opt = {});

struct RegularityReport {
  std::size_t psi_in = 0, psi_out = 0, psi_g = 0;
  double psi2 = 0.0;
  double psi_g_rate = 0.0;
  double psi2_rate = 0.0;
};

RegularityReport regularity_report(const SignedDigraph& g, const BoxLsOptions& opt = {});
nlohmann::json to_json(const RegularityReport& r);

}  // namespace edgesign
