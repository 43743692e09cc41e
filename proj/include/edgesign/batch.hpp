#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "edgesign/features.hpp"
#include "edgesign/genmodel.hpp"
#include "edgesign/graph.hpp"
#include "json.hpp"

namespace edgesign {

// ---------------------------------------------------------------------------
// Thresholds and predictions

/// Threshold minimizing training mistakes of threshold_sign(score, t).
/// Candidates are -inf, midpoints of consecutive distinct scores, and +inf;
/// ties go to the smallest candidate.
double tune_threshold(std::span<const double> scores, std::span<const Sign> labels);

std::size_t threshold_mistakes(std::span<const double> scores, std::span<const Sign> labels,
                               double threshold);

/// Scores and labels for a list of edges (normally the test edges).
struct Prediction {
  std::string method;
  double threshold = 0.0;
  std::vector<EdgeId> edges;
  std::vector<double> scores;
  std::vector<Sign> labels;  // threshold_sign(score, threshold)
};

/// `src,dst,score,label` with a header row.
void write_prediction_csv(const SignedDigraph& g, const Prediction& pred, std::ostream& out);

// ---------------------------------------------------------------------------
// blc(tr, un)

struct BlcModel {
  TrollTrust features;  // training-masked, fallback 1/2
  double tau = 0.5;     // positive fraction of training edges
};

BlcModel blc_fit(const SignedDigraph& g, const EdgeSplit& split);
double blc_score(const BlcModel& m, NodeId i, NodeId j);
Prediction blc_predict(const BlcModel& m, const SignedDigraph& g, std::span<const EdgeId> edges);

// ---------------------------------------------------------------------------
// Logistic regression on (1 - tr(i), 1 - un(j))

struct LogRegOptions {
  double tol = 1e-8;  // on the mean log-likelihood gradient norm
  std::size_t max_iter = 200;
};

struct LogRegModel {
  TrollTrust features;
  double w0 = 0, w1 = 0, w2 = 0;
  double threshold = 0;
  std::size_t iterations = 0;

  double w2_prime() const { return w2 / w1; }
  double tau_prime() const { return -(0.5 + w0 / w1); }
};

LogRegModel logreg_fit(const SignedDigraph& g, const EdgeSplit& split, const LogRegOptions& opt = {});
double logreg_score(const LogRegModel& m, NodeId i, NodeId j);
Prediction logreg_predict(const LogRegModel& m, const SignedDigraph& g,
                          std::span<const EdgeId> edges);

// ---------------------------------------------------------------------------
// Label propagation

struct LpOptions {
  double tol = 1e-8;
  std::size_t max_sweeps = 1000;
  unsigned threads = 1;
  bool track_objective = false;
};

struct LpState {
  std::vector<double> p, q;
  std::vector<double> y;  // per edge; training edges hold their label
  double residual = 0.0;  // max absolute change in the last sweep
  std::size_t iterations = 0;
  double objective = 0.0;
  std::vector<double> objective_trace;
};

class LpNotConverged : public ConvergenceError {
 public:
  LpNotConverged(const std::string& what, LpState state)
      : ConvergenceError(what, state.objective), state_(std::move(state)) {}
  const LpState& state() const noexcept { return state_; }

 private:
  LpState state_;
};

/// Minimizes f_hat by block coordinate sweeps: every p_i, then every q_j,
/// then every test y. Each block is solved exactly in closed form:
///   p_i = (sum_out (1+y) - sum_out q + d_out) / (3 d_out)
///   q_j = (sum_in (1+y) - sum_in p + d_in) / (3 d_in)
///   y_ij = p_i + q_j - 1
/// with full-graph degrees. Nodes with no edges on a side keep 1/2.
/// Start: p = q = 1/2, test y = 0. Throws LpNotConverged after max_sweeps.
LpState lp_run(const SignedDigraph& g, const EdgeSplit& split, const LpOptions& opt = {});

/// p + q - 1 on training edges is the tuning score; the prediction scores
/// are the converged test y values.
Prediction lp_predict(const LpState& state, const SignedDigraph& g, const EdgeSplit& split);

// ---------------------------------------------------------------------------
// Unregularized quadratic objective

struct UnregOptions {
  double tol = 1e-8;  // projected-gradient infinity norm
  std::size_t max_iter = 10000;
};

struct UnregResult {
  std::vector<double> p, q, y;
  double objective = 0.0;
  double projected_gradient = 0.0;
  std::size_t iterations = 0;
};

/// Minimizes f_E0 + f_test over p, q in [0,1] and test y in [-1,1]. The
/// test terms vanish at y = p + q - 1, so this is the box least-squares fit
/// of the training edges (alternating clipped block minimization, as for
/// psi2) with y set afterwards. Nodes without training edges stay at 1/2.
UnregResult unreg_solve(const SignedDigraph& g, const EdgeSplit& split, const UnregOptions& opt = {});

// ---------------------------------------------------------------------------
// Objectives, used by the solvers and exposed for checking them

struct PqGradient {
  std::vector<double> dp, dq;
};

struct FullGradient {
  std::vector<double> dp, dq, dy;  // dy is zero on training edges
};

/// Training log-likelihood under the generative model.
double ml_log_likelihood(const SignedDigraph& g, const EdgeSplit& split, std::span<const double> p,
                         std::span<const double> q);

/// Exact gradient of ml_log_likelihood. Throws DomainError naming the first
/// training edge with p_i + q_j outside (0, 2).
PqGradient ml_gradient(const SignedDigraph& g, const EdgeSplit& split, std::span<const double> p,
                       std::span<const double> q);

/// Linear equations replacing the likelihood stationarity conditions, over
/// unknowns x = (p_0..p_{n-1}, q_0..q_{n-1}). Row l holds
/// sum_{train out(l)} (p_l + q_j) = sum (1 + y); row n+l the in-side analog.
/// Rows of nodes without training edges are empty.
struct LinearSystem {
  struct Entry {
    std::size_t row, col;
    double value;
  };
  std::size_t size = 0;
  std::vector<Entry> entries;  // duplicates are summed
  std::vector<double> rhs;
};

LinearSystem linearized_ml_system(const SignedDigraph& g, const EdgeSplit& split);

double f_e0(const SignedDigraph& g, const EdgeSplit& split, std::span<const double> p,
            std::span<const double> q);
PqGradient f_e0_gradient(const SignedDigraph& g, const EdgeSplit& split, std::span<const double> p,
                         std::span<const double> q);

/// Quadratic loss over all edges plus (1/2) sum_i [d_out(i)(p_i-1/2)^2 +
/// d_in(i)(q_i-1/2)^2]. `y` is per edge.
double f_hat(const SignedDigraph& g, std::span<const double> p, std::span<const double> q,
             std::span<const double> y);
FullGradient f_hat_gradient(const SignedDigraph& g, const EdgeSplit& split,
                            std::span<const double> p, std::span<const double> q,
                            std::span<const double> y);

/// f_E0 + f_test without the regularizer.
double f_unreg(const SignedDigraph& g, std::span<const double> p, std::span<const double> q,
               std::span<const double> y);

// ---------------------------------------------------------------------------
// Method dispatch and persistence

enum class Method { blc, logreg, lprop, unreg, bayes };

Method parse_method(const std::string& name);
std::string method_name(Method m);

/// Node potentials plus threshold; scores are p_i + q_j - 1.
struct PotentialModel {
  Method method = Method::lprop;
  std::vector<double> p, q;
  double threshold = 0.0;
  std::size_t iterations = 0;
};

using Model = std::variant<BlcModel, LogRegModel, PotentialModel>;

struct FitOptions {
  LogRegOptions logreg;
  LpOptions lp;
  UnregOptions unreg;
  const GenParams* oracle = nullptr;  // required for Method::bayes
};

/// Fits on the training edges of `split`.
Model fit(Method method, const SignedDigraph& g, const EdgeSplit& split, const FitOptions& opt = {});

Method model_method(const Model& m);

/// Scores and labels for `edges` from a fitted model.
Prediction predict(const Model& m, const SignedDigraph& g, std::span<const EdgeId> edges);

nlohmann::json model_to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);

}  // namespace edgesign
