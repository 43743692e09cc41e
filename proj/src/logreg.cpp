#include <array>
#include <cmath>

#include "edgesign/batch.hpp"

namespace edgesign {

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Sample {
  double x1, x2, z;  // z in {0, 1}
};

double score(const Vec3& w, const Sample& s) { return w[0] + w[1] * s.x1 + w[2] * s.x2; }

// Mean negative log-likelihood.
double loss(const std::vector<Sample>& data, const Vec3& w) {
  double total = 0.0;
  for (const auto& s : data) {
    const double t = score(w, s);
    total += softplus(t) - s.z * t;
  }
  return total / static_cast<double>(data.size());
}

// Cholesky solve of (H + lambda I) x = b; false if not positive definite.
bool solve_spd(Mat3 h, double lambda, const Vec3& b, Vec3& x) {
  for (int k = 0; k < 3; ++k) h[k][k] += lambda;
  Mat3 l{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = h[i][j];
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (!(s > 0)) return false;
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  Vec3 z{};
  for (int i = 0; i < 3; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l[i][k] * z[k];
    z[i] = s / l[i][i];
  }
  for (int i = 2; i >= 0; --i) {
    double s = z[i];
    for (int k = i + 1; k < 3; ++k) s -= l[k][i] * x[k];
    x[i] = s / l[i][i];
  }
  return true;
}

}  // namespace

LogRegModel logreg_fit(const SignedDigraph& g, const EdgeSplit& split, const LogRegOptions& opt) {
  if (split.training_mask.size() != g.edge_count())
    throw ArgumentError("split does not match the graph's edge count");
  LogRegModel m;
  m.features = troll_trust(g, split.training_mask, 0.5);

  std::vector<Sample> data;
  std::vector<EdgeId> train_edges;
  std::size_t positives = 0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!split.is_training(e)) continue;
    const Edge& ed = g.edge(e);
    const double z = g.label(e) == Sign::positive ? 1.0 : 0.0;
    positives += z > 0;
    data.push_back({1.0 - m.features.tr[ed.src], 1.0 - m.features.un[ed.dst], z});
    train_edges.push_back(e);
  }
  if (positives == 0 || positives == data.size())
    throw ArgumentError("degenerate logistic fit: training labels need both signs");

  Vec3 w{0, 0, 0};
  double f = loss(data, w);
  double gnorm = 0.0;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t it = 0; it <= opt.max_iter; ++it) {
    Vec3 grad{};
    Mat3 hess{};
    for (const auto& s : data) {
      const Vec3 x{1.0, s.x1, s.x2};
      const double mu = sigmoid(score(w, s));
      const double r = mu - s.z;
      const double v = mu * (1.0 - mu);
      for (int a = 0; a < 3; ++a) {
        grad[a] += r * x[a] * inv_n;
        for (int b = 0; b < 3; ++b) hess[a][b] += v * x[a] * x[b] * inv_n;
      }
    }
    gnorm = std::sqrt(grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]);
    m.iterations = it;
    if (gnorm <= opt.tol) break;
    if (it == opt.max_iter)
      throw ConvergenceError("logistic fit: gradient norm " + std::to_string(gnorm) + " after " +
                                 std::to_string(opt.max_iter) + " Newton steps",
                             f);

    // Damped Newton: add a ridge only when the Hessian is (numerically) singular.
    const Vec3 neg{-grad[0], -grad[1], -grad[2]};
    Vec3 step{};
    const double scale = hess[0][0] + hess[1][1] + hess[2][2];
    double lambda = 0.0;
    while (!solve_spd(hess, lambda, neg, step)) lambda = lambda == 0.0 ? 1e-12 * (1.0 + scale) : lambda * 10;

    const double slope = grad[0] * step[0] + grad[1] * step[1] + grad[2] * step[2];
    double t = 1.0;
    Vec3 trial{};
    double ft = f;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      for (int a = 0; a < 3; ++a) trial[a] = w[a] + t * step[a];
      ft = loss(data, trial);
      if (ft <= f + 1e-4 * t * slope) break;
    }
    if (!(ft <= f)) break;  // no further decrease representable
    w = trial;
    f = ft;
  }
  // A stalled line search near the optimum is accepted; only a real stall fails.
  if (gnorm > opt.tol && gnorm > 1e-6)
    throw ConvergenceError("logistic fit stalled at gradient norm " + std::to_string(gnorm), f);

  m.w0 = w[0];
  m.w1 = w[1];
  m.w2 = w[2];
  std::vector<double> scores;
  std::vector<Sign> labels;
  scores.reserve(data.size());
  labels.reserve(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    scores.push_back(score(w, data[k]));
    labels.push_back(g.label(train_edges[k]));
  }
  m.threshold = tune_threshold(scores, labels);
  return m;
}

double logreg_score(const LogRegModel& m, NodeId i, NodeId j) {
  return m.w0 + m.w1 * (1.0 - m.features.tr[i]) + m.w2 * (1.0 - m.features.un[j]);
}

Prediction logreg_predict(const LogRegModel& m, const SignedDigraph& g,
                          std::span<const EdgeId> edges) {
  Prediction pred;
  pred.method = "logreg";
  pred.threshold = m.threshold;
  pred.edges.assign(edges.begin(), edges.end());
  for (EdgeId e : edges) {
    const double s = logreg_score(m, g.edge(e).src, g.edge(e).dst);
    pred.scores.push_back(s);
    pred.labels.push_back(threshold_sign(s, m.threshold));
  }
  return pred;
}

}  // namespace edgesign
