#include <cmath>

#include "edgesign/batch.hpp"

namespace edgesign {

namespace {

inline double residual(double y, double p, double q) { return 0.5 * (1.0 + y) - 0.5 * (p + q); }

void check_sizes(const SignedDigraph& g, std::span<const double> p, std::span<const double> q) {
  if (p.size() != g.node_count() || q.size() != g.node_count())
    throw ArgumentError("p and q need one entry per node");
}

nlohmann::json features_to_json(const TrollTrust& t) {
  return {{"tr", t.tr}, {"un", t.un}, {"tr_present", t.tr_present}, {"un_present", t.un_present}};
}

TrollTrust features_from_json(const nlohmann::json& j) {
  TrollTrust t;
  t.tr = j.at("tr").get<std::vector<double>>();
  t.un = j.at("un").get<std::vector<double>>();
  t.tr_present = j.at("tr_present").get<std::vector<std::uint8_t>>();
  t.un_present = j.at("un_present").get<std::vector<std::uint8_t>>();
  if (t.un.size() != t.tr.size() || t.tr_present.size() != t.tr.size() ||
      t.un_present.size() != t.tr.size())
    throw DataError("model feature arrays differ in length");
  return t;
}

std::size_t model_nodes(const Model& m) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PotentialModel>) return x.p.size();
        else return x.features.tr.size();
      },
      m);
}

// JSON has no infinities; the -inf/+inf threshold sentinels are stored as strings.
nlohmann::json threshold_to_json(double t) {
  if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
  return t;
}

double threshold_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw DataError("bad threshold '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

// ---------------------------------------------------------------------------
// Objectives

double ml_log_likelihood(const SignedDigraph& g, const EdgeSplit& split, std::span<const double> p,
                         std::span<const double> q) {
  check_sizes(g, p, q);
  double ll = 0.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!split.is_training(e)) continue;
    const double s = p[g.edge(e).src] + q[g.edge(e).dst];
    ll += g.label(e) == Sign::positive ? std::log(0.5 * s) : std::log(1.0 - 0.5 * s);
  }
  return ll;
}

PqGradient ml_gradient(const SignedDigraph& g, const EdgeSplit& split, std::span<const double> p,
                       std::span<const double> q) {
  check_sizes(g, p, q);
  PqGradient grad{std::vector<double>(g.node_count(), 0.0), std::vector<double>(g.node_count(), 0.0)};
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!split.is_training(e)) continue;
    const Edge& ed = g.edge(e);
    const double s = p[ed.src] + q[ed.dst];
    if (!(s > 0.0 && s < 2.0))
      throw DomainError("p_i + q_j = " + std::to_string(s) + " outside (0,2) on training edge " +
                            std::to_string(e),
                        e);
    const double d = g.label(e) == Sign::positive ? 1.0 / s : -1.0 / (2.0 - s);
    grad.dp[ed.src] += d;
    grad.dq[ed.dst] += d;
  }
  return grad;
}

LinearSystem linearized_ml_system(const SignedDigraph& g, const EdgeSplit& split) {
  const std::size_t n = g.node_count();
  LinearSystem sys;
  sys.size = 2 * n;
  sys.rhs.assign(2 * n, 0.0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!split.is_training(e)) continue;
    const Edge& ed = g.edge(e);
    const double target = 1.0 + value(g.label(e));
    for (const std::size_t row : {std::size_t{ed.src}, n + ed.dst}) {
      sys.entries.push_back({row, ed.src, 1.0});
      sys.entries.push_back({row, n + ed.dst, 1.0});
      sys.rhs[row] += target;
    }
  }
  return sys;
}

double f_e0(const SignedDigraph& g, const EdgeSplit& split, std::span<const double> p,
            std::span<const double> q) {
  check_sizes(g, p, q);
  double f = 0.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!split.is_training(e)) continue;
    const double r = residual(value(g.label(e)), p[g.edge(e).src], q[g.edge(e).dst]);
    f += r * r;
  }
  return f;
}

PqGradient f_e0_gradient(const SignedDigraph& g, const EdgeSplit& split, std::span<const double> p,
                         std::span<const double> q) {
  check_sizes(g, p, q);
  PqGradient grad{std::vector<double>(g.node_count(), 0.0), std::vector<double>(g.node_count(), 0.0)};
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!split.is_training(e)) continue;
    const Edge& ed = g.edge(e);
    const double r = residual(value(g.label(e)), p[ed.src], q[ed.dst]);
    grad.dp[ed.src] -= r;
    grad.dq[ed.dst] -= r;
  }
  return grad;
}

double f_unreg(const SignedDigraph& g, std::span<const double> p, std::span<const double> q,
               std::span<const double> y) {
  check_sizes(g, p, q);
  double f = 0.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const double r = residual(y[e], p[g.edge(e).src], q[g.edge(e).dst]);
    f += r * r;
  }
  return f;
}

double f_hat(const SignedDigraph& g, std::span<const double> p, std::span<const double> q,
             std::span<const double> y) {
  double f = f_unreg(g, p, q, y);
  double reg = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    reg += static_cast<double>(g.out_degree(i)) * (p[i] - 0.5) * (p[i] - 0.5);
    reg += static_cast<double>(g.in_degree(i)) * (q[i] - 0.5) * (q[i] - 0.5);
  }
  return f + 0.5 * reg;
}

FullGradient f_hat_gradient(const SignedDigraph& g, const EdgeSplit& split,
                            std::span<const double> p, std::span<const double> q,
                            std::span<const double> y) {
  check_sizes(g, p, q);
  const std::size_t n = g.node_count();
  FullGradient grad{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                    std::vector<double>(g.edge_count(), 0.0)};
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const double r = residual(y[e], p[ed.src], q[ed.dst]);
    grad.dp[ed.src] -= r;
    grad.dq[ed.dst] -= r;
    if (!split.is_training(e)) grad.dy[e] = r;
  }
  for (NodeId i = 0; i < n; ++i) {
    grad.dp[i] += static_cast<double>(g.out_degree(i)) * (p[i] - 0.5);
    grad.dq[i] += static_cast<double>(g.in_degree(i)) * (q[i] - 0.5);
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Dispatch

Method parse_method(const std::string& name) {
  if (name == "blc") return Method::blc;
  if (name == "logreg") return Method::logreg;
  if (name == "lprop") return Method::lprop;
  if (name == "unreg") return Method::unreg;
  if (name == "bayes") return Method::bayes;
  throw ArgumentError("unknown method '" + name + "' (expected blc, logreg, lprop, unreg, bayes)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::blc: return "blc";
    case Method::logreg: return "logreg";
    case Method::lprop: return "lprop";
    case Method::unreg: return "unreg";
    case Method::bayes: return "bayes";
  }
  return "?";
}

Model fit(Method method, const SignedDigraph& g, const EdgeSplit& split, const FitOptions& opt) {
  auto tuned = [&](PotentialModel pm) {
    std::vector<double> scores;
    std::vector<Sign> labels;
    for (EdgeId e : split.training_edges()) {
      scores.push_back(pm.p[g.edge(e).src] + pm.q[g.edge(e).dst] - 1.0);
      labels.push_back(g.label(e));
    }
    pm.threshold = scores.empty() ? 0.0 : tune_threshold(scores, labels);
    return pm;
  };
  switch (method) {
    case Method::blc: return blc_fit(g, split);
    case Method::logreg: return logreg_fit(g, split, opt.logreg);
    case Method::lprop: {
      LpState st = lp_run(g, split, opt.lp);
      return tuned({Method::lprop, std::move(st.p), std::move(st.q), 0.0, st.iterations});
    }
    case Method::unreg: {
      UnregResult r = unreg_solve(g, split, opt.unreg);
      return tuned({Method::unreg, std::move(r.p), std::move(r.q), 0.0, r.iterations});
    }
    case Method::bayes: {
      if (!opt.oracle) throw ArgumentError("the bayes oracle needs generative parameters");
      if (opt.oracle->p.size() != g.node_count())
        throw ArgumentError("oracle parameters do not match the graph");
      return PotentialModel{Method::bayes, opt.oracle->p, opt.oracle->q, 0.0, 0};
    }
  }
  throw ArgumentError("unknown method");
}

Method model_method(const Model& m) {
  if (std::holds_alternative<BlcModel>(m)) return Method::blc;
  if (std::holds_alternative<LogRegModel>(m)) return Method::logreg;
  return std::get<PotentialModel>(m).method;
}

Prediction predict(const Model& m, const SignedDigraph& g, std::span<const EdgeId> edges) {
  if (model_nodes(m) != g.node_count())
    throw ArgumentError("model was fitted on a graph with " + std::to_string(model_nodes(m)) +
                        " nodes, this graph has " + std::to_string(g.node_count()));
  if (const auto* b = std::get_if<BlcModel>(&m)) return blc_predict(*b, g, edges);
  if (const auto* l = std::get_if<LogRegModel>(&m)) return logreg_predict(*l, g, edges);
  const auto& pm = std::get<PotentialModel>(m);
  Prediction pred;
  pred.method = method_name(pm.method);
  pred.threshold = pm.threshold;
  pred.edges.assign(edges.begin(), edges.end());
  for (EdgeId e : edges) {
    const double s = pm.p[g.edge(e).src] + pm.q[g.edge(e).dst] - 1.0;
    pred.scores.push_back(s);
    pred.labels.push_back(threshold_sign(s, pm.threshold));
  }
  return pred;
}

nlohmann::json model_to_json(const Model& m) {
  nlohmann::json j{{"format", "edgesign-model"}, {"version", 1}, {"method", method_name(model_method(m))}};
  if (const auto* b = std::get_if<BlcModel>(&m)) {
    j["features"] = features_to_json(b->features);
    j["tau"] = b->tau;
  } else if (const auto* l = std::get_if<LogRegModel>(&m)) {
    j["features"] = features_to_json(l->features);
    j["w0"] = l->w0;
    j["w1"] = l->w1;
    j["w2"] = l->w2;
    j["threshold"] = threshold_to_json(l->threshold);
    j["w2_prime"] = l->w2_prime();
    j["tau_prime"] = l->tau_prime();
  } else {
    const auto& pm = std::get<PotentialModel>(m);
    j["p"] = pm.p;
    j["q"] = pm.q;
    j["threshold"] = threshold_to_json(pm.threshold);
    j["iterations"] = pm.iterations;
  }
  return j;
}

Model model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "edgesign-model") throw DataError("not an edgesign model file");
    const Method method = parse_method(j.at("method").get<std::string>());
    switch (method) {
      case Method::blc: {
        BlcModel b;
        b.features = features_from_json(j.at("features"));
        b.tau = j.at("tau").get<double>();
        return b;
      }
      case Method::logreg: {
        LogRegModel l;
        l.features = features_from_json(j.at("features"));
        l.w0 = j.at("w0").get<double>();
        l.w1 = j.at("w1").get<double>();
        l.w2 = j.at("w2").get<double>();
        l.threshold = threshold_from_json(j.at("threshold"));
        return l;
      }
      default: {
        PotentialModel pm;
        pm.method = method;
        pm.p = j.at("p").get<std::vector<double>>();
        pm.q = j.at("q").get<std::vector<double>>();
        if (pm.p.size() != pm.q.size()) throw DataError("model p and q differ in length");
        pm.threshold = threshold_from_json(j.at("threshold"));
        pm.iterations = j.value("iterations", std::size_t{0});
        return pm;
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed model: ") + ex.what());
  } catch (const ArgumentError& ex) {
    throw DataError(std::string("malformed model: ") + ex.what());
  }
}

}  // namespace edgesign
