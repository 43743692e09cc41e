#include "edgesign/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "edgesign/metrics.hpp"

namespace edgesign {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> finite(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v)
    if (!std::isnan(x)) out.push_back(x);
  return out;
}

double mean_of(const std::vector<double>& v) {
  const auto f = finite(v);
  if (f.empty()) return kNaN;
  double s = 0.0;
  for (double x : f) s += x;
  return s / static_cast<double>(f.size());
}

nlohmann::json number_or_null(double x) { return std::isnan(x) ? nlohmann::json() : nlohmann::json(x); }

std::string fixed(double x, int digits) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string describe(const SyntheticSpec& s) {
  return "synthetic:nodes=" + std::to_string(s.nodes) + ",topology=" + describe(s.topology) +
         ",prior=" + describe(s.prior) + ",seed=" + std::to_string(s.seed);
}

// Runs task(r) for r in [0, count) on up to `threads` workers.
template <class Task>
void for_each_index(std::size_t count, unsigned threads, Task&& task) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t r = 0; r < count; ++r) task(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < count; r = next++) task(r);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

// ---------------------------------------------------------------------------
// Cells

std::size_t CellResult::succeeded() const { return finite(mcc).size(); }
double CellResult::mcc_mean() const { return mean_of(mcc); }
double CellResult::accuracy_mean() const { return mean_of(accuracy); }
double CellResult::seconds_mean() const { return mean_of(seconds); }

double CellResult::mcc_std() const {
  const auto f = finite(mcc);
  if (f.size() < 2) return f.empty() ? kNaN : 0.0;
  const double m = mcc_mean();
  double ss = 0.0;
  for (double x : f) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(f.size() - 1));
}

const CellResult& ExperimentReport::cell(Method m, double fraction) const {
  for (const auto& c : cells)
    if (c.method == m && c.fraction == fraction) return c;
  throw ArgumentError("no cell for " + method_name(m) + " at fraction " + std::to_string(fraction));
}

// ---------------------------------------------------------------------------
// Specs

void validate(const ExperimentSpec& spec) {
  if (spec.dataset.has_value() == spec.synthetic.has_value())
    throw ArgumentError("experiment needs exactly one of dataset or synthetic");
  if (spec.methods.empty()) throw ArgumentError("experiment needs at least one method");
  if (spec.fractions.empty()) throw ArgumentError("experiment needs at least one fraction");
  for (double f : spec.fractions)
    if (!(f > 0.0 && f < 1.0)) throw ArgumentError("fractions must lie strictly inside (0,1)");
  if (spec.repetitions < 1) throw ArgumentError("repetitions must be at least 1");
  for (Method m : spec.methods)
    if (m == Method::bayes && !spec.synthetic)
      throw ArgumentError("the bayes oracle is only available on synthetic data");
  if (spec.synthetic) validate(spec.synthetic->prior);
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  try {
    ExperimentSpec spec;
    if (j.contains("dataset")) spec.dataset = j.at("dataset").get<std::string>();
    if (j.contains("synthetic")) {
      const auto& s = j.at("synthetic");
      SyntheticSpec syn;
      syn.nodes = s.value("nodes", syn.nodes);
      if (s.contains("topology")) syn.topology = parse_topology(s.at("topology").get<std::string>());
      if (s.contains("prior")) syn.prior = parse_prior(s.at("prior").get<std::string>());
      syn.seed = s.value("seed", syn.seed);
      spec.synthetic = syn;
    }
    if (j.contains("methods")) {
      spec.methods.clear();
      for (const auto& m : j.at("methods")) spec.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("fractions")) spec.fractions = j.at("fractions").get<std::vector<double>>();
    spec.repetitions = j.value("repetitions", spec.repetitions);
    spec.base_seed = j.value("base_seed", spec.base_seed);
    spec.threads = j.value("threads", spec.threads);
    spec.timing = j.value("timing", spec.timing);
    spec.regularity = j.value("regularity", spec.regularity);
    spec.fit.lp.tol = j.value("lp_tol", spec.fit.lp.tol);
    spec.fit.lp.max_sweeps = j.value("lp_max_sweeps", spec.fit.lp.max_sweeps);
    spec.fit.unreg.tol = j.value("unreg_tol", spec.fit.unreg.tol);
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& ex) {
    throw ArgumentError(std::string("malformed experiment spec: ") + ex.what());
  }
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  if (spec.dataset) j["dataset"] = *spec.dataset;
  if (spec.synthetic)
    j["synthetic"] = {{"nodes", spec.synthetic->nodes},
                      {"topology", describe(spec.synthetic->topology)},
                      {"prior", describe(spec.synthetic->prior)},
                      {"seed", spec.synthetic->seed}};
  j["methods"] = nlohmann::json::array();
  for (Method m : spec.methods) j["methods"].push_back(method_name(m));
  j["fractions"] = spec.fractions;
  j["repetitions"] = spec.repetitions;
  j["base_seed"] = spec.base_seed;
  j["lp_tol"] = spec.fit.lp.tol;
  j["lp_max_sweeps"] = spec.fit.lp.max_sweeps;
  j["unreg_tol"] = spec.fit.unreg.tol;
  return j;
}

// ---------------------------------------------------------------------------
// Runs

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.dataset) return run_experiment(spec, read_graph_file(*spec.dataset), nullptr, *spec.dataset);
  const auto& s = *spec.synthetic;
  const SyntheticData data = synthesize(s.nodes, s.topology, s.prior, s.seed);
  return run_experiment(spec, data.graph, &data.params, describe(s));
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const SignedDigraph& g,
                                const GenParams* oracle, const std::string& source) {
  if (spec.methods.empty() || spec.fractions.empty() || spec.repetitions < 1)
    throw ArgumentError("experiment needs methods, fractions and repetitions");
  for (double f : spec.fractions)
    if (!(f > 0.0 && f < 1.0)) throw ArgumentError("fractions must lie strictly inside (0,1)");
  for (Method m : spec.methods)
    if (m == Method::bayes && !oracle) throw ArgumentError("the bayes oracle needs generative parameters");

  ExperimentReport rep;
  rep.source = source;
  rep.nodes = g.node_count();
  rep.edges = g.edge_count();
  std::size_t pos = 0;
  for (Sign s : g.labels()) pos += s == Sign::positive;
  rep.positive_fraction = g.edge_count() ? static_cast<double>(pos) / g.edge_count() : 0.0;
  if (spec.regularity) {
    try {
      rep.regularity = regularity_report(g, {.threads = spec.threads});
    } catch (const ConvergenceError&) {
      // Reported as absent rather than failing the sweep.
    }
  }
  rep.repetitions = spec.repetitions;
  rep.base_seed = spec.base_seed;
  rep.timed = spec.timing;

  const std::size_t nf = spec.fractions.size();
  for (Method m : spec.methods)
    for (double f : spec.fractions) {
      CellResult c;
      c.method = m;
      c.fraction = f;
      c.mcc.assign(spec.repetitions, kNaN);
      c.accuracy.assign(spec.repetitions, kNaN);
      if (spec.timing) c.seconds.assign(spec.repetitions, kNaN);
      rep.cells.push_back(std::move(c));
    }
  // failures[cell][rep], merged in order afterwards so the report does not
  // depend on thread scheduling.
  std::vector<std::vector<std::string>> failures(rep.cells.size(),
                                                 std::vector<std::string>(spec.repetitions));

  FitOptions fit_opt = spec.fit;
  fit_opt.oracle = oracle;
  fit_opt.lp.threads = 1;  // parallelism lives at the repetition level

  for_each_index(spec.repetitions, spec.threads, [&](std::size_t r) {
    const std::uint64_t seed = repetition_seed(spec.base_seed, r);
    for (std::size_t fi = 0; fi < nf; ++fi) {
      const EdgeSplit split = sample_split(g, spec.fractions[fi], seed);
      const std::vector<EdgeId> test = split.test_edges();
      for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
        CellResult& cell = rep.cells[mi * nf + fi];
        try {
          const auto t0 = std::chrono::steady_clock::now();
          const Model model = fit(spec.methods[mi], g, split, fit_opt);
          const Prediction pred = predict(model, g, test);
          const auto t1 = std::chrono::steady_clock::now();
          const ConfusionCounts cc = confusion(pred, g, split);
          cell.mcc[r] = mcc(cc);
          cell.accuracy[r] = accuracy(cc);
          if (spec.timing) cell.seconds[r] = std::chrono::duration<double>(t1 - t0).count();
        } catch (const Error& ex) {
          failures[mi * nf + fi][r] = "rep " + std::to_string(r) + ": " + ex.what();
        }
      }
    }
  });
  for (std::size_t c = 0; c < rep.cells.size(); ++c)
    for (auto& msg : failures[c])
      if (!msg.empty()) rep.cells[c].failures.push_back(std::move(msg));
  return rep;
}

// ---------------------------------------------------------------------------
// Output

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j{{"format", "edgesign-report"},
                   {"version", 1},
                   {"source", r.source},
                   {"nodes", r.nodes},
                   {"edges", r.edges},
                   {"positive_fraction", r.positive_fraction},
                   {"repetitions", r.repetitions},
                   {"base_seed", r.base_seed}};
  if (r.regularity) j["regularity"] = to_json(*r.regularity);
  j["cells"] = nlohmann::json::array();
  for (const auto& c : r.cells) {
    nlohmann::json cj{{"method", method_name(c.method)},
                      {"fraction", c.fraction},
                      {"mcc_mean", number_or_null(c.mcc_mean())},
                      {"mcc_std", number_or_null(c.mcc_std())},
                      {"accuracy_mean", number_or_null(c.accuracy_mean())},
                      {"succeeded", c.succeeded()},
                      {"failures", c.failures}};
    cj["mcc"] = nlohmann::json::array();
    for (double x : c.mcc) cj["mcc"].push_back(number_or_null(x));
    if (r.timed) cj["seconds_mean"] = number_or_null(c.seconds_mean());
    j["cells"].push_back(std::move(cj));
  }
  return j;
}

void write_report_csv(const ExperimentReport& r, std::ostream& out) {
  out << "method,fraction,mcc_mean,mcc_std,accuracy_mean,succeeded,failed";
  if (r.timed) out << ",seconds_mean";
  out << '\n';
  for (const auto& c : r.cells) {
    out << method_name(c.method) << ',' << fixed(c.fraction, 4) << ',' << fixed(c.mcc_mean(), 6) << ','
        << fixed(c.mcc_std(), 6) << ',' << fixed(c.accuracy_mean(), 6) << ',' << c.succeeded() << ','
        << c.failures.size();
    if (r.timed) out << ',' << fixed(c.seconds_mean(), 6);
    out << '\n';
  }
}

void write_report_markdown(const ExperimentReport& r, std::ostream& out) {
  std::vector<double> fractions;
  std::vector<Method> methods;
  for (const auto& c : r.cells) {
    if (std::find(fractions.begin(), fractions.end(), c.fraction) == fractions.end())
      fractions.push_back(c.fraction);
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
  }
  out << "| method |";
  for (double f : fractions) out << ' ' << fixed(100 * f, 0) << "% |";
  out << "\n|---|";
  for (std::size_t k = 0; k < fractions.size(); ++k) out << "---|";
  out << '\n';
  for (Method m : methods) {
    out << "| " << method_name(m) << " |";
    for (double f : fractions) {
      const auto& c = r.cell(m, f);
      out << ' ' << fixed(100 * c.mcc_mean(), 2) << " ± " << fixed(100 * c.mcc_std(), 2) << " |";
    }
    out << '\n';
  }
  if (r.timed) {
    for (Method m : methods) {
      out << "| " << method_name(m) << " time (s) |";
      for (double f : fractions) out << ' ' << fixed(r.cell(m, f).seconds_mean(), 4) << " |";
      out << '\n';
    }
  }
}

}  // namespace edgesign
