#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"
#include "edgesign/batch.hpp"
#include "edgesign/features.hpp"
#include "edgesign/genmodel.hpp"
#include "edgesign/graph.hpp"
#include "edgesign/harness.hpp"
#include "edgesign/metrics.hpp"
#include "edgesign/online.hpp"

namespace edgesign::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kDataDirEnv = "EDGESIGN_DATA_DIR";

/// Input paths that do not exist as given are looked up under EDGESIGN_DATA_DIR.
std::string resolve_input(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv(kDataDirEnv); dir && *dir && fs::path(path).is_relative()) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  throw DataError("cannot open '" + path + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(resolve_input(path));
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& ex) {
    throw DataError("'" + path + "' is not valid JSON: " + ex.what());
  }
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path + "'");
  f << text;
  if (!f) throw DataError("write to '" + path + "' failed");
}

void write_json(const std::string& path, const json& j, std::ostream& out) {
  write_text(path, j.dump(2) + "\n", out);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_graph(const SignedDigraph& g, const std::string& path, std::ostream& out) {
  if (ends_with(path, ".json")) {
    write_graph_json_file(g, path);
  } else {
    std::ostringstream os;
    write_edge_list(g, os);
    write_text(path, os.str(), out);
  }
}

double positive_fraction(const SignedDigraph& g) {
  if (g.edge_count() == 0) return 0.0;
  std::size_t pos = 0;
  for (Sign s : g.labels()) pos += s == Sign::positive;
  return static_cast<double>(pos) / static_cast<double>(g.edge_count());
}

json confusion_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}, {"mcc", mcc(c)}, {"accuracy", accuracy(c)}};
}

// Options shared by subcommands that need a split.
struct SplitArgs {
  std::string split_file;
  std::optional<double> fraction;
  std::optional<std::uint64_t> seed;

  EdgeSplit resolve(const SignedDigraph& g) const {
    if (!split_file.empty()) {
      if (fraction) throw ArgumentError("give either --split or --fraction, not both");
      return split_from_json(read_json_file(split_file), g.edge_count());
    }
    if (!fraction) throw ArgumentError("a split is needed: --split FILE or --fraction F --seed S");
    if (!seed) throw ArgumentError("--fraction needs an explicit --seed");
    return sample_split(g, *fraction, *seed);
  }
};

void add_split_options(CLI::App* sub, SplitArgs& a) {
  sub->add_option("--split", a.split_file, "split file written by `split`");
  sub->add_option("--fraction", a.fraction, "training fraction in (0,1)");
  sub->add_option("--seed", a.seed, "seed for the split");
}

struct SolverArgs {
  double lp_tol = LpOptions{}.tol;
  std::size_t lp_max_sweeps = LpOptions{}.max_sweeps;
  double unreg_tol = UnregOptions{}.tol;
  double logreg_tol = LogRegOptions{}.tol;

  FitOptions options(unsigned threads) const {
    FitOptions o;
    o.lp.tol = lp_tol;
    o.lp.max_sweeps = lp_max_sweeps;
    o.lp.threads = threads;
    o.unreg.tol = unreg_tol;
    o.logreg.tol = logreg_tol;
    return o;
  }
};

void add_solver_options(CLI::App* sub, SolverArgs& a) {
  sub->add_option("--lp-tol", a.lp_tol, "label propagation residual tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--lp-max-sweeps", a.lp_max_sweeps, "label propagation sweep limit");
  sub->add_option("--unreg-tol", a.unreg_tol, "unregularized solver tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--logreg-tol", a.logreg_tol, "logistic fit gradient tolerance")->check(CLI::PositiveNumber);
}

// Per-edge lookup by node names, for prediction files.
class EdgeIndex {
 public:
  explicit EdgeIndex(const SignedDigraph& g) : g_(g) {
    for (NodeId v = 0; v < g.node_count(); ++v) ids_.emplace(g.node_name(v), v);
  }
  EdgeId find(const std::string& src, const std::string& dst, std::size_t line) const {
    const auto a = ids_.find(src), b = ids_.find(dst);
    if (a == ids_.end() || b == ids_.end()) throw ParseError("unknown node in " + src + "," + dst, line);
    const auto e = g_.find_edge(a->second, b->second);
    if (!e) throw ParseError("no edge " + src + " -> " + dst + " in the graph", line);
    return *e;
  }

 private:
  const SignedDigraph& g_;
  std::unordered_map<std::string, NodeId> ids_;
};

// ---------------------------------------------------------------------------
// Subcommands

struct Context {
  std::ostream& out;
  unsigned threads = 1;
};

void cmd_ingest(Context& ctx, const std::string& input, const std::string& output) {
  const LoadResult r = load_edge_list_file(resolve_input(input));
  if (!output.empty()) write_graph(r.graph, output, ctx.out);
  const json j{{"nodes", r.graph.node_count()},
               {"edges", r.graph.edge_count()},
               {"positive_fraction", positive_fraction(r.graph)},
               {"records", r.records},
               {"self_loops", r.self_loops},
               {"merged_duplicates", r.merged_duplicates},
               {"conflicts", r.conflicts}};
  write_json("", j, ctx.out);
}

void cmd_stats(Context& ctx, const std::string& input, const std::string& output, double tol) {
  const SignedDigraph g = read_graph_file(resolve_input(input));
  BoxLsOptions opt;
  opt.tol = tol;
  opt.threads = ctx.threads;
  json j = to_json(regularity_report(g, opt));
  j["nodes"] = g.node_count();
  j["edges"] = g.edge_count();
  j["positive_fraction"] = positive_fraction(g);
  write_json(output, j, ctx.out);
}

void cmd_split(Context& ctx, const std::string& input, double fraction, std::uint64_t seed,
               const std::string& output) {
  const SignedDigraph g = read_graph_file(resolve_input(input));
  write_json(output, split_to_json(sample_split(g, fraction, seed)), ctx.out);
}

void cmd_train(Context& ctx, const std::string& input, const std::string& method_text,
               const SplitArgs& split_args, const SolverArgs& solver, const std::string& params_file,
               const std::string& model_out, const std::string& pred_out, const std::string& output) {
  const Method method = parse_method(method_text);
  const SignedDigraph g = read_graph_file(resolve_input(input));
  const EdgeSplit split = split_args.resolve(g);
  FitOptions opt = solver.options(ctx.threads);
  std::optional<GenParams> params;
  if (!params_file.empty()) params = params_from_json(read_json_file(params_file));
  if (params) opt.oracle = &*params;

  const Model model = fit(method, g, split, opt);
  const Prediction pred = predict(model, g, split.test_edges());
  if (!model_out.empty()) write_json(model_out, model_to_json(model), ctx.out);
  if (!pred_out.empty()) {
    std::ostringstream os;
    write_prediction_csv(g, pred, os);
    write_text(pred_out, os.str(), ctx.out);
  }
  json j{{"method", method_name(method)},
         {"training_edges", split.training_count()},
         {"test_edges", pred.edges.size()},
         {"threshold", std::isinf(pred.threshold) ? json(pred.threshold > 0 ? "inf" : "-inf")
                                                  : json(pred.threshold)}};
  if (!pred.edges.empty()) j["test"] = confusion_json(confusion(pred, g, split));
  if (const auto* lr = std::get_if<LogRegModel>(&model)) {
    j["w0"] = lr->w0;
    j["w1"] = lr->w1;
    j["w2"] = lr->w2;
    j["w2_prime"] = lr->w2_prime();
    j["tau_prime"] = lr->tau_prime();
  } else if (const auto* b = std::get_if<BlcModel>(&model)) {
    j["tau"] = b->tau;
  } else {
    j["iterations"] = std::get<PotentialModel>(model).iterations;
  }
  write_json(output, j, ctx.out);
}

void cmd_predict(Context& ctx, const std::string& input, const std::string& model_file,
                 const SplitArgs& split_args, const std::string& output) {
  const SignedDigraph g = read_graph_file(resolve_input(input));
  const Model model = model_from_json(read_json_file(model_file));
  std::vector<EdgeId> edges;
  if (split_args.split_file.empty() && !split_args.fraction) {
    edges.resize(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) edges[e] = e;
  } else {
    edges = split_args.resolve(g).test_edges();
  }
  std::ostringstream os;
  write_prediction_csv(g, predict(model, g, edges), os);
  write_text(output, os.str(), ctx.out);
}

void cmd_eval(Context& ctx, const std::string& input, const std::string& pred_file,
              const std::string& output) {
  const SignedDigraph g = read_graph_file(resolve_input(input));
  std::ifstream in(resolve_input(pred_file));
  if (!in) throw DataError("cannot open '" + pred_file + "'");
  const EdgeIndex index(g);
  std::vector<Sign> predicted, truth;
  std::vector<std::uint8_t> seen(g.edge_count(), 0);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line.rfind("src,", 0) == 0)) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 4) throw ParseError("expected src,dst,score,label", lineno);
    const EdgeId e = index.find(cols[0], cols[1], lineno);
    if (seen[e]) throw ParseError("edge listed twice", lineno);
    seen[e] = 1;
    if (cols[3] != "1" && cols[3] != "-1") throw ParseError("label must be 1 or -1", lineno);
    predicted.push_back(cols[3] == "1" ? Sign::positive : Sign::negative);
    truth.push_back(g.label(e));
  }
  json j = confusion_json(confusion(predicted, truth));
  j["edges"] = predicted.size();
  write_json(output, j, ctx.out);
}

void cmd_sweep(Context& ctx, const std::string& spec_file, std::optional<std::uint64_t> seed,
               bool no_timing, const std::string& output, const std::string& csv,
               const std::string& markdown) {
  json j = read_json_file(spec_file);
  if (seed) j["base_seed"] = *seed;
  if (!j.contains("base_seed")) throw ArgumentError("sweep needs base_seed in the spec or --seed");
  ExperimentSpec spec = spec_from_json(j);
  if (spec.dataset) spec.dataset = resolve_input(*spec.dataset);
  spec.threads = ctx.threads;
  if (no_timing) spec.timing = false;
  const ExperimentReport rep = run_experiment(spec);
  if (!csv.empty()) {
    std::ostringstream os;
    write_report_csv(rep, os);
    write_text(csv, os.str(), ctx.out);
  }
  if (!markdown.empty()) {
    std::ostringstream os;
    write_report_markdown(rep, os);
    write_text(markdown, os.str(), ctx.out);
  }
  write_json(output, to_json(rep), ctx.out);
}

void cmd_synth(Context& ctx, std::size_t nodes, const std::string& topology, const std::string& prior,
               std::uint64_t seed, const std::string& output, const std::string& params_out) {
  const SyntheticData data = synthesize(nodes, parse_topology(topology), parse_prior(prior), seed);
  write_graph(data.graph, output, ctx.out);
  if (!params_out.empty()) write_json(params_out, to_json(data.params), ctx.out);
  if (output != "-" && !output.empty())
    write_json("", {{"nodes", data.graph.node_count()},
                    {"edges", data.graph.edge_count()},
                    {"positive_fraction", positive_fraction(data.graph)}},
               ctx.out);
}

void cmd_online(Context& ctx, const std::string& input, const std::string& order,
                std::optional<std::size_t> adversary, std::size_t trials, std::uint64_t seed,
                bool full_pass, const std::string& output) {
  const SignedDigraph g = read_graph_file(resolve_input(input));
  if (trials < 1) throw ArgumentError("--trials must be at least 1");
  json runs = json::array();
  double expected_sum = 0.0, realized_sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t order_seed = derive_seed(seed, 2 * t);
    const std::uint64_t learner_seed = derive_seed(seed, 2 * t + 1);
    OnlineReport r;
    if (adversary) {
      const AdversarySequence seq = adversary_generate(g, *adversary, order_seed, full_pass);
      r = run_adversary(g, seq, learner_seed);
    } else if (order == "random") {
      r = run_online(g, random_order(g.edge_count(), order_seed), learner_seed, "random");
    } else if (order == "given") {
      std::vector<EdgeId> ids(g.edge_count());
      for (EdgeId e = 0; e < ids.size(); ++e) ids[e] = e;
      r = run_online(g, ids, learner_seed, "given");
    } else {
      throw ArgumentError("--order must be random or given");
    }
    expected_sum += r.expected_mistakes;
    realized_sum += static_cast<double>(r.realized_mistakes);
    runs.push_back(to_json(r));
  }
  const double n = static_cast<double>(trials);
  const json j{{"trials", trials},
               {"seed", seed},
               {"bound_constant", kOnlineBoundConstant},
               {"mean_expected_mistakes", expected_sum / n},
               {"mean_realized_mistakes", realized_sum / n},
               {"runs", runs}};
  write_json(output, j, ctx.out);
}

void report_error(std::ostream& err, const std::string& kind, int code, const std::string& msg) {
  err << json{{"error", kind}, {"exit_code", code}, {"message", msg}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edge-sign prediction in signed directed graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));

  // Shared option storage; each run handles a single subcommand.
  std::string input, output, method = "lprop", model_file, pred_file, params_file, topology = "er:10",
                             prior = "uniform", order = "random", csv, markdown;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> adversary;
  double fraction = 0.0, tol = BoxLsOptions{}.tol;
  std::size_t nodes = 0, trials = 1;
  bool no_timing = false, full_pass = false;
  SplitArgs split_args;
  SolverArgs solver;

  auto* ingest = app.add_subcommand("ingest", "load and clean an edge list; report |V|, |E|, positive fraction");
  ingest->add_option("input", input, "edge list")->required();
  ingest->add_option("-o,--out", output, "graph output (.json or edge list)");

  auto* stats = app.add_subcommand("stats", "regularity measures of a graph");
  stats->add_option("graph", input)->required();
  stats->add_option("-o,--out", output);
  stats->add_option("--tol", tol, "box least-squares tolerance")->check(CLI::PositiveNumber);

  auto* split = app.add_subcommand("split", "sample a training split");
  split->add_option("graph", input)->required();
  split->add_option("--fraction", fraction)->required();
  split->add_option("--seed", seed)->required();
  split->add_option("-o,--out", output);

  auto* train = app.add_subcommand("train", "fit a method on a split; score the test edges");
  train->add_option("graph", input)->required();
  train->add_option("-m,--method", method, "blc | logreg | lprop | unreg | bayes");
  add_split_options(train, split_args);
  add_solver_options(train, solver);
  train->add_option("--params", params_file, "generative parameters (bayes method)");
  train->add_option("--model", model_file, "model output");
  train->add_option("--predictions", pred_file, "test-edge predictions output (CSV)");
  train->add_option("-o,--out", output, "summary output");

  auto* predict_cmd = app.add_subcommand("predict", "predict with a saved model");
  predict_cmd->add_option("graph", input)->required();
  predict_cmd->add_option("--model", model_file)->required();
  add_split_options(predict_cmd, split_args);
  predict_cmd->add_option("-o,--out", output, "CSV output");

  auto* eval = app.add_subcommand("eval", "score a prediction CSV against the graph's labels");
  eval->add_option("graph", input)->required();
  eval->add_option("--predictions", pred_file)->required();
  eval->add_option("-o,--out", output);

  auto* sweep = app.add_subcommand("sweep", "run an experiment spec");
  sweep->add_option("spec", input)->required();
  sweep->add_option("--seed", seed, "overrides base_seed");
  sweep->add_flag("--no-timing", no_timing, "omit timings (byte-identical reports)");
  sweep->add_option("-o,--out", output, "JSON report");
  sweep->add_option("--csv", csv, "CSV report");
  sweep->add_option("--markdown", markdown, "Markdown table");

  auto* synth = app.add_subcommand("synth", "sample a synthetic graph from the generative model");
  synth->add_option("--nodes", nodes)->required();
  synth->add_option("--topology", topology, "er:D | out:D | regular:D");
  synth->add_option("--prior", prior, "uniform | beta:ap,bp,aq,bq | twopoint:lo,hi,w[,qlo,qhi,qw]");
  synth->add_option("--seed", seed)->required();
  synth->add_option("-o,--out", output, "graph output (.json or edge list)")->required();
  synth->add_option("--params", params_file, "generative parameters output");

  auto* online = app.add_subcommand("online", "simulate the online learner");
  online->add_option("graph", input)->required();
  online->add_option("--order", order, "random | given");
  online->add_option("--adversary", adversary, "adversary budget K");
  online->add_option("--trials", trials);
  online->add_option("--seed", seed)->required();
  online->add_flag("--full-pass", full_pass, "append the unrevealed positives after the forced rounds");
  online->add_option("-o,--out", output);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    report_error(err, "argument", 2, ex.what());
    return 2;
  }

  Context ctx{out, threads};
  try {
    if (*ingest) cmd_ingest(ctx, input, output);
    else if (*stats) cmd_stats(ctx, input, output, tol);
    else if (*split) cmd_split(ctx, input, fraction, *seed, output);
    else if (*train) cmd_train(ctx, input, method, split_args, solver, params_file, model_file, pred_file, output);
    else if (*predict_cmd) cmd_predict(ctx, input, model_file, split_args, output);
    else if (*eval) cmd_eval(ctx, input, pred_file, output);
    else if (*sweep) cmd_sweep(ctx, input, seed, no_timing, output, csv, markdown);
    else if (*synth) cmd_synth(ctx, nodes, topology, prior, *seed, output, params_file);
    else if (*online) cmd_online(ctx, input, order, adversary, trials, *seed, full_pass, output);
    return 0;
  } catch (const ArgumentError& ex) {
    report_error(err, "argument", ex.exit_code(), ex.what());
    return ex.exit_code();
  } catch (const ProtocolError& ex) {
    report_error(err, "protocol", ex.exit_code(), ex.what());
    return ex.exit_code();
  } catch (const DataError& ex) {
    report_error(err, "data", ex.exit_code(), ex.what());
    return ex.exit_code();
  } catch (const ConvergenceError& ex) {
    report_error(err, "convergence", ex.exit_code(), ex.what());
    return ex.exit_code();
  } catch (const std::exception& ex) {
    report_error(err, "internal", 1, ex.what());
    return 1;
  }
}

}  // namespace edgesign::cli
