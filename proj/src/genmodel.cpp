#include "edgesign/genmodel.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

namespace edgesign {

namespace {

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ArgumentError("not a number: '" + tok + "'");
    }
  }
  return out;
}

std::pair<std::string, std::string> split_kind(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {text, ""};
  return {text.substr(0, colon), text.substr(colon + 1)};
}

void validate_two_point(const TwoPoint& t) {
  if (!(0.0 <= t.lo && t.lo <= t.hi && t.hi <= 1.0))
    throw ArgumentError("two-point prior needs 0 <= lo <= hi <= 1");
  if (!(t.weight >= 0.0 && t.weight <= 1.0))
    throw ArgumentError("two-point prior weight must lie in [0,1]");
}

double draw_beta(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

double draw_two_point(std::mt19937_64& rng, const TwoPoint& t) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < t.weight ? t.hi : t.lo;
}

nlohmann::json prior_to_json(const PriorSpec& prior) {
  return std::visit(
      [](const auto& pr) -> nlohmann::json {
        using T = std::decay_t<decltype(pr)>;
        if constexpr (std::is_same_v<T, UniformPrior>) {
          return {{"kind", "uniform"}};
        } else if constexpr (std::is_same_v<T, BetaPrior>) {
          return {{"kind", "beta"}, {"a_p", pr.a_p}, {"b_p", pr.b_p}, {"a_q", pr.a_q}, {"b_q", pr.b_q}};
        } else {
          return {{"kind", "twopoint"},
                  {"p", {{"lo", pr.p.lo}, {"hi", pr.p.hi}, {"weight", pr.p.weight}}},
                  {"q", {{"lo", pr.q.lo}, {"hi", pr.q.hi}, {"weight", pr.q.weight}}}};
        }
      },
      prior);
}

PriorSpec prior_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return UniformPrior{};
  if (kind == "beta")
    return BetaPrior{j.at("a_p").get<double>(), j.at("b_p").get<double>(), j.at("a_q").get<double>(),
                     j.at("b_q").get<double>()};
  if (kind == "twopoint") {
    auto tp = [](const nlohmann::json& t) {
      return TwoPoint{t.at("lo").get<double>(), t.at("hi").get<double>(), t.at("weight").get<double>()};
    };
    return TwoPointPrior{tp(j.at("p")), tp(j.at("q"))};
  }
  throw DataError("unknown prior kind '" + kind + "'");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PriorSpec parse_prior(const std::string& text) {
  const auto [kind, args] = split_kind(text);
  const auto nums = args.empty() ? std::vector<double>{} : parse_numbers(args);
  PriorSpec prior;
  if (kind == "uniform" && nums.empty()) {
    prior = UniformPrior{};
  } else if (kind == "beta" && nums.size() == 4) {
    prior = BetaPrior{nums[0], nums[1], nums[2], nums[3]};
  } else if (kind == "twopoint" && nums.size() == 3) {
    const TwoPoint t{nums[0], nums[1], nums[2]};
    prior = TwoPointPrior{t, t};
  } else if (kind == "twopoint" && nums.size() == 6) {
    prior = TwoPointPrior{{nums[0], nums[1], nums[2]}, {nums[3], nums[4], nums[5]}};
  } else {
    throw ArgumentError("bad prior spec '" + text + "'");
  }
  validate(prior);
  return prior;
}

std::string describe(const PriorSpec& prior) {
  // Same syntax parse_prior accepts, with round-trip precision.
  const auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  if (std::holds_alternative<UniformPrior>(prior)) return "uniform";
  if (const auto* b = std::get_if<BetaPrior>(&prior))
    return "beta:" + num(b->a_p) + "," + num(b->b_p) + "," + num(b->a_q) + "," + num(b->b_q);
  const auto& t = std::get<TwoPointPrior>(prior);
  std::string s = "twopoint:" + num(t.p.lo) + "," + num(t.p.hi) + "," + num(t.p.weight);
  if (t.q.lo != t.p.lo || t.q.hi != t.p.hi || t.q.weight != t.p.weight)
    s += "," + num(t.q.lo) + "," + num(t.q.hi) + "," + num(t.q.weight);
  return s;
}

void validate(const PriorSpec& prior) {
  if (const auto* b = std::get_if<BetaPrior>(&prior)) {
    if (!(b->a_p > 0 && b->b_p > 0 && b->a_q > 0 && b->b_q > 0))
      throw ArgumentError("beta prior shapes must be positive");
  } else if (const auto* t = std::get_if<TwoPointPrior>(&prior)) {
    validate_two_point(t->p);
    validate_two_point(t->q);
  }
}

GenParams sample_params(std::size_t n, const PriorSpec& prior, std::uint64_t seed) {
  validate(prior);
  GenParams out;
  out.prior = prior;
  out.seed = seed;
  out.p.resize(n);
  out.q.resize(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::visit(
        [&](const auto& pr) {
          using T = std::decay_t<decltype(pr)>;
          if constexpr (std::is_same_v<T, UniformPrior>) {
            out.p[i] = unit(rng);
            out.q[i] = unit(rng);
          } else if constexpr (std::is_same_v<T, BetaPrior>) {
            out.p[i] = draw_beta(rng, pr.a_p, pr.b_p);
            out.q[i] = draw_beta(rng, pr.a_q, pr.b_q);
          } else {
            out.p[i] = draw_two_point(rng, pr.p);
            out.q[i] = draw_two_point(rng, pr.q);
          }
        },
        prior);
  }
  return out;
}

nlohmann::json to_json(const GenParams& params) {
  return {{"format", "edgesign-params"}, {"version", 1},        {"p", params.p},
          {"q", params.q},              {"prior", prior_to_json(params.prior)}, {"seed", params.seed}};
}

GenParams params_from_json(const nlohmann::json& j) {
  try {
    GenParams out;
    out.p = j.at("p").get<std::vector<double>>();
    out.q = j.at("q").get<std::vector<double>>();
    if (out.p.size() != out.q.size()) throw DataError("params p and q differ in length");
    out.prior = prior_from_json(j.at("prior"));
    out.seed = j.at("seed").get<std::uint64_t>();
    return out;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed params: ") + ex.what());
  }
}

std::vector<Sign> sample_labels(const SignedDigraph& topology, const GenParams& params,
                                std::uint64_t seed) {
  if (params.p.size() != topology.node_count() || params.q.size() != topology.node_count())
    throw ArgumentError("params length does not match node count");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Sign> labels(topology.edge_count());
  for (EdgeId e = 0; e < topology.edge_count(); ++e) {
    const Edge& ed = topology.edge(e);
    const double eta = 0.5 * (params.p[ed.src] + params.q[ed.dst]);
    labels[e] = unit(rng) < eta ? Sign::positive : Sign::negative;
  }
  return labels;
}

Sign bayes_predict(const GenParams& params, NodeId i, NodeId j) {
  return sign_of(params.p[i] + params.q[j] - 1.0);
}

EdgeRates edge_rates(const SignedDigraph& g, const GenParams& params, NodeId node) {
  EdgeRates r;
  if (const auto out = g.out_edges(node); !out.empty()) {
    double sum = 0.0;
    for (EdgeId e : out) sum += params.q[g.edge(e).dst];
    r.out_rate = 0.5 * (params.p[node] + sum / static_cast<double>(out.size()));
  }
  if (const auto in = g.in_edges(node); !in.empty()) {
    double sum = 0.0;
    for (EdgeId e : in) sum += params.p[g.edge(e).src];
    r.in_rate = 0.5 * (params.q[node] + sum / static_cast<double>(in.size()));
  }
  return r;
}

// ---------------------------------------------------------------------------

TopologySpec parse_topology(const std::string& text) {
  const auto [kind, args] = split_kind(text);
  const auto nums = parse_numbers(args);
  if (nums.size() != 1 || !(nums[0] > 0)) throw ArgumentError("bad topology spec '" + text + "'");
  if (kind == "er") return ErdosRenyiTopology{nums[0]};
  const auto d = static_cast<std::size_t>(nums[0]);
  if (static_cast<double>(d) != nums[0]) throw ArgumentError("degree must be an integer");
  if (kind == "out") return ConstantOutDegreeTopology{d};
  if (kind == "regular") return RegularTopology{d};
  throw ArgumentError("bad topology spec '" + text + "'");
}

std::string describe(const TopologySpec& topology) {
  return std::visit(
      [](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, ErdosRenyiTopology>) os << "er:" << t.mean_out_degree;
        else if constexpr (std::is_same_v<T, ConstantOutDegreeTopology>) os << "out:" << t.degree;
        else os << "regular:" << t.degree;
        return os.str();
      },
      topology);
}

std::vector<Edge> generate_topology(std::size_t n, const TopologySpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  if (n < 2) return edges;
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));

  if (const auto* er = std::get_if<ErdosRenyiTopology>(&spec)) {
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
    const auto m = static_cast<std::size_t>(std::llround(er->mean_out_degree * static_cast<double>(n)));
    if (static_cast<double>(m) > 0.5 * pairs)
      throw ArgumentError("Erdos-Renyi mean degree too high for rejection sampling");
    std::unordered_set<std::uint64_t> used;
    used.reserve(2 * m);
    edges.reserve(m);
    while (edges.size() < m) {
      const NodeId a = node(rng), b = node(rng);
      if (a == b) continue;
      if (used.insert((static_cast<std::uint64_t>(a) << 32) | b).second) edges.push_back({a, b});
    }
  } else if (const auto* co = std::get_if<ConstantOutDegreeTopology>(&spec)) {
    if (co->degree >= n) throw ArgumentError("out-degree must be below node count");
    std::vector<NodeId> pool(n - 1);
    edges.reserve(n * co->degree);
    for (NodeId i = 0; i < n; ++i) {
      // Partial shuffle over all nodes except i.
      for (NodeId k = 0, v = 0; v < n; ++v)
        if (v != i) pool[k++] = v;
      for (std::size_t t = 0; t < co->degree; ++t) {
        std::uniform_int_distribution<std::size_t> pick(t, pool.size() - 1);
        std::swap(pool[t], pool[pick(rng)]);
        edges.push_back({i, pool[t]});
      }
    }
  } else {
    const auto& rg = std::get<RegularTopology>(spec);
    if (rg.degree >= n) throw ArgumentError("degree must be below node count");
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    edges.reserve(n * rg.degree);
    for (std::size_t pos = 0; pos < n; ++pos)
      for (std::size_t k = 1; k <= rg.degree; ++k)
        edges.push_back({perm[pos], perm[(pos + k) % n]});
  }
  return edges;
}

SyntheticData synthesize(std::size_t n, const TopologySpec& topology, const PriorSpec& prior,
                         std::uint64_t seed) {
  auto edges = generate_topology(n, topology, derive_seed(seed, 0));
  std::vector<Sign> placeholder(edges.size(), Sign::positive);
  SignedDigraph shape(n, std::move(edges), std::move(placeholder));
  GenParams params = sample_params(n, prior, derive_seed(seed, 1));
  auto labels = sample_labels(shape, params, derive_seed(seed, 2));
  return {shape.relabeled(std::move(labels)), std::move(params)};
}

}  // namespace edgesign
