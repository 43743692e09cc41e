#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgesign/batch.hpp"
#include "edgesign/features.hpp"
#include "edgesign/genmodel.hpp"
#include "json.hpp"

namespace edgesign {

struct SyntheticSpec {
  std::size_t nodes = 500;
  TopologySpec topology = ErdosRenyiTopology{10};
  PriorSpec prior = TwoPointPrior{{0.1, 0.9, 0.5}, {0.1, 0.9, 0.5}};
  std::uint64_t seed = 0;
};

struct ExperimentSpec {
  std::optional<std::string> dataset;      // graph file
  std::optional<SyntheticSpec> synthetic;  // exactly one of the two
  std::vector<Method> methods{Method::blc, Method::logreg, Method::lprop};
  std::vector<double> fractions{0.05, 0.10, 0.15, 0.20, 0.25};
  std::size_t repetitions = 12;
  std::uint64_t base_seed = 0;
  unsigned threads = 1;
  bool timing = true;       // off: reports are byte-identical across runs
  bool regularity = true;   // include the dataset's regularity report
  FitOptions fit;
};

/// Reads a sweep spec. Keys: dataset | synthetic {nodes, topology, prior,
/// seed}; methods; fractions; repetitions; base_seed; threads; timing;
/// regularity; lp_tol; lp_max_sweeps; unreg_tol.
ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentSpec& spec);
void validate(const ExperimentSpec& spec);

struct CellResult {
  Method method = Method::blc;
  double fraction = 0.0;
  std::vector<double> mcc;       // per repetition, NaN on failure
  std::vector<double> accuracy;  // per repetition, NaN on failure
  std::vector<double> seconds;   // fit + predict wall time, when timed
  std::vector<std::string> failures;  // "rep N: message"

  std::size_t succeeded() const;
  double mcc_mean() const;
  double mcc_std() const;  // sample standard deviation; 0 for one value
  double accuracy_mean() const;
  double seconds_mean() const;
};

struct ExperimentReport {
  std::string source;  // dataset path or synthetic descriptor
  std::size_t nodes = 0, edges = 0;
  double positive_fraction = 0.0;
  std::optional<RegularityReport> regularity;
  std::size_t repetitions = 0;
  std::uint64_t base_seed = 0;
  bool timed = false;
  std::vector<CellResult> cells;  // method-major, fractions in spec order

  const CellResult& cell(Method m, double fraction) const;
};

/// Seed of repetition r.
inline std::uint64_t repetition_seed(std::uint64_t base_seed, std::size_t r) { return base_seed ^ r; }

/// Each repetition r draws one split per fraction with seed base_seed ^ r,
/// fits every method on it and scores the test edges. A method failing on
/// one repetition only blanks that cell entry.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Same, on an already loaded graph. `oracle` enables the bayes method.
ExperimentReport run_experiment(const ExperimentSpec& spec, const SignedDigraph& g,
                                const GenParams* oracle, const std::string& source);

nlohmann::json to_json(const ExperimentReport& r);
/// One row per method x fraction.
void write_report_csv(const ExperimentReport& r, std::ostream& out);
/// Methods as rows, fractions as columns, "mean ± std" of MCC.
void write_report_markdown(const ExperimentReport& r, std::ostream& out);

// ---------------------------------------------------------------------------

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool degenerate = false;  // zero variance of the differences
};

/// Two-sided paired Student t-test. Errors: lengths differ or below 2.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace edgesign
