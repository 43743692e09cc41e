#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "edgesign/features.hpp"
#include "edgesign/graph.hpp"
#include "json.hpp"

using namespace edgesign;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("edgesign-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("ingest reports counts and writes a cleaned graph") {
  TempDir dir;
  std::ofstream(dir / "raw.tsv") << "# comment\na b 1\na b 1\nb c -1\nc c 1\nc a 1\n";
  const auto r = run({"ingest", dir / "raw.tsv", "-o", dir / "g.json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["nodes"] == 3);
  CHECK(j["edges"] == 3);
  CHECK(j["positive_fraction"].get<double>() == doctest::Approx(2.0 / 3));
  CHECK(read_graph_file(dir / "g.json").edge_count() == 3);
}

TEST_CASE("exit codes and structured errors") {
  TempDir dir;
  auto r = run({"ingest", dir / "missing.tsv"});
  CHECK(r.code == 3);
  const auto e = json::parse(r.err);
  CHECK(e["exit_code"] == 3);
  CHECK(e["error"] == "data");

  std::ofstream(dir / "bad.tsv") << "a b 7\n";
  CHECK(run({"ingest", dir / "bad.tsv"}).code == 3);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"stats"}).code == 2);
  CHECK(run({"ingest", dir / "bad.tsv", "--unknown"}).code == 2);
  CHECK(run({"synth", "--nodes", "10", "-o", dir / "x.tsv"}).code == 2);  // no seed
}

TEST_CASE("synth then stats agree with a direct computation") {
  TempDir dir;
  REQUIRE(run({"synth", "--nodes", "150", "--topology", "er:6", "--prior", "uniform", "--seed", "3", "-o",
               dir / "g.tsv", "--params", dir / "params.json"})
              .code == 0);
  const auto r = run({"stats", dir / "g.tsv"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const auto g = read_graph_file(dir / "g.tsv");
  const auto direct = regularity_report(g);
  CHECK(j["psi_g"] == direct.psi_g);
  CHECK(j["psi2"].get<double>() == doctest::Approx(direct.psi2));

  // Same seed, same bytes.
  REQUIRE(run({"synth", "--nodes", "150", "--topology", "er:6", "--prior", "uniform", "--seed", "3", "-o",
               dir / "g2.tsv"})
              .code == 0);
  CHECK(slurp(dir / "g.tsv") == slurp(dir / "g2.tsv"));
}

TEST_CASE("constant out-signs give zero psi_g") {
  TempDir dir;
  REQUIRE(run({"synth", "--nodes", "100", "--prior", "twopoint:1,1,1", "--seed", "4", "-o", dir / "g.json"}).code == 0);
  const auto j = json::parse(run({"stats", dir / "g.json"}).out);
  CHECK(j["psi_g"] == 0);

  REQUIRE(run({"synth", "--nodes", "100", "--prior", "twopoint:0,1,0.5,0.5,0.5,1", "--seed", "4", "-o",
               dir / "h.json"})
              .code == 0);
  // p in {0,1}, q = 1/2: labels are still random, but psi_g matches a direct count.
  const auto h = read_graph_file(dir / "h.json");
  CHECK(json::parse(run({"stats", dir / "h.json"}).out)["psi_g"] == psi_g(h).psi_g);
}

TEST_CASE("train then predict reproduces the scores bit for bit") {
  TempDir dir;
  REQUIRE(run({"synth", "--nodes", "200", "--prior", "twopoint:0.1,0.9,0.5", "--seed", "6", "-o", dir / "g.json",
               "--params", dir / "p.json"})
              .code == 0);
  REQUIRE(run({"split", dir / "g.json", "--fraction", "0.2", "--seed", "7", "-o", dir / "s.json"}).code == 0);
  for (const std::string m : {"blc", "logreg", "lprop", "unreg", "bayes"}) {
    CAPTURE(m);
    std::vector<std::string> args{"train", dir / "g.json", "-m", m, "--split", dir / "s.json", "--model",
                                  dir / (m + ".model"), "--predictions", dir / (m + ".csv")};
    if (m == "bayes") {
      args.push_back("--params");
      args.push_back(dir / "p.json");
    }
    const auto t = run(args);
    REQUIRE(t.code == 0);
    const auto summary = json::parse(t.out);
    CHECK(summary["method"] == m);
    CHECK(summary.contains("test"));
    REQUIRE(run({"predict", dir / "g.json", "--model", dir / (m + ".model"), "--split", dir / "s.json", "-o",
                 dir / (m + ".again.csv")})
                .code == 0);
    CHECK(slurp(dir / (m + ".csv")) == slurp(dir / (m + ".again.csv")));
    const auto e = run({"eval", dir / "g.json", "--predictions", dir / (m + ".csv")});
    REQUIRE(e.code == 0);
    CHECK(json::parse(e.out)["mcc"].get<double>() == doctest::Approx(summary["test"]["mcc"].get<double>()));
  }
  CHECK(run({"train", dir / "g.json", "-m", "bayes", "--split", dir / "s.json"}).code == 2);
  CHECK(run({"train", dir / "g.json", "-m", "lprop", "--fraction", "0.2"}).code == 2);  // seed required
  CHECK(run({"train", dir / "g.json", "-m", "lprop", "--fraction", "0.2", "--seed", "1", "--lp-max-sweeps", "1",
             "--lp-tol", "1e-15"})
            .code == 4);
}

TEST_CASE("data directory fallback") {
  TempDir dir;
  std::ofstream(dir / "tiny.tsv") << "a b 1\nb a -1\n";
  ::setenv("EDGESIGN_DATA_DIR", dir.path.c_str(), 1);
  const auto r = run({"ingest", "tiny.tsv"});
  ::unsetenv("EDGESIGN_DATA_DIR");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["edges"] == 2);
  CHECK(run({"ingest", "tiny.tsv"}).code == 3);
}

TEST_CASE("online subcommand") {
  TempDir dir;
  REQUIRE(run({"synth", "--nodes", "80", "--topology", "er:5", "--seed", "8", "-o", dir / "g.json"}).code == 0);
  CHECK(run({"online", dir / "g.json", "--adversary", "0", "--seed", "1"}).code == 2);
  CHECK(run({"online", dir / "g.json", "--seed", "1", "--order", "sideways"}).code == 2);
  const auto a = run({"online", dir / "g.json", "--trials", "3", "--seed", "9"});
  const auto b = run({"online", dir / "g.json", "--trials", "3", "--seed", "9"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = json::parse(a.out);
  CHECK(j["trials"] == 3);
  const auto adv = run({"online", dir / "g.json", "--adversary", "5", "--trials", "2", "--seed", "9", "--full-pass"});
  REQUIRE(adv.code == 0);
  CHECK(adv.out.find("tail_rounds") != std::string::npos);
}

TEST_CASE("sweep writes the report formats") {
  TempDir dir;
  std::ofstream(dir / "spec.json") << R"({"synthetic": {"nodes": 120, "topology": "er:6", "seed": 2},
    "methods": ["blc", "lprop"], "fractions": [0.2], "repetitions": 2})";
  const auto r = run({"sweep", dir / "spec.json", "--seed", "5", "--no-timing", "-o", dir / "r.json", "--csv",
                      dir / "r.csv", "--markdown", dir / "r.md"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(dir / "r.json"));
  CHECK(j["base_seed"] == 5);
  CHECK(j["cells"].size() == 2);
  CHECK(slurp(dir / "r.csv").find("lprop") != std::string::npos);
  const auto again = run({"sweep", dir / "spec.json", "--seed", "5", "--no-timing", "-o", dir / "r2.json"});
  REQUIRE(again.code == 0);
  CHECK(slurp(dir / "r.json") == slurp(dir / "r2.json"));
  CHECK(run({"--threads", "2", "sweep", dir / "spec.json", "--seed", "5", "--no-timing", "-o", dir / "r3.json"})
            .code == 0);
  CHECK(slurp(dir / "r.json") == slurp(dir / "r3.json"));
}
