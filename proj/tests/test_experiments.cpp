#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ctree/cli.hpp"
#include "ctree/errors.hpp"
#include "ctree/experiments.hpp"
#include "ctree/newick.hpp"
#include "ctree/rng.hpp"

using namespace ctree;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ctree_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.sizes = {16, 32, 64};
  cfg.replications = 20;
  cfg.cutoff = 4;
  cfg.master_seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.sizes = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.sizes = {32, 16};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.replications = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.cutoff = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK(parse_mode("mast") == ExperimentMode::kMast);
  CHECK_THROWS_AS(parse_mode("nope"), std::invalid_argument);
  CHECK(parse_format("json") == OutputFormat::kJson);
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("scaling construct") {
  ExperimentConfig cfg = small_config();
  const ScalingResult r = run_scaling_construct(cfg);
  REQUIRE(r.per_size.size() == 3);
  CHECK(r.replicates.size() == 60);
  CHECK(r.has_fit);
  CHECK(r.replicates[21].n == 32);
  CHECK(r.replicates[21].replicate == 1);
  CHECK(r.replicates[21].seed_sub == substream_seed(99, 32, 1));
  for (const auto& s : r.per_size) CHECK(s.mean_size >= 1.0);

  cfg.workers = 1;
  const ScalingResult serial = run_scaling_construct(cfg);
  cfg.workers = 4;
  const ScalingResult pooled = run_scaling_construct(cfg);
  for (std::size_t i = 0; i < serial.replicates.size(); ++i) {
    CHECK(serial.replicates[i].size == pooled.replicates[i].size);
  }
  CHECK(serial.fitted_slope == pooled.fitted_slope);

  cfg.sizes = {16, 32};
  CHECK_FALSE(run_scaling_construct(cfg).has_fit);
}

TEST_CASE("standard error shrinks like one over root R") {
  ExperimentConfig cfg;
  cfg.sizes = {64};
  cfg.cutoff = 4;
  cfg.replications = 100;
  const double se100 = run_scaling_construct(cfg).per_size[0].std_error;
  cfg.replications = 400;
  const double se400 = run_scaling_construct(cfg).per_size[0].std_error;
  CHECK(se100 / se400 > 1.6);
  CHECK(se100 / se400 < 2.5);
}

TEST_CASE("scaling mast") {
  ExperimentConfig cfg = small_config();
  cfg.mode = ExperimentMode::kMast;
  const ScalingResult kappa = run_scaling_mast(cfg);
  const ScalingResult built = run_scaling_construct(cfg);
  for (std::size_t i = 0; i < kappa.replicates.size(); ++i) {
    CHECK(kappa.replicates[i].size >= 3);
    // Same substream, same input trees: the construction is a feasible answer.
    CHECK(kappa.replicates[i].size >= built.replicates[i].size);
  }
  cfg.sizes = {64, 257};
  CHECK_THROWS_AS(run_scaling_mast(cfg), GuardError);
}

TEST_CASE("chain versus construction accounting") {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::kChain;
  cfg.sizes = {100};
  cfg.cutoff = 6;
  cfg.replications = 200;
  cfg.chain_runs = 20000;
  const auto reports = run_chain_vs_construction(cfg);
  REQUIRE(reports.size() == 1);
  const SandwichReport& r = reports[0];
  CHECK(r.total_picked == r.leaf_hits);
  CHECK(r.accounting_exact());
  CHECK(r.q_hat > 0.0);
  CHECK(std::abs(r.q_hat - r.q_construct) <= 4 * std::hypot(r.q_std_error, r.q_construct_std_error));
  CHECK(r.sandwich_holds());
  cfg.sizes = {2001};
  CHECK_THROWS_AS(run_chain_vs_construction(cfg), GuardError);
}

TEST_CASE("experiment output formats") {
  ExperimentConfig cfg = small_config();
  std::ostringstream csv;
  run_experiment(cfg, csv);
  const std::string text = csv.str();
  CHECK(text.rfind("# ctree experiment\n# mode=construct\n# sizes=16,32,64\n", 0) == 0);
  CHECK(text.find("# master_seed=99\n") != std::string::npos);
  CHECK(text.find("\nn,replicate,size,seed_sub,std_error\n") != std::string::npos);
  CHECK(text.find("\n16,-1,") != std::string::npos);
  CHECK(text.find("# fit_slope=") != std::string::npos);

  cfg.output_format = OutputFormat::kJson;
  std::ostringstream js;
  run_experiment(cfg, js);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j["config"]["master_seed"] == 99);
  CHECK(j["rows"].size() == 63);
  CHECK(j["rows"][20]["replicate"] == -1);
  CHECK(j.contains("fit"));

  // CSV and JSON carry the same rows.
  std::istringstream lines(text);
  std::string line;
  std::size_t data_rows = 0;
  bool past_header = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!past_header) {
      past_header = true;
      continue;
    }
    ++data_rows;
  }
  CHECK(data_rows == j["rows"].size());

  cfg.mode = ExperimentMode::kMartingale;
  cfg.sizes = {2};
  cfg.chain_runs = 5000;
  cfg.output_format = OutputFormat::kCsv;
  std::ostringstream mart;
  run_experiment(cfg, mart);
  CHECK(mart.str().find("t,estimate,std_error\n0,1,0\n") != std::string::npos);
}

TEST_CASE("experiments are deterministic") {
  for (auto mode : {ExperimentMode::kConstruct, ExperimentMode::kMast, ExperimentMode::kChain}) {
    ExperimentConfig cfg = small_config();
    cfg.mode = mode;
    cfg.chain_runs = 3000;
    std::ostringstream a;
    std::ostringstream b;
    run_experiment(cfg, a);
    cfg.workers = 3;
    run_experiment(cfg, b);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("cli gen and beta") {
  const CliRun gen = cli({"gen", "--n", "6", "--seed", "1"});
  CHECK(gen.code == kExitOk);
  std::istringstream in(gen.out);
  const auto trees = read_newick_lines(in);
  REQUIRE(trees.size() == 1);
  CHECK(trees[0].leaf_count() == 6);
  CHECK(gen.out.find("seed=1") != std::string::npos);

  const CliRun beta = cli({"beta", "--mode", "random"});
  CHECK(beta.code == kExitOk);
  CHECK(beta.out.find("0.3660254") != std::string::npos);
}

TEST_CASE("cli tree commands") {
  const std::string path = temp_path("pair.nwk");
  {
    std::ofstream f(path);
    f << "# two trees\n(1,2,(3,(4,5)));\n(1,3,(2,(4,5)));\n";
  }
  const CliRun m = cli({"mast", "--trees", path});
  CHECK(m.code == kExitOk);
  CHECK(m.out.find("size=4") != std::string::npos);

  const std::string trace = temp_path("trace.csv");
  const CliRun c = cli({"construct", "--trees", path, "--cutoff", "3", "--seed", "4", "--trace", trace});
  CHECK(c.code == kExitOk);
  CHECK(c.out.find("cutoff=3 seed=4") != std::string::npos);
  CHECK(slurp(trace).rfind("item_id,parent_id,depth,m_before,b1,b2,b3,stopped,picked_label\n", 0) == 0);

  const CliRun chain = cli({"chain", "--n", "200", "--cutoff", "10", "--runs", "2000", "--seed", "3"});
  CHECK(chain.code == kExitOk);
  const auto j = nlohmann::json::parse(chain.out);
  CHECK(j["config"]["seed"] == 3);
  CHECK(j["q_hat"].get<double>() > 0.0);

  const CliRun mart = cli({"martingale", "--tmax", "2", "--samples", "2000"});
  CHECK(mart.code == kExitOk);
  CHECK(mart.out.find("t,estimate,std_error") != std::string::npos);
  std::remove(path.c_str());
  std::remove(trace.c_str());
}

TEST_CASE("cli exit codes") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"gen"}).code == kExitUsage);
  CHECK(cli({"beta", "--mode", "median"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"mast", "--trees", "/nonexistent/pair.nwk"}).code == kExitIo);
  CHECK(cli({"experiment", "--mode", "mast", "--sizes", "128,300", "--reps", "1"}).code == kExitGuard);
  CHECK(cli({"experiment", "--sizes", "64,32"}).code == kExitUsage);

  const std::string bad = temp_path("bad.nwk");
  {
    std::ofstream f(bad);
    f << "(1,2,(3,4);\n(1,2,3);\n";
  }
  CHECK(cli({"mast", "--trees", bad}).code == kExitIo);
  std::remove(bad.c_str());
}

TEST_CASE("cli experiment files are byte-identical across runs") {
  const std::string a = temp_path("exp_a.csv");
  const std::string b = temp_path("exp_b.csv");
  const std::vector<std::string> base{"experiment", "--mode", "construct", "--sizes", "128,256,512",
                                      "--cutoff", "10", "--reps", "50", "--seed", "7", "--out"};
  auto args_a = base;
  args_a.push_back(a);
  auto args_b = base;
  args_b.push_back(b);
  CHECK(cli(args_a).code == kExitOk);
  CHECK(cli(args_b).code == kExitOk);
  CHECK_FALSE(slurp(a).empty());
  CHECK(slurp(a) == slurp(b));
  std::remove(a.c_str());
  std::remove(b.c_str());
}
