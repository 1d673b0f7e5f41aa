#include "ctree/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ios>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctree/chain.hpp"
#include "ctree/construction.hpp"
#include "ctree/errors.hpp"
#include "ctree/experiments.hpp"
#include "ctree/exponents.hpp"
#include "ctree/mast.hpp"
#include "ctree/newick.hpp"
#include "ctree/samplers.hpp"

namespace ctree {

namespace {

std::string fmt(double x, const char* spec = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::ios_base::failure("cannot write " + path);
  return f;
}

std::pair<Tree, Tree> read_pair(const std::string& path) {
  auto trees = read_newick_file(path);
  if (trees.size() != 2) {
    throw std::invalid_argument(path + ": expected 2 trees, found " + std::to_string(trees.size()));
  }
  return {std::move(trees[0]), std::move(trees[1])};
}

std::string join_labels(const std::vector<Label>& labels) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) s += (i ? "," : "") + labels[i].to_string();
  return s;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Common subtrees of random binary trees"};
  app.require_subcommand(1);

  int gen_n = 6;
  int gen_count = 1;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "Uniform random trees on labels 1..n, one Newick line each");
  gen->add_option("--n", gen_n, "Number of leaves")->required()->check(CLI::Range(1, 1 << 20));
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->add_option("--count", gen_count, "Number of trees")->check(CLI::PositiveNumber);

  std::string trees_path;
  auto* mast_cmd = app.add_subcommand("mast", "Maximum agreement subtree of two trees");
  mast_cmd->add_option("--trees", trees_path, "File with two Newick trees")->required();

  int cutoff = 10;
  std::uint64_t seed = 1;
  std::string trace_path;
  auto* construct = app.add_subcommand("construct", "Randomized recursive common subtree");
  construct->add_option("--trees", trees_path, "File with two Newick trees")->required();
  construct->add_option("--cutoff", cutoff, "Cutoff size K")->check(CLI::Range(2, 1 << 30));
  construct->add_option("--seed", seed, "Master seed");
  construct->add_option("--trace", trace_path, "Per-item trace CSV");

  int chain_n = 1000;
  std::size_t runs = 10000;
  std::string start_name = "stage0";
  auto* chain = app.add_subcommand("chain", "Estimate q(n, K) from the size chain");
  chain->add_option("--n", chain_n, "Starting size")->required();
  chain->add_option("--cutoff", cutoff, "Cutoff size K")->check(CLI::Range(2, 1 << 30));
  chain->add_option("--runs", runs, "Chain runs")->check(CLI::PositiveNumber);
  chain->add_option("--seed", seed, "Master seed");
  chain->add_option("--start", start_name, "stage0 (exact first step) or n-4")
      ->check(CLI::IsMember({"stage0", "n-4"}));

  int t_max = 3;
  std::size_t samples = 100000;
  auto* martingale = app.add_subcommand("martingale", "Monte Carlo check of the fragmentation martingale");
  martingale->add_option("--tmax", t_max, "Largest t")->check(CLI::Range(1, 5));
  martingale->add_option("--samples", samples, "Paths")->check(CLI::Range(std::size_t{1000}, std::size_t{1} << 40));
  martingale->add_option("--seed", seed, "Master seed");

  std::string beta_mode = "random";
  double tolerance = 1e-6;
  auto* beta = app.add_subcommand("beta", "Solve an exponent equation");
  beta->add_option("--mode", beta_mode, "random or centroid")->check(CLI::IsMember({"random", "centroid"}));
  beta->add_option("--tolerance", tolerance, "Bisection tolerance (centroid)")->check(CLI::Range(1e-6, 0.1));

  ExperimentConfig cfg;
  std::string mode_name = "construct";
  std::string format_name = "csv";
  auto* experiment = app.add_subcommand("experiment", "Scaling and consistency experiments");
  experiment->add_option("--mode", mode_name, "construct, mast, chain or martingale")
      ->check(CLI::IsMember({"construct", "mast", "chain", "martingale"}));
  experiment->add_option("--sizes", cfg.sizes, "Increasing sizes, comma separated")->delimiter(',');
  experiment->add_option("--cutoff", cfg.cutoff, "Cutoff size K")->check(CLI::Range(2, 1 << 30));
  experiment->add_option("--reps", cfg.replications, "Replications per size")->check(CLI::PositiveNumber);
  experiment->add_option("--seed", cfg.master_seed, "Master seed");
  experiment->add_option("--chain-runs", cfg.chain_runs, "Chain runs (chain) or paths (martingale)");
  experiment->add_option("--out", cfg.output_path, "Output file (default stdout)");
  experiment->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  experiment->add_option("--workers", cfg.workers, "Worker threads (0 = all cores); never changes output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      out << "# gen n=" << gen_n << " seed=" << gen_seed << " count=" << gen_count << '\n';
      Rng rng(gen_seed);
      const auto labels = original_labels(static_cast<std::size_t>(gen_n));
      for (int i = 0; i < gen_count; ++i) out << to_newick(random_tree(labels, rng)) << '\n';
    } else if (*mast_cmd) {
      auto [a, b] = read_pair(trees_path);
      const MastResult r = mast(a, b);
      out << "# mast trees=" << trees_path << '\n'
          << "size=" << r.size << '\n'
          << "witness=" << join_labels(r.witness) << '\n'
          << "subtree=" << to_newick(induced_subtree(a, r.witness)) << '\n';
    } else if (*construct) {
      auto [a, b] = read_pair(trees_path);
      Rng rng(seed);
      const ConstructionOutput o = run_construction(a, b, cutoff, rng);
      out << "# construct trees=" << trees_path << " cutoff=" << cutoff << " seed=" << seed;
      if (!trace_path.empty()) out << " trace=" << trace_path;
      out << '\n'
          << "size=" << o.picked.size() << '\n'
          << "picked=" << join_labels(o.picked) << '\n'
          << "subtree=" << to_newick(o.subtree) << '\n';
      if (!trace_path.empty()) {
        auto f = open_output(trace_path);
        write_trace_csv(f, o);
      }
    } else if (*chain) {
      const ChainStart start = start_name == "n-4" ? ChainStart::kNMinus4 : ChainStart::kStageZero;
      Rng rng(seed);
      const QEstimate q = estimate_q(chain_n, cutoff, runs, rng, start);
      nlohmann::ordered_json j;
      j["config"] = {{"n", chain_n}, {"cutoff", cutoff}, {"runs", runs}, {"seed", seed}, {"start", start_name}};
      j["q_hat"] = q.q_hat;
      j["std_error"] = q.std_error;
      out << j.dump(2) << '\n';
    } else if (*martingale) {
      Rng rng(seed);
      out << "# martingale tmax=" << t_max << " samples=" << samples << " seed=" << seed << '\n'
          << "t,estimate,std_error\n";
      for (const auto& p : martingale_check(t_max, samples, rng)) {
        out << p.t << ',' << fmt(p.estimate) << ',' << fmt(p.std_error) << '\n';
      }
    } else if (*beta) {
      out << "# beta mode=" << beta_mode;
      if (beta_mode == "centroid") out << " tolerance=" << tolerance;
      out << '\n';
      const double b = beta_mode == "random" ? solve_beta_random() : solve_beta_centroid(tolerance);
      out << fmt(b, "%.12f") << '\n';
    } else if (*experiment) {
      cfg.mode = parse_mode(mode_name);
      cfg.output_format = parse_format(format_name);
      if (cfg.output_path.empty()) {
        run_experiment(cfg, out);
      } else {
        std::ostringstream buffer;
        run_experiment(cfg, buffer);
        auto f = open_output(cfg.output_path);
        f << buffer.str();
        if (!f) throw std::ios_base::failure("cannot write " + cfg.output_path);
        out << "# experiment mode=" << mode_name << " seed=" << cfg.master_seed << " wrote " << cfg.output_path
            << '\n';
      }
    }
  } catch (const GuardError& e) {
    err << "error: " << e.what() << '\n';
    return kExitGuard;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace ctree
