#include "ctree/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ctree/chain.hpp"
#include "ctree/construction.hpp"
#include "ctree/errors.hpp"
#include "ctree/mast.hpp"
#include "ctree/samplers.hpp"
#include "ctree/stats.hpp"
#include "ctree/tree.hpp"

namespace ctree {

std::string to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kConstruct: return "construct";
    case ExperimentMode::kMast: return "mast";
    case ExperimentMode::kChain: return "chain";
    case ExperimentMode::kMartingale: return "martingale";
  }
  return "?";
}

std::string to_string(OutputFormat format) { return format == OutputFormat::kCsv ? "csv" : "json"; }

ExperimentMode parse_mode(const std::string& text) {
  for (auto m : {ExperimentMode::kConstruct, ExperimentMode::kMast, ExperimentMode::kChain,
                 ExperimentMode::kMartingale}) {
    if (to_string(m) == text) return m;
  }
  throw std::invalid_argument("unknown experiment mode '" + text + "'");
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::kCsv;
  if (text == "json") return OutputFormat::kJson;
  throw std::invalid_argument("unknown output format '" + text + "'");
}

void ExperimentConfig::validate() const {
  if (sizes.empty()) throw std::invalid_argument("sizes must be nonempty");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) throw std::invalid_argument("sizes must be increasing");
  }
  if (sizes.front() < 1) throw std::invalid_argument("sizes must be positive");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (cutoff < 2) throw std::invalid_argument("cutoff must be >= 2");
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

constexpr std::uint64_t kChainSalt = 0xC4A1'0000'0000'0001ULL;
constexpr std::size_t kChainBlock = 1000;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

template <typename MeasureFn>
ScalingResult run_scaling(const ExperimentConfig& cfg, MeasureFn measure) {
  cfg.validate();
  const auto reps = static_cast<std::size_t>(cfg.replications);
  ScalingResult result;
  result.replicates.resize(cfg.sizes.size() * reps);
  parallel_for(result.replicates.size(), cfg.workers, [&](std::size_t k) {
    const int n = cfg.sizes[k / reps];
    const int r = static_cast<int>(k % reps);
    ReplicateRecord& rec = result.replicates[k];
    rec.n = n;
    rec.replicate = r;
    rec.seed_sub = substream_seed(cfg.master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
    Rng rng(rec.seed_sub);
    const auto labels = original_labels(static_cast<std::size_t>(n));
    const Tree left = random_tree(labels, rng);
    const Tree right = random_tree(labels, rng);
    rec.size = measure(left, right, rng);
  });

  std::vector<double> log_n;
  std::vector<double> log_mean;
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    RunningStats s;
    for (std::size_t r = 0; r < reps; ++r) s.add(static_cast<double>(result.replicates[i * reps + r].size));
    result.per_size.push_back({cfg.sizes[i], s.mean(), s.std_error(), cfg.replications});
    log_n.push_back(std::log(static_cast<double>(cfg.sizes[i])));
    log_mean.push_back(std::log(s.mean()));
  }
  if (cfg.sizes.size() >= 3) {
    const LineFit fit = fit_line(log_n, log_mean);
    result.has_fit = true;
    result.fitted_slope = fit.slope;
    result.fitted_intercept = fit.intercept;
    result.slope_std_error = fit.slope_std_error;
  }
  return result;
}

}  // namespace

ScalingResult run_scaling_construct(const ExperimentConfig& cfg) {
  return run_scaling(cfg, [&](const Tree& a, const Tree& b, Rng& rng) {
    return run_construction(a, b, cfg.cutoff, rng).picked.size();
  });
}

ScalingResult run_scaling_mast(const ExperimentConfig& cfg) {
  for (int n : cfg.sizes) {
    if (n > kMaxScalingMastSize) {
      throw GuardError("mast scaling is limited to n <= " + std::to_string(kMaxScalingMastSize));
    }
  }
  return run_scaling(cfg, [](const Tree& a, const Tree& b, Rng&) { return mast(a, b).size; });
}

bool SandwichReport::accounting_exact() const {
  return total_picked == leaf_hits && std::abs(n * p_hat - mean_size) <= 1e-9 * std::max(1.0, mean_size);
}

bool SandwichReport::sandwich_holds(double sigmas) const {
  const double k1 = cutoff - 1.0;
  const double lower_se = std::hypot(p_std_error, q_std_error / k1);
  const double upper_se = std::hypot(p_std_error, q_std_error);
  return q_hat / k1 <= p_hat + sigmas * lower_se && p_hat <= q_hat + sigmas * upper_se;
}

std::vector<SandwichReport> run_chain_vs_construction(const ExperimentConfig& cfg) {
  cfg.validate();
  for (int n : cfg.sizes) {
    if (n > kMaxSandwichSize) {
      throw GuardError("chain vs construction is limited to n <= " + std::to_string(kMaxSandwichSize));
    }
    if (n < 5 || n < cfg.cutoff) throw std::invalid_argument("chain vs construction needs n >= max(5, K)");
  }
  std::vector<SandwichReport> reports;
  const auto reps = static_cast<std::size_t>(cfg.replications);
  for (int n : cfg.sizes) {
    struct RunTally {
      std::vector<Label> picked;
      std::size_t window = 0;
    };
    std::vector<RunTally> runs(reps);
    parallel_for(reps, cfg.workers, [&](std::size_t r) {
      Rng rng = substream(cfg.master_seed, static_cast<std::uint64_t>(n), r);
      const auto labels = original_labels(static_cast<std::size_t>(n));
      const Tree left = random_tree(labels, rng);
      const Tree right = random_tree(labels, rng);
      ConstructionOutput out = run_construction(left, right, cfg.cutoff, rng);
      runs[r].picked = std::move(out.picked);
      for (const auto& rec : out.item_trace) {
        if (rec.stopped) runs[r].window += static_cast<std::size_t>(rec.m_before);
      }
    });

    SandwichReport rep;
    rep.n = n;
    rep.cutoff = cfg.cutoff;
    rep.runs = cfg.replications;
    std::vector<std::uint64_t> hits_per_leaf(static_cast<std::size_t>(n) + 1, 0);
    RunningStats sizes;
    RunningStats fractions;
    RunningStats window;
    for (const auto& run : runs) {
      rep.total_picked += run.picked.size();
      for (const auto& l : run.picked) ++hits_per_leaf[l.id()];
      sizes.add(static_cast<double>(run.picked.size()));
      fractions.add(static_cast<double>(run.picked.size()) / n);
      window.add(static_cast<double>(run.window) / n);
    }
    for (auto h : hits_per_leaf) rep.leaf_hits += h;
    rep.mean_size = static_cast<double>(rep.total_picked) / static_cast<double>(reps);
    rep.p_hat = static_cast<double>(rep.leaf_hits) / (static_cast<double>(n) * static_cast<double>(reps));
    rep.p_std_error = fractions.std_error();
    rep.cv_size = sizes.mean() > 0 ? std::sqrt(sizes.variance()) / sizes.mean() : 0.0;
    rep.q_construct = window.mean();
    rep.q_construct_std_error = window.std_error();

    const std::size_t blocks = (cfg.chain_runs + kChainBlock - 1) / kChainBlock;
    std::vector<std::size_t> hits(blocks, 0);
    parallel_for(blocks, cfg.workers, [&](std::size_t b) {
      Rng rng = substream(cfg.master_seed ^ kChainSalt, static_cast<std::uint64_t>(n), b);
      const std::size_t count = std::min(kChainBlock, cfg.chain_runs - b * kChainBlock);
      for (std::size_t i = 0; i < count; ++i) {
        if (run_chain(n, cfg.cutoff, ChainStart::kStageZero, rng).entered_window) ++hits[b];
      }
    });
    std::size_t total_hits = 0;
    for (auto h : hits) total_hits += h;
    rep.chain_runs = cfg.chain_runs;
    rep.q_hat = static_cast<double>(total_hits) / static_cast<double>(cfg.chain_runs);
    rep.q_std_error = std::sqrt(rep.q_hat * (1.0 - rep.q_hat) / static_cast<double>(cfg.chain_runs));
    reports.push_back(rep);
  }
  return reports;
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::ordered_json;

std::string join_sizes(const std::vector<int>& sizes) {
  std::string s;
  for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? "," : "") + std::to_string(sizes[i]);
  return s;
}

std::vector<std::pair<std::string, std::string>> config_fields(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> f{
      {"mode", to_string(cfg.mode)},
      {"sizes", join_sizes(cfg.sizes)},
      {"cutoff", std::to_string(cfg.cutoff)},
      {"replications", std::to_string(cfg.replications)},
      {"master_seed", std::to_string(cfg.master_seed)},
      {"format", to_string(cfg.output_format)},
  };
  if (cfg.mode == ExperimentMode::kChain || cfg.mode == ExperimentMode::kMartingale) {
    f.emplace_back("chain_runs", std::to_string(cfg.chain_runs));
  }
  return f;
}

ordered_json config_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["mode"] = to_string(cfg.mode);
  j["sizes"] = cfg.sizes;
  j["cutoff"] = cfg.cutoff;
  j["replications"] = cfg.replications;
  j["master_seed"] = cfg.master_seed;
  j["format"] = to_string(cfg.output_format);
  if (cfg.mode == ExperimentMode::kChain || cfg.mode == ExperimentMode::kMartingale) {
    j["chain_runs"] = cfg.chain_runs;
  }
  return j;
}

void write_config_comments(const ExperimentConfig& cfg, std::ostream& out) {
  out << "# ctree experiment\n";
  for (const auto& [k, v] : config_fields(cfg)) out << "# " << k << '=' << v << '\n';
}

void write_scaling(const ExperimentConfig& cfg, const ScalingResult& res, std::ostream& out) {
  if (cfg.output_format == OutputFormat::kCsv) {
    write_config_comments(cfg, out);
    out << "n,replicate,size,seed_sub,std_error\n";
    const auto reps = static_cast<std::size_t>(cfg.replications);
    for (std::size_t i = 0; i < res.per_size.size(); ++i) {
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& rec = res.replicates[i * reps + r];
        out << rec.n << ',' << rec.replicate << ',' << rec.size << ',' << rec.seed_sub << ",\n";
      }
      const auto& s = res.per_size[i];
      out << s.n << ",-1," << fmt(s.mean_size) << ",," << fmt(s.std_error) << '\n';
    }
    if (res.has_fit) {
      out << "# fit_slope=" << fmt(res.fitted_slope) << '\n'
          << "# fit_intercept=" << fmt(res.fitted_intercept) << '\n'
          << "# fit_slope_std_error=" << fmt(res.slope_std_error) << '\n';
    }
    return;
  }
  ordered_json j;
  j["config"] = config_json(cfg);
  j["rows"] = ordered_json::array();
  const auto reps = static_cast<std::size_t>(cfg.replications);
  for (std::size_t i = 0; i < res.per_size.size(); ++i) {
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& rec = res.replicates[i * reps + r];
      j["rows"].push_back({{"n", rec.n}, {"replicate", rec.replicate}, {"size", rec.size}, {"seed_sub", rec.seed_sub},
                           {"std_error", nullptr}});
    }
    const auto& s = res.per_size[i];
    j["rows"].push_back({{"n", s.n}, {"replicate", -1}, {"size", s.mean_size}, {"seed_sub", nullptr},
                         {"std_error", s.std_error}});
  }
  if (res.has_fit) {
    j["fit"] = {{"slope", res.fitted_slope}, {"intercept", res.fitted_intercept},
                {"slope_std_error", res.slope_std_error}};
  } else {
    j["fit"] = nullptr;
  }
  out << j.dump(2) << '\n';
}

void write_sandwich(const ExperimentConfig& cfg, const std::vector<SandwichReport>& reports, std::ostream& out) {
  auto row = [](const SandwichReport& r) {
    ordered_json j;
    j["n"] = r.n;
    j["cutoff"] = r.cutoff;
    j["runs"] = r.runs;
    j["mean_size"] = r.mean_size;
    j["p_hat"] = r.p_hat;
    j["p_std_error"] = r.p_std_error;
    j["cv_size"] = r.cv_size;
    j["q_hat"] = r.q_hat;
    j["q_std_error"] = r.q_std_error;
    j["chain_runs"] = r.chain_runs;
    j["q_construct"] = r.q_construct;
    j["q_construct_std_error"] = r.q_construct_std_error;
    j["accounting_exact"] = r.accounting_exact();
    j["sandwich_holds"] = r.sandwich_holds();
    return j;
  };
  if (cfg.output_format == OutputFormat::kJson) {
    ordered_json j;
    j["config"] = config_json(cfg);
    j["rows"] = ordered_json::array();
    for (const auto& r : reports) j["rows"].push_back(row(r));
    out << j.dump(2) << '\n';
    return;
  }
  write_config_comments(cfg, out);
  out << "n,cutoff,runs,mean_size,p_hat,p_std_error,cv_size,q_hat,q_std_error,chain_runs,q_construct,"
         "q_construct_std_error,accounting_exact,sandwich_holds\n";
  for (const auto& r : reports) {
    out << r.n << ',' << r.cutoff << ',' << r.runs << ',' << fmt(r.mean_size) << ',' << fmt(r.p_hat) << ','
        << fmt(r.p_std_error) << ',' << fmt(r.cv_size) << ',' << fmt(r.q_hat) << ',' << fmt(r.q_std_error) << ','
        << r.chain_runs << ',' << fmt(r.q_construct) << ',' << fmt(r.q_construct_std_error) << ','
        << (r.accounting_exact() ? 1 : 0) << ',' << (r.sandwich_holds() ? 1 : 0) << '\n';
  }
}

void write_martingale(const ExperimentConfig& cfg, const std::vector<MartingalePoint>& points, std::ostream& out) {
  if (cfg.output_format == OutputFormat::kJson) {
    ordered_json j;
    j["config"] = config_json(cfg);
    j["rows"] = ordered_json::array();
    for (const auto& p : points) j["rows"].push_back({{"t", p.t}, {"estimate", p.estimate}, {"std_error", p.std_error}});
    out << j.dump(2) << '\n';
    return;
  }
  write_config_comments(cfg, out);
  out << "t,estimate,std_error\n";
  for (const auto& p : points) out << p.t << ',' << fmt(p.estimate) << ',' << fmt(p.std_error) << '\n';
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  switch (cfg.mode) {
    case ExperimentMode::kConstruct:
      write_scaling(cfg, run_scaling_construct(cfg), out);
      break;
    case ExperimentMode::kMast:
      write_scaling(cfg, run_scaling_mast(cfg), out);
      break;
    case ExperimentMode::kChain:
      write_sandwich(cfg, run_chain_vs_construction(cfg), out);
      break;
    case ExperimentMode::kMartingale: {
      Rng rng = substream(cfg.master_seed, 0, 0);
      write_martingale(cfg, martingale_check(cfg.sizes.back(), cfg.chain_runs, rng), out);
      break;
    }
  }
}

}  // namespace ctree
