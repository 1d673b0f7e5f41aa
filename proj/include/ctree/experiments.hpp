#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ctree {

enum class ExperimentMode { kConstruct, kMast, kChain, kMartingale };
enum class OutputFormat { kCsv, kJson };

std::string to_string(ExperimentMode mode);
std::string to_string(OutputFormat format);
/// Throws std::invalid_argument on unknown names.
ExperimentMode parse_mode(const std::string& text);
OutputFormat parse_format(const std::string& text);

struct ExperimentConfig {
  std::vector<int> sizes{128, 256, 512, 1024};
  int cutoff = 10;
  int replications = 100;
  std::uint64_t master_seed = 1;
  ExperimentMode mode = ExperimentMode::kConstruct;
  std::string output_path;  // empty: caller's stream
  OutputFormat output_format = OutputFormat::kCsv;
  /// Chain mode: chain runs per size. Martingale mode: paths.
  std::size_t chain_runs = 100000;
  /// 0 picks the hardware concurrency. Never changes results.
  unsigned workers = 0;

  /// Throws std::invalid_argument unless sizes are nonempty and increasing,
  /// replications >= 1 and K >= 2.
  void validate() const;
};

/// Runs fn(0..count-1) on a pool of workers. fn must write only to its own
/// index; results are then independent of scheduling.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

struct ReplicateRecord {
  int n = 0;
  int replicate = 0;
  std::size_t size = 0;
  std::uint64_t seed_sub = 0;
};

struct SizeSummary {
  int n = 0;
  double mean_size = 0.0;
  double std_error = 0.0;
  int replications = 0;
};

struct ScalingResult {
  std::vector<SizeSummary> per_size;
  std::vector<ReplicateRecord> replicates;  // (n, r) order
  bool has_fit = false;  // needs >= 3 sizes
  double fitted_slope = 0.0;
  double fitted_intercept = 0.0;
  double slope_std_error = 0.0;
};

/// Construction output sizes on pairs of uniform trees. Replicate r at size n
/// draws everything from substream (master_seed, n, r).
ScalingResult run_scaling_construct(const ExperimentConfig& cfg);

inline constexpr int kMaxScalingMastSize = 256;

/// Exact maximum agreement subtree sizes on pairs of uniform trees.
/// Throws GuardError for sizes above kMaxScalingMastSize.
ScalingResult run_scaling_mast(const ExperimentConfig& cfg);

struct SandwichReport {
  int n = 0;
  int cutoff = 0;
  int runs = 0;
  std::uint64_t total_picked = 0;  // sum of output sizes
  std::uint64_t leaf_hits = 0;     // sum over leaves of times picked
  double mean_size = 0.0;
  double p_hat = 0.0;
  double p_std_error = 0.0;
  double cv_size = 0.0;
  double q_hat = 0.0;  // chain
  double q_std_error = 0.0;
  std::size_t chain_runs = 0;
  double q_construct = 0.0;  // leaves reaching a stopped item, same runs
  double q_construct_std_error = 0.0;

  bool accounting_exact() const;
  /// q/(K-1) <= p <= q, each side allowed `sigmas` combined standard errors.
  bool sandwich_holds(double sigmas = 3.0) const;
};

inline constexpr int kMaxSandwichSize = 2000;

/// p from run_construction and q from the size chain, per size in cfg.sizes.
std::vector<SandwichReport> run_chain_vs_construction(const ExperimentConfig& cfg);

/// Runs cfg.mode and writes the result in cfg.output_format, config first.
/// Martingale mode treats sizes.back() as t_max and chain_runs as paths.
void run_experiment(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace ctree
