#pragma once

#include <cstddef>
#include <vector>

#include "ctree/combinatorics.hpp"
#include "ctree/rng.hpp"

namespace ctree {

/// State of the size chain for one tracked leaf.
struct ChainState {
  int x = 0;  // current size of the leaf-set holding the tracked leaf
  int t = 0;
  bool absorbed_zero = false;
  bool entered_window = false;
};

/// One transition from a leaf-set of size m. Both trees draw branch sizes
/// independently; branch i keeps a hypergeometric(a_i, a'_i, m) intersection,
/// and the tracked leaf lands in it with chance M_i / m, else the result is 0.
int chain_step(int m, Rng& rng);

inline constexpr int kMaxExactChainStep = 40;

/// Exact law of chain_step(m): entry j is P(next = j), j = 0..m-1.
/// Throws GuardError for m > kMaxExactChainStep.
std::vector<Rational> chain_step_pmf(int m);

/// Size after Stage 0 on n leaves: |B ∩ B'| for two independent uniform
/// (n-2)-subsets, kept with chance |B ∩ B'| / n.
int stage_zero_step(int n, Rng& rng);

enum class ChainStart {
  kStageZero,  // exact Stage-0 law from n
  kNMinus4,    // fixed start at n - 4
};

/// Runs the chain until it hits 0 or enters {1..K-1}.
ChainState run_chain(int n, int cutoff, ChainStart start, Rng& rng);

struct QEstimate {
  double q_hat = 0.0;
  double std_error = 0.0;
  std::size_t runs = 0;
};

/// Monte Carlo estimate of the chance the chain enters {1..K-1}.
QEstimate estimate_q(int n, int cutoff, std::size_t runs, Rng& rng,
                     ChainStart start = ChainStart::kStageZero);

}  // namespace ctree
