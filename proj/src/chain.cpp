#include "ctree/chain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ctree/errors.hpp"
#include "ctree/samplers.hpp"

namespace ctree {

namespace {

// Above this the O(m^2) tables cost more than the Dirichlet-multinomial draw.
constexpr int kTableLimit = 64;

std::array<int, 3> draw_sizes(int m, Rng& rng) {
  return m <= kTableLimit ? sample_branch_sizes(m, rng) : sample_branch_sizes_polya(m, rng);
}

int keep_with_size_bias(const std::array<int, 3>& sizes, int m, Rng& rng) {
  const double u = uniform01(rng) * m;
  double acc = 0.0;
  for (int s : sizes) {
    acc += s;
    if (u < acc) return s;
  }
  return 0;
}

}  // namespace

int chain_step(int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("chain_step needs m >= 1");
  if (m == 1) return 0;
  const auto a = draw_sizes(m, rng);
  const auto a_prime = draw_sizes(m, rng);
  std::array<int, 3> kept{};
  for (int i = 0; i < 3; ++i) kept[i] = sample_hypergeometric(a[i], a_prime[i], m, rng);
  return keep_with_size_bias(kept, m, rng);
}

std::vector<Rational> chain_step_pmf(int m) {
  if (m < 1) throw std::invalid_argument("chain_step_pmf needs m >= 1");
  if (m > kMaxExactChainStep) {
    throw GuardError("chain_step_pmf is limited to m <= " + std::to_string(kMaxExactChainStep));
  }
  const auto support = branch_size_support(m);
  std::vector<Rational> weight;
  weight.reserve(support.size());
  for (const auto& s : support) weight.push_back(branch_size_pmf(m, s[0], s[1], s[2]));

  // P(branch pair (a_i, a'_i) occurs), summed over positions i.
  std::vector<Rational> pair_mass(static_cast<std::size_t>(m * m));
  for (std::size_t x = 0; x < support.size(); ++x) {
    for (std::size_t y = 0; y < support.size(); ++y) {
      const Rational w = weight[x] * weight[y];
      for (int i = 0; i < 3; ++i) {
        pair_mass[static_cast<std::size_t>(support[x][i] * m + support[y][i])] += w;
      }
    }
  }

  std::vector<Rational> pmf(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Rational& w = pair_mass[static_cast<std::size_t>(a * m + b)];
      if (w == 0) continue;
      for (int j = 1; j <= std::min(a, b); ++j) {
        pmf[static_cast<std::size_t>(j)] += w * hypergeometric_pmf(a, b, m, j) * Rational(j, m);
      }
    }
  }
  Rational alive = 0;
  for (int j = 1; j < m; ++j) alive += pmf[static_cast<std::size_t>(j)];
  pmf[0] = 1 - alive;
  return pmf;
}

int stage_zero_step(int n, Rng& rng) {
  if (n < 3) throw std::invalid_argument("stage_zero_step needs n >= 3");
  const int overlap = sample_hypergeometric(n - 2, n - 2, n, rng);
  return uniform01(rng) * n < overlap ? overlap : 0;
}

ChainState run_chain(int n, int cutoff, ChainStart start, Rng& rng) {
  if (cutoff < 2 || n < cutoff) throw std::invalid_argument("run_chain needs n >= K >= 2");
  ChainState s;
  if (start == ChainStart::kStageZero) {
    if (n < 5) throw std::invalid_argument("run_chain from Stage 0 needs n >= 5");
    s.x = stage_zero_step(n, rng);
  } else {
    s.x = std::max(n - 4, 0);
  }
  for (;;) {
    if (s.x == 0) {
      s.absorbed_zero = true;
      return s;
    }
    if (s.x < cutoff) {
      s.entered_window = true;
      return s;
    }
    s.x = chain_step(s.x, rng);
    ++s.t;
  }
}

QEstimate estimate_q(int n, int cutoff, std::size_t runs, Rng& rng, ChainStart start) {
  if (runs == 0) throw std::invalid_argument("estimate_q needs runs >= 1");
  std::size_t hits = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    if (run_chain(n, cutoff, start, rng).entered_window) ++hits;
  }
  QEstimate e;
  e.runs = runs;
  e.q_hat = static_cast<double>(hits) / static_cast<double>(runs);
  e.std_error = std::sqrt(e.q_hat * (1.0 - e.q_hat) / static_cast<double>(runs));
  return e;
}

}  // namespace ctree
