#include "ctree/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "ctree/exponents.hpp"
#include "ctree/stats.hpp"

namespace ctree {

void Simplex3::validate() const {
  if (y1 < 0 || y2 < 0 || y3 < 0 || std::abs(y1 + y2 + y3 - 1.0) > 1e-12) {
    throw std::invalid_argument("point is not on the simplex");
  }
}

SplitVector SplitVector::from_pair(const Simplex3& y, const Simplex3& y_prime) {
  SplitVector l;
  l.l1 = y.y1 * y_prime.y1;
  l.l2 = y.y2 * y_prime.y2;
  l.l3 = y.y3 * y_prime.y3;
  l.l0 = 1.0 - l.l1 - l.l2 - l.l3;
  return l;
}

Simplex3 sample_dirichlet_half(Rng& rng) {
  std::normal_distribution<double> normal;
  double g[3];
  double total = 0.0;
  do {
    total = 0.0;
    for (double& x : g) {
      const double z = normal(rng);
      x = z * z;
      total += x;
    }
  } while (total == 0.0);
  return {g[0] / total, g[1] / total, g[2] / total};
}

double dirichlet_moment(double beta) {
  if (beta <= -0.5) throw std::invalid_argument("dirichlet_moment needs beta > -1/2");
  return 1.0 / (1.0 + 2.0 * beta);
}

// ---------------------------------------------------------------------------

namespace {

// log c_{k+2} = log (2k-1)!!
double log_c_plus2(int k) {
  return std::lgamma(2.0 * k + 1.0) - k * std::log(2.0) - std::lgamma(k + 1.0);
}

}  // namespace

BranchSizeTable::BranchSizeTable(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("branch sizes need m >= 1");
  std::vector<double> log_fact(static_cast<std::size_t>(m) + 1);
  std::vector<double> log_c(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) {
    log_fact[static_cast<std::size_t>(k)] = std::lgamma(k + 1.0);
    log_c[static_cast<std::size_t>(k)] = log_c_plus2(k);
  }
  auto at = [](const std::vector<double>& v, int k) { return v[static_cast<std::size_t>(k)]; };
  // log [ m!/(m1! m2! m3! 1!) c_{m1+2} c_{m2+2} c_{m3+2} / (m c_{m+2}) ]
  const double log_norm = at(log_fact, m) - std::log(static_cast<double>(m)) - at(log_c, m);

  cdf_.reserve(static_cast<std::size_t>(m) * (m + 1) / 2);
  double acc = 0.0;
  for (int m1 = 0; m1 <= m - 1; ++m1) {
    row_start_.push_back(cdf_.size());
    for (int m2 = 0; m1 + m2 <= m - 1; ++m2) {
      const int m3 = m - 1 - m1 - m2;
      const double lp = log_norm - at(log_fact, m1) - at(log_fact, m2) - at(log_fact, m3) +
                        at(log_c, m1) + at(log_c, m2) + at(log_c, m3);
      acc += std::exp(lp);
      cdf_.push_back(acc);
    }
  }
  for (double& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

std::array<int, 3> BranchSizeTable::decode(std::size_t index) const {
  auto row = std::upper_bound(row_start_.begin(), row_start_.end(), index) - 1;
  const int m1 = static_cast<int>(row - row_start_.begin());
  const int m2 = static_cast<int>(index - *row);
  return {m1, m2, m_ - 1 - m1 - m2};
}

double BranchSizeTable::probability(int m1, int m2) const {
  if (m1 < 0 || m2 < 0 || m1 + m2 > m_ - 1) return 0.0;
  const std::size_t i = row_start_[static_cast<std::size_t>(m1)] + static_cast<std::size_t>(m2);
  return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
}

std::array<int, 3> BranchSizeTable::sample(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto index = static_cast<std::size_t>(std::min(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size() - 1)));
  return decode(index);
}

std::array<int, 3> sample_branch_sizes(int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sample_branch_sizes needs m >= 1");
  if (m == 1) return {0, 0, 0};
  constexpr std::size_t kCacheBudget = 8'000'000;  // cumulative table entries per thread
  thread_local std::map<int, std::unique_ptr<BranchSizeTable>> cache;
  thread_local std::size_t cached_entries = 0;
  auto it = cache.find(m);
  if (it == cache.end()) {
    auto table = std::make_unique<BranchSizeTable>(m);
    if (cached_entries + table->support_size() > kCacheBudget) {
      cache.clear();
      cached_entries = 0;
    }
    cached_entries += table->support_size();
    it = cache.emplace(m, std::move(table)).first;
  }
  return it->second->sample(rng);
}

std::array<int, 3> sample_branch_sizes_polya(int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sample_branch_sizes needs m >= 1");
  const int total = m - 1;
  if (total == 0) return {0, 0, 0};
  const Simplex3 y = sample_dirichlet_half(rng);
  const int n1 = std::binomial_distribution<int>(total, y.y1)(rng);
  const double rest = y.y2 + y.y3;
  const double p2 = rest > 0.0 ? std::clamp(y.y2 / rest, 0.0, 1.0) : 0.5;
  const int n2 = std::binomial_distribution<int>(total - n1, p2)(rng);
  return {n1, n2, total - n1 - n2};
}

// ---------------------------------------------------------------------------

namespace {

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

int sample_hypergeometric(int a, int a_prime, int m, Rng& rng) {
  if (a < 0 || a_prime < 0 || a > m || a_prime > m) {
    throw std::invalid_argument("sample_hypergeometric needs 0 <= a, a' <= m");
  }
  const int lo = std::max(0, a + a_prime - m);
  const int hi = std::min(a, a_prime);
  if (lo == hi) return lo;
  const int mode = std::clamp(static_cast<int>((static_cast<long long>(a + 1) * (a_prime + 1)) / (m + 2)), lo, hi);
  const double p_mode = std::exp(log_choose(a, mode) + log_choose(m - a, a_prime - mode) - log_choose(m, a_prime));

  // Fixed visiting order mode, mode+1, mode-1, mode+2, ... keeps this exact.
  const double u = uniform01(rng);
  double acc = p_mode;
  if (u < acc) return mode;
  int up = mode;
  int down = mode;
  double p_up = p_mode;
  double p_down = p_mode;
  int last = mode;
  while (up < hi || down > lo) {
    if (up < hi) {
      // p(j+1)/p(j) = (a-j)(a'-j) / ((j+1)(m-a-a'+j+1))
      p_up *= static_cast<double>(a - up) * (a_prime - up) / ((up + 1.0) * (m - a - a_prime + up + 1.0));
      ++up;
      acc += p_up;
      last = up;
      if (u < acc) return up;
    }
    if (down > lo) {
      p_down *= static_cast<double>(down) * (m - a - a_prime + down) /
                (static_cast<double>(a - down + 1) * (a_prime - down + 1));
      --down;
      acc += p_down;
      last = down;
      if (u < acc) return down;
    }
  }
  return last;
}

double fragmentation_step(double mass, Rng& rng) {
  if (!(mass > 0.0)) throw std::invalid_argument("fragmentation_step needs positive mass");
  const SplitVector l = SplitVector::from_pair(sample_dirichlet_half(rng), sample_dirichlet_half(rng));
  const double u = uniform01(rng);
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    acc += l[i];
    if (u < acc) return mass * l[i];
  }
  return 0.0;
}

std::vector<MartingalePoint> martingale_check(int t_max, std::size_t n_samples, Rng& rng) {
  if (t_max < 1) throw std::invalid_argument("martingale_check needs t_max >= 1");
  if (n_samples < 1000) throw std::invalid_argument("martingale_check needs at least 1000 samples");
  const double exponent = solve_beta_random() - 1.0;
  std::vector<RunningStats> stats(static_cast<std::size_t>(t_max) + 1);
  for (std::size_t s = 0; s < n_samples; ++s) {
    double z = 1.0;
    stats[0].add(1.0);
    for (int t = 1; t <= t_max; ++t) {
      if (z > 0.0) z = fragmentation_step(z, rng);
      stats[static_cast<std::size_t>(t)].add(z > 0.0 ? std::pow(z, exponent) : 0.0);
    }
  }
  std::vector<MartingalePoint> out;
  for (int t = 0; t <= t_max; ++t) {
    const auto& s = stats[static_cast<std::size_t>(t)];
    out.push_back({t, s.mean(), s.std_error()});
  }
  return out;
}

}  // namespace ctree
