#include "ctree/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ctree {

BigInt count_trees(int n) {
  if (n < 1) throw std::invalid_argument("count_trees needs n >= 1");
  BigInt c = 1;
  for (int k = 2 * n - 5; k > 1; k -= 2) c *= k;
  return c;
}

double log_count_trees_asymptotic(int n) {
  if (n < 3) throw std::invalid_argument("count_trees_asymptotic needs n >= 3");
  const double x = n;
  return (x - 1.5) * std::log(2.0) - x + (x - 2.0) * std::log(x);
}

double count_trees_asymptotic(int n) { return std::exp(log_count_trees_asymptotic(n)); }

BigInt binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

namespace {

BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

Rational branch_size_pmf(int m, int m1, int m2, int m3) {
  if (m < 1) throw std::invalid_argument("branch_size_pmf needs m >= 1");
  if (m1 < 0 || m2 < 0 || m3 < 0 || m1 + m2 + m3 != m - 1) {
    throw std::invalid_argument("branch sizes must be non-negative and sum to m - 1 (m = " +
                                std::to_string(m) + ")");
  }
  // multinomial(m; m1, m2, m3, 1) c_{m1+2} c_{m2+2} c_{m3+2} / (m c_{m+2})
  const BigInt multinomial = factorial(m) / (factorial(m1) * factorial(m2) * factorial(m3));
  const BigInt numerator = multinomial * count_trees(m1 + 2) * count_trees(m2 + 2) * count_trees(m3 + 2);
  const BigInt denominator = BigInt(m) * count_trees(m + 2);
  return Rational(numerator, denominator);
}

std::vector<std::array<int, 3>> branch_size_support(int m) {
  std::vector<std::array<int, 3>> out;
  for (int m1 = 0; m1 <= m - 1; ++m1) {
    for (int m2 = 0; m1 + m2 <= m - 1; ++m2) out.push_back({m1, m2, m - 1 - m1 - m2});
  }
  return out;
}

Rational hypergeometric_pmf(int a, int a_prime, int m, int j) {
  if (a < 0 || a_prime < 0 || a > m || a_prime > m) {
    throw std::invalid_argument("hypergeometric_pmf needs 0 <= a, a' <= m");
  }
  if (j < std::max(0, a + a_prime - m) || j > std::min(a, a_prime)) return Rational(0);
  return Rational(binomial(a, j) * binomial(m - a, a_prime - j), binomial(m, a_prime));
}

double hypergeometric_mean(int a, int a_prime, int m) {
  return static_cast<double>(a) * a_prime / m;
}

double hypergeometric_variance(int a, int a_prime, int m) {
  if (m < 2) return 0.0;
  const double num = static_cast<double>(a) * a_prime * (m - a) * (m - a_prime);
  return num / (static_cast<double>(m) * m * (m - 1));
}

}  // namespace ctree
