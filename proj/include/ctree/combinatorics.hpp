#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ctree {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Number of unrooted leaf-labeled binary trees on n >= 1 leaves:
/// (2n-5)!!, and 1 for n in {1, 2}.
BigInt count_trees(int n);

/// log of 2^(n - 3/2) e^(-n) n^(n-2), the large-n form of count_trees.
double log_count_trees_asymptotic(int n);
double count_trees_asymptotic(int n);

BigInt binomial(int n, int k);

/// Probability that the three branches at the median of {b, b*, b**} hold
/// (m1, m2, m3) original leaves, when the tree on A + {b, b*} is uniform,
/// |A| = m and b** is a uniform element of A. Requires m1+m2+m3 = m-1.
Rational branch_size_pmf(int m, int m1, int m2, int m3);

/// All (m1, m2, m3) with sum m-1, in lexicographic order.
std::vector<std::array<int, 3>> branch_size_support(int m);

/// Law of |S ∩ S'| for independent uniform a- and a'-subsets of an m-set.
/// Zero outside the support.
Rational hypergeometric_pmf(int a, int a_prime, int m, int j);
double hypergeometric_mean(int a, int a_prime, int m);
double hypergeometric_variance(int a, int a_prime, int m);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace ctree
