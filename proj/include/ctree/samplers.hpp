#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ctree/rng.hpp"

namespace ctree {

/// Point on the 2-simplex.
struct Simplex3 {
  double y1 = 1.0 / 3;
  double y2 = 1.0 / 3;
  double y3 = 1.0 / 3;

  /// Throws std::invalid_argument unless components are >= 0 and sum to 1
  /// within 1e-12.
  void validate() const;
  double operator[](int i) const { return i == 0 ? y1 : (i == 1 ? y2 : y3); }
};

/// (Y1 Y'1, Y2 Y'2, Y3 Y'3, remainder) for two simplex points.
struct SplitVector {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double l0 = 1.0;

  static SplitVector from_pair(const Simplex3& y, const Simplex3& y_prime);
  double operator[](int i) const { return i == 0 ? l1 : (i == 1 ? l2 : l3); }
};

/// Dirichlet(1/2,1/2,1/2): three squared standard normals, normalized.
Simplex3 sample_dirichlet_half(Rng& rng);

/// E Y_i^beta = 1 / (1 + 2 beta) under Dirichlet(1/2,1/2,1/2). Needs beta > -1/2.
double dirichlet_moment(double beta);

/// Inverse-CDF sampler for the branch-size law at one m, over the full
/// enumerated support of (m1, m2, m3) with m1+m2+m3 = m-1. Probabilities are
/// evaluated in log space from the double-factorial formula.
class BranchSizeTable {
 public:
  explicit BranchSizeTable(int m);

  int m() const { return m_; }
  std::size_t support_size() const { return cdf_.size(); }
  double probability(int m1, int m2) const;
  std::array<int, 3> sample(Rng& rng) const;

 private:
  std::array<int, 3> decode(std::size_t index) const;

  int m_;
  std::vector<std::size_t> row_start_;  // first index of each m1 row
  std::vector<double> cdf_;
};

/// Draws (|A1|, |A2|, |A3|) by inverse CDF (tables cached per thread).
std::array<int, 3> sample_branch_sizes(int m, Rng& rng);

/// Same law via its Dirichlet(1/2,1/2,1/2)-multinomial representation;
/// O(1) in m, used where tables would be too large.
std::array<int, 3> sample_branch_sizes_polya(int m, Rng& rng);

/// Size of the intersection of independent uniform a- and a'-subsets of an
/// m-set. Exact: cumulative search outward from the mode.
int sample_hypergeometric(int a, int a_prime, int m, Rng& rng);

/// One split of the continuous fragmentation: with chance L_i the chip's
/// piece keeps mass * L_i, otherwise it is discarded (returns 0).
double fragmentation_step(double mass, Rng& rng);

struct MartingalePoint {
  int t = 0;
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimates of E[Z(t)^(beta0-1) 1{Z(t) > 0}] for t = 0..t_max,
/// Z(0) = 1, sharing n_samples paths across t.
std::vector<MartingalePoint> martingale_check(int t_max, std::size_t n_samples, Rng& rng);

}  // namespace ctree
