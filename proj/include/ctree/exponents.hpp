#pragma once

#include <array>
#include <vector>

namespace ctree {

/// (sqrt(3) - 1) / 2, the root of 3 (1 / (1 + 2 beta))^2 = 1.
double solve_beta_random();

/// beta -> 3 dirichlet_moment(beta)^2 - 1.
double beta_random_residual(double beta);

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Golub-Welsch).
QuadratureRule gauss_legendre(int n);

/// Integrals of the centroid branch-size density (1/12pi) prod x_i^(-3/2)
/// over the triangle max x_i < 1/2: total mass, and E X_(k)^beta for the
/// order statistics X_(1) <= X_(2) <= X_(3).
struct CentroidMoments {
  double mass = 0.0;
  std::array<double, 3> order_moments{};
};

inline constexpr int kCentroidNodes = 200;

CentroidMoments centroid_moments(double beta, int nodes = kCentroidNodes);

/// beta -> sum_k (E X_(k)^beta)^2 - 1.
double beta_centroid_residual(double beta);

/// Bisection for the root of beta_centroid_residual on [0.3, 0.5].
/// Throws std::runtime_error (with the bracketing residuals) if the bracket
/// does not change sign. Needs tolerance >= 1e-6.
double solve_beta_centroid(double tolerance = 1e-6);

}  // namespace ctree
