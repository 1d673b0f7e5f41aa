#include "ctree/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "ctree/samplers.hpp"

namespace ctree {

double solve_beta_random() { return (std::sqrt(3.0) - 1.0) / 2.0; }

double beta_random_residual(double beta) {
  const double e = dirichlet_moment(beta);
  return 3.0 * e * e - 1.0;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre needs n >= 1");
  // Jacobi matrix of the Legendre recurrence: off-diagonal k / sqrt(4k^2 - 1).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double v0 = solver.eigenvectors()(0, k);
    rule.nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    rule.weights[static_cast<std::size_t>(k)] = 2.0 * v0 * v0;
  }
  return rule;
}

namespace {

// The six orderings of three coordinates.
constexpr std::array<std::array<int, 3>, 6> kPermutations{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

}  // namespace

CentroidMoments centroid_moments(double beta, int nodes) {
  const QuadratureRule rule = gauss_legendre(nodes);
  const double norm = 1.0 / (12.0 * std::numbers::pi);
  CentroidMoments out;

  // One ordered region s <= x2 <= x3 with x3 < 1/2, parameterized by the
  // smallest coordinate s. For s <= 1/4, s = u^2 absorbs the s^(-1/2)
  // behaviour of the inner integral.
  auto inner = [&](double s, double outer_weight) {
    const double hi = (1.0 - s) / 2.0;
    const double lo = s <= 0.25 ? 0.5 - s : s;
    if (hi <= lo) return;
    const double half = (hi - lo) / 2.0;
    const double mid = (hi + lo) / 2.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double x2 = mid + half * rule.nodes[j];
      const double x3 = 1.0 - s - x2;
      const double w = outer_weight * half * rule.weights[j];
      const std::array<double, 3> sorted{s, x2, x3};
      for (const auto& p : kPermutations) {
        std::array<double, 3> x{};
        for (int k = 0; k < 3; ++k) x[static_cast<std::size_t>(p[static_cast<std::size_t>(k)])] = sorted[static_cast<std::size_t>(k)];
        const double f = norm * std::pow(x[0] * x[1] * x[2], -1.5);
        std::array<double, 3> order = x;
        std::sort(order.begin(), order.end());
        out.mass += w * f;
        for (std::size_t k = 0; k < 3; ++k) out.order_moments[k] += w * f * std::pow(order[k], beta);
      }
    }
  };

  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = 0.25 * (rule.nodes[i] + 1.0);  // u in (0, 1/2)
    inner(u * u, 0.25 * rule.weights[i] * 2.0 * u);
  }
  const double a = 0.25;
  const double b = 1.0 / 3.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = (a + b) / 2.0 + (b - a) / 2.0 * rule.nodes[i];
    inner(s, (b - a) / 2.0 * rule.weights[i]);
  }
  return out;
}

double beta_centroid_residual(double beta) {
  const CentroidMoments m = centroid_moments(beta);
  double total = 0.0;
  for (double e : m.order_moments) total += e * e;
  return total - 1.0;
}

double solve_beta_centroid(double tolerance) {
  if (tolerance < 1e-6) throw std::invalid_argument("solve_beta_centroid needs tolerance >= 1e-6");
  double lo = 0.3;
  double hi = 0.5;
  double r_lo = beta_centroid_residual(lo);
  double r_hi = beta_centroid_residual(hi);
  if ((r_lo > 0) == (r_hi > 0)) {
    std::ostringstream msg;
    msg << "solve_beta_centroid: no sign change on [" << lo << ", " << hi << "], residuals " << r_lo
        << " and " << r_hi;
    throw std::runtime_error(msg.str());
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = (lo + hi) / 2.0;
    const double r = beta_centroid_residual(mid);
    if (std::abs(r) < 1e-12 || hi - lo < tolerance) return mid;
    if ((r > 0) == (r_lo > 0)) {
      lo = mid;
      r_lo = r;
    } else {
      hi = mid;
      r_hi = r;
    }
  }
  std::ostringstream msg;
  msg << "solve_beta_centroid did not converge; bracket [" << lo << ", " << hi << "], residuals " << r_lo
      << " and " << r_hi;
  throw std::runtime_error(msg.str());
}

}  // namespace ctree
