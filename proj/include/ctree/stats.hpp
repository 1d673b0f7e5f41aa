#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ctree {

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // sample variance
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit. Cells with expected count below `min_expected`
/// are pooled (in order) with their neighbours before testing.
ChiSquareResult chi_square_test(std::span<const double> observed, std::span<const double> probabilities,
                                double min_expected = 5.0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with the
/// asymptotic Kolmogorov p-value (Stephens' small-sample correction).
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
};

/// Ordinary least squares of y on x. Needs at least 3 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace ctree
