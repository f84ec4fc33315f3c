#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coedit {

/// Sample Pearson correlation, accumulated in one pass with running
/// co-moments. Throws StatisticsError on zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct FitResult {
  double rho = 0.0;    // slope
  double delta = 0.0;  // intercept
  double mean_abs_error = 0.0;
  double p_value = 1.0;       // two-sided slope t-test, n - 2 degrees of freedom
  double slope_stderr = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares d ~ rho * a + delta. Needs at least three points;
/// throws StatisticsError when every a_i is equal.
FitResult linear_fit(std::span<const double> a, std::span<const double> d);

/// mean |d_i - (rho a_i + delta)|.
double mean_abs_error(std::span<const double> a, std::span<const double> d, double rho,
                      double delta);

/// Residuals d_i - (rho a_i + delta).
std::vector<double> residuals(std::span<const double> a, std::span<const double> d,
                              const FitResult& fit);

}  // namespace coedit
