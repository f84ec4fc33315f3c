#include "coedit/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "coedit/error.hpp"

namespace coedit {

namespace {

void check_pair(std::span<const double> xs, std::span<const double> ys, std::size_t min_len) {
  if (xs.size() != ys.size()) throw ArgumentError("series lengths differ");
  if (xs.size() < min_len) {
    throw ArgumentError("need at least " + std::to_string(min_len) + " observations, got " +
                        std::to_string(xs.size()));
  }
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys, 2);
  double mean_x = 0.0;
  double mean_y = 0.0;
  double m2x = 0.0;
  double m2y = 0.0;
  double cxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double dx = xs[k] - mean_x;
    const double dy = ys[k] - mean_y;
    mean_x += dx / n;
    mean_y += dy / n;
    m2x += dx * (xs[k] - mean_x);
    m2y += dy * (ys[k] - mean_y);
    cxy += dx * (ys[k] - mean_y);
  }
  if (!(m2x > 0.0) || !(m2y > 0.0)) {
    throw StatisticsError("correlation undefined: a series has zero variance");
  }
  return std::clamp(cxy / std::sqrt(m2x * m2y), -1.0, 1.0);
}

double mean_abs_error(std::span<const double> a, std::span<const double> d, double rho,
                      double delta) {
  check_pair(a, d, 1);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(d[i] - (rho * a[i] + delta));
  return total / static_cast<double>(a.size());
}

FitResult linear_fit(std::span<const double> a, std::span<const double> d) {
  check_pair(a, d, 3);
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0;
  double mean_d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_d += d[i];
  }
  mean_a /= n;
  mean_d /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sxx += (a[i] - mean_a) * (a[i] - mean_a);
    sxy += (a[i] - mean_a) * (d[i] - mean_d);
  }
  if (!(sxx > 0.0)) throw StatisticsError("singular fit: all predictions are equal");

  FitResult fit;
  fit.n = a.size();
  fit.rho = sxy / sxx;
  fit.delta = mean_d - fit.rho * mean_a;
  double ssr = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = d[i] - (fit.rho * a[i] + fit.delta);
    ssr += r * r;
  }
  fit.mean_abs_error = mean_abs_error(a, d, fit.rho, fit.delta);
  fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  if (fit.slope_stderr > 0.0) {
    const boost::math::students_t dist(n - 2.0);
    const double t = std::abs(fit.rho / fit.slope_stderr);
    fit.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, t)), 0.0, 1.0);
  } else {
    fit.p_value = fit.rho != 0.0 ? 0.0 : 1.0;
  }
  return fit;
}

std::vector<double> residuals(std::span<const double> a, std::span<const double> d,
                              const FitResult& fit) {
  check_pair(a, d, 1);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = d[i] - (fit.rho * a[i] + fit.delta);
  return out;
}

}  // namespace coedit
