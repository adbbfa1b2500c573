#pragma once

// Small numerical helpers shared by the modules: uniform-grid interpolation
// and the summary statistics used by the estimators.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "rdfront/error.hpp"

namespace rdfront {

/// Samples on the uniform grid x_j = x0 + j*dx.
struct UniformSamples {
  double x0 = 0.0;
  double dx = 1.0;
  std::span<const double> values;

  double x(std::size_t j) const { return x0 + static_cast<double>(j) * dx; }
  double right() const { return x(values.size() - 1); }
};

/// Piecewise-linear interpolation, clamped to the end values outside the grid.
inline double interp_linear(const UniformSamples& s, double x) {
  const std::size_t n = s.values.size();
  if (n == 0) throw InvalidArgument("interp_linear: empty sample");
  const double pos = (x - s.x0) / s.dx;
  if (pos <= 0.0) return s.values.front();
  if (pos >= static_cast<double>(n - 1)) return s.values.back();
  const auto j = static_cast<std::size_t>(pos);
  const double a = pos - static_cast<double>(j);
  return (1.0 - a) * s.values[j] + a * s.values[j + 1];
}

/// Four-point Lagrange cubic interpolation (one-sided stencils at the ends).
inline double interp_cubic(const UniformSamples& s, double x) {
  const std::size_t n = s.values.size();
  if (n < 4) return interp_linear(s, x);
  const double pos = (x - s.x0) / s.dx;
  if (pos <= 0.0) return s.values.front();
  if (pos >= static_cast<double>(n - 1)) return s.values.back();
  auto j = static_cast<std::ptrdiff_t>(pos);
  std::ptrdiff_t base = std::clamp<std::ptrdiff_t>(j - 1, 0, static_cast<std::ptrdiff_t>(n) - 4);
  const double t = pos - static_cast<double>(base);  // stencil nodes at 0,1,2,3
  const double* v = s.values.data() + base;
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return l0 * v[0] + l1 * v[1] + l2 * v[2] + l3 * v[3];
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("mean: empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Unbiased sample variance; zero for fewer than two values.
inline double variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

inline double stddev(std::span<const double> v) { return std::sqrt(variance(v)); }

inline double standard_error(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("standard_error: empty sample");
  return stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

/// Standard error of the mean of a correlated series by non-overlapping
/// batch means. Falls back to the iid formula when fewer than two batches fit.
inline double batch_means_standard_error(std::span<const double> v, std::size_t batch) {
  if (batch <= 1 || v.size() < 2 * batch) return standard_error(v);
  const std::size_t nb = v.size() / batch;
  std::vector<double> means(nb);
  for (std::size_t b = 0; b < nb; ++b)
    means[b] = mean(v.subspan(b * batch, batch));
  return standard_error(means);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  ///< standard error of the slope (0 for exact fits)
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope*x.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidArgument("fit_line: need two or more paired samples");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw InvalidArgument("fit_line: degenerate abscissae");
  LinearFit fit;
  fit.n = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      ssr += r * r;
    }
    fit.slope_se = std::sqrt(ssr / static_cast<double>(x.size() - 2) / sxx);
  }
  return fit;
}

/// Two-sided 95% normal quantile used for every confidence interval.
inline constexpr double kZ95 = 1.959963984540054;

}  // namespace rdfront
