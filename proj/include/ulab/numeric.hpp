#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ulab {

/// Dot product accurate to roughly twice working precision (Ogita, Rump, Oishi).
double dot2(std::span<const double> a, std::span<const double> b) noexcept;

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> v) noexcept;

/// log(sum exp(v)); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v) noexcept;

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> v, double q);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace ulab
