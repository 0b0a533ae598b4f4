#include "ulab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulab/error.hpp"

namespace ulab {

double dot2(std::span<const double> a, std::span<const double> b) noexcept {
  double p = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double h = a[i] * b[i];
    const double r = std::fma(a[i], b[i], -h);
    const double q = p + h;
    const double z = q - p;
    s += ((p - (q - z)) + (h - z)) + r;
    p = q;
  }
  return p + s;
}

double compensated_sum(std::span<const double> v) noexcept {
  double sum = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

double log_sum_exp(std::span<const double> v) noexcept {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : v) top = std::max(top, x);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double y = std::exp(x - top) - c;
    const double t = acc + y;
    c = (t - acc) - y;
    acc = t;
  }
  return top + std::log(acc);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ConfigError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("fit_line: x and y differ in length");
  LineFit fit;
  fit.points = x.size();
  if (x.size() < 2) {
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    fit.intercept = fit.slope;
    fit.slope_se = std::numeric_limits<double>::infinity();
    return fit;
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      sse += r * r;
    }
    fit.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
  } else {
    fit.slope_se = 0.0;
  }
  return fit;
}

}  // namespace ulab
