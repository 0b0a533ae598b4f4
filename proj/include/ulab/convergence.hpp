#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ulab/checks.hpp"
#include "ulab/models.hpp"

namespace ulab {

struct ConvergenceBudget {
  std::size_t controls = 20;
  std::size_t samples = 200;
  std::uint64_t seed = 42;
  unsigned threads = 1;
};

struct ConvergenceRow {
  double eps = 0.0;
  /// max over sampled (x, u) of the frequency of rho(X^{eps,u}_x, X^{0,u}_x) > delta.
  double sup_prob = 0.0;
  /// Wilson upper end for the worst cell.
  double sup_prob_high = 0.0;
  std::size_t worst_x = 0;
  std::size_t worst_control = 0;
  double median_error = 0.0;
  double q90_error = 0.0;
  double max_error = 0.0;
};

struct ConvergenceTable {
  std::string model;
  IndexSetSample x_sample;
  double n_radius = 0.0;
  double delta = 0.0;
  std::size_t controls = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<ConvergenceRow> rows;
  /// log median error against log eps, over rows with eps > 0.
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  std::string note;
};

/// Zero control, a constant control with |u|^2 = n, then random directions with |u|^2 = n.
std::vector<Control> sample_control_ball(const TimeGrid& grid, std::size_t channels, double n, std::size_t count,
                                         std::uint64_t seed);

/**
 * Sup over sampled (x, u) of P(rho(X^{eps,u}_x, X^{0,u}_x) > delta) per eps,
 * with the noise of sample index i shared across eps.
 * @throws ConfigError when linear-growth noise is paired with an x-sample that is not bounded.
 */
ConvergenceTable control_conv(const ProcessModel& model, const IndexSetSample& xs, double n, double delta,
                              const std::vector<double>& eps, const ConvergenceBudget& budget);

struct MomentRow {
  std::size_t x_index = 0;
  double x_norm = 0.0;
  std::size_t control_index = 0;
  /// Sample mean of sup_t |X(t)|^p.
  double moment = 0.0;
};

struct MomentReport {
  double radius = 0.0;
  double n_radius = 0.0;
  double p = 0.0;
  double eps = 0.0;
  std::size_t samples = 0;
  std::vector<MomentRow> rows;
  double max_moment = 0.0;
  bool finite = true;
  bool blowup = false;
  std::size_t blowup_step = 0;
};

/// Sampled p-th moments of sup_t |X| over |x| <= R and controls in the ball of radius N.
MomentReport moment_bound_check(const ProcessModel& model, double radius, double n, double p, double eps,
                                std::size_t samples, std::uint64_t seed, std::size_t controls = 6);

struct WeakContinuityRow {
  std::size_t frequency = 0;
  double error = 0.0;
};

/**
 * rho(skeleton(x, u_n), skeleton(x, 0)) for u_n(t) = sin(n pi t / T) on the
 * first channel, averaged over each grid cell.
 */
std::vector<WeakContinuityRow> weak_continuity_check(const ProcessModel& model, const Point& x,
                                                     const std::vector<std::size_t>& frequencies);

Control sine_control(const TimeGrid& grid, std::size_t channels, std::size_t frequency);

}  // namespace ulab
