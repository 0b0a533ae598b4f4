#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ulab/models.hpp"
#include "ulab/pathspace.hpp"
#include "ulab/test_function.hpp"

namespace ulab {

/// The speed a(eps) multiplying log-probabilities.
using SpeedFn = std::function<double(double)>;

inline double identity_speed(double eps) { return eps; }

class EpsilonSchedule {
 public:
  /// @throws ConfigError unless eps is positive and strictly decreasing.
  explicit EpsilonSchedule(std::vector<double> eps, SpeedFn speed = identity_speed, std::string speed_label = "eps");

  /// count values from hi down to lo, equally spaced in log scale.
  static EpsilonSchedule geometric(double hi, double lo, std::size_t count);

  const std::vector<double>& values() const noexcept { return eps_; }
  double speed(double eps) const { return speed_(eps); }
  const SpeedFn& speed_fn() const noexcept { return speed_; }
  const std::string& speed_label() const noexcept { return speed_label_; }

 private:
  std::vector<double> eps_;
  SpeedFn speed_;
  std::string speed_label_;
};

struct McBudget {
  std::size_t samples = 10000;
  std::uint64_t seed = 42;
  unsigned threads = 1;
};

/**
 * A probability estimate with its 95% interval and the log-scaled value.
 * Logs are natural logs; log_value = a(eps) log p_hat is -inf on zero hits.
 */
struct LogProbEstimate {
  double eps = 0.0;
  Point x;
  double speed = 0.0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double log_p = 0.0;
  double log_value = 0.0;
  /// a(eps) log of the interval ends.
  double log_value_low = 0.0;
  double log_value_high = 0.0;
  std::size_t hits = 0;
  std::size_t n = 0;
  bool zero_hit = false;
  /// 3/n, the one-sided 95% bound used when there are no hits.
  double rule_of_three = 0.0;
  double ess = 0.0;
  bool tilted = false;
  bool degenerate_weights = false;
  std::uint64_t seed = 0;
};

struct WilsonInterval {
  double low;
  double high;
};

WilsonInterval wilson_interval(std::size_t hits, std::size_t n, double z = 1.959963984540054);

/// Plain Monte Carlo frequency of X^eps_x in the event, with a Wilson interval.
LogProbEstimate mc_probability(const ProcessModel& model, const Point& x, double eps, const EventSpec& event,
                               const McBudget& budget, Membership kind = Membership::open,
                               const SpeedFn& speed = identity_speed);

/**
 * Importance sampling under the drift tilt u with Girsanov weights
 * exp(-(1/sqrt(eps)) sum u_i dW_i - |u|^2 / (2 eps)). A zero tilt reduces
 * to mc_probability and returns the same bits.
 */
LogProbEstimate is_probability(const ProcessModel& model, const Point& x, double eps, const EventSpec& event,
                               const Control& tilt, const McBudget& budget, Membership kind = Membership::open,
                               const SpeedFn& speed = identity_speed);

/// Per-sample outcome of a (possibly tilted) batch.
struct WeightedSample {
  double log_weight;
  std::vector<char> hits;
};

/**
 * Simulates budget.samples tilted paths from sample indices 0..n-1 and records
 * the log Girsanov weight with one flag per indicator.
 */
std::vector<WeightedSample> simulate_indicators(
    const ProcessModel& model, const Point& x, double eps, const Control* tilt, const McBudget& budget,
    const std::function<std::vector<char>(const DiscretePath&)>& indicators);

/// Estimate for indicator @p which from a simulated batch.
LogProbEstimate estimate_from_batch(const std::vector<WeightedSample>& batch, std::size_t which, double eps,
                                    const Point& x, bool tilted, std::uint64_t seed, double speed);

struct LaplaceEstimate {
  double eps = 0.0;
  Point x;
  double speed = 0.0;
  /// a log E exp(-h / a).
  double value = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  double ess = 0.0;
  std::size_t n = 0;
  bool tilted = false;
  std::uint64_t seed = 0;
};

/**
 * a(eps) log E exp(-h(X) / a(eps)), max-shifted. With a tilt, odd sample
 * indices follow the tilted dynamics and every sample is weighted against the
 * equal mixture of plain and tilted laws, so weights stay below 2.
 */
LaplaceEstimate laplace_functional(const ProcessModel& model, const Point& x, double eps, const TestFunction& h,
                                   const McBudget& budget, const Control* tilt = nullptr,
                                   const SpeedFn& speed = identity_speed);

/// Girsanov log weight of a noise draw for the tilt u.
double girsanov_log_weight(const Control& tilt, const NoiseDraw& noise, double eps);

}  // namespace ulab
