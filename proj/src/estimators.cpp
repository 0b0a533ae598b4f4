#include "ulab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulab/error.hpp"
#include "ulab/numeric.hpp"
#include "ulab/parallel.hpp"

namespace ulab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be finite and > 0");
}

void check_budget(const McBudget& budget) {
  if (budget.samples < 1) throw ConfigError("sample count must be >= 1");
}

double scaled_log(double speed, double p) { return p > 0.0 ? speed * std::log(p) : -kInf; }

}  // namespace

EpsilonSchedule::EpsilonSchedule(std::vector<double> eps, SpeedFn speed, std::string speed_label)
    : eps_(std::move(eps)), speed_(std::move(speed)), speed_label_(std::move(speed_label)) {
  if (eps_.empty()) throw ConfigError("eps schedule must be nonempty");
  for (std::size_t i = 0; i < eps_.size(); ++i) {
    if (!(eps_[i] > 0.0) || !std::isfinite(eps_[i])) throw ConfigError("eps values must be finite and > 0");
    if (i > 0 && !(eps_[i] < eps_[i - 1])) throw ConfigError("eps schedule must be strictly decreasing");
    if (!(speed_(eps_[i]) > 0.0)) throw ConfigError("speed a(eps) must be > 0");
  }
}

EpsilonSchedule EpsilonSchedule::geometric(double hi, double lo, std::size_t count) {
  if (!(hi > lo) || !(lo > 0.0)) throw ConfigError("geometric eps schedule needs hi > lo > 0");
  if (count < 2) {
    if (count == 1) return EpsilonSchedule({hi});
    throw ConfigError("geometric eps schedule needs count >= 1");
  }
  std::vector<double> eps(count);
  const double ratio = std::log(lo / hi) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) eps[i] = hi * std::exp(ratio * static_cast<double>(i));
  eps.front() = hi;
  eps.back() = lo;
  return EpsilonSchedule(std::move(eps));
}

WilsonInterval wilson_interval(std::size_t hits, std::size_t n, double z) {
  if (n == 0) throw ConfigError("Wilson interval needs n >= 1");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (hits == 0) ci.low = 0.0;
  if (hits == n) ci.high = 1.0;
  ci.low = std::min(ci.low, p);
  ci.high = std::max(ci.high, p);
  return ci;
}

double girsanov_log_weight(const Control& tilt, const NoiseDraw& noise, double eps) {
  const double cross = dot2(tilt.values(), noise.increments);
  return -cross / std::sqrt(eps) - tilt.energy() / eps;
}

std::vector<WeightedSample> simulate_indicators(
    const ProcessModel& model, const Point& x, double eps, const Control* tilt, const McBudget& budget,
    const std::function<std::vector<char>(const DiscretePath&)>& indicators) {
  check_eps(eps);
  check_budget(budget);
  const Control zero = Control::zero(model.grid(), model.channels());
  const Control& u = tilt ? *tilt : zero;
  std::vector<WeightedSample> out(budget.samples);
  parallel_for(budget.samples, budget.threads, [&](std::size_t i) {
    const NoiseDraw noise = sample_noise(model.grid(), model.channels(), budget.seed, i);
    const DiscretePath path = solve_controlled(model, x, eps, u, &noise);
    out[i].log_weight = tilt ? girsanov_log_weight(u, noise, eps) : 0.0;
    out[i].hits = indicators(path);
  });
  return out;
}

LogProbEstimate estimate_from_batch(const std::vector<WeightedSample>& batch, std::size_t which, double eps,
                                    const Point& x, bool tilted, std::uint64_t seed, double speed) {
  if (batch.empty()) throw ConfigError("empty batch");
  LogProbEstimate est;
  est.eps = eps;
  est.x = x;
  est.speed = speed;
  est.n = batch.size();
  est.seed = seed;
  est.tilted = tilted;
  est.rule_of_three = 3.0 / static_cast<double>(est.n);
  const double n = static_cast<double>(est.n);
  std::vector<double> logw;
  for (const auto& s : batch)
    if (s.hits.at(which)) logw.push_back(s.log_weight);
  est.hits = logw.size();
  est.zero_hit = est.hits == 0;
  if (est.zero_hit) {
    est.p_hat = est.ci_low = 0.0;
    est.ci_high = tilted ? est.rule_of_three : wilson_interval(0, est.n).high;
    est.log_p = est.log_value = est.log_value_low = -kInf;
    est.log_value_high = scaled_log(speed, est.ci_high);
    est.ess = 0.0;
    est.degenerate_weights = tilted;
    return est;
  }
  if (!tilted) {
    est.p_hat = static_cast<double>(est.hits) / n;
    const WilsonInterval ci = wilson_interval(est.hits, est.n);
    est.ci_low = ci.low;
    est.ci_high = ci.high;
    est.log_p = std::log(est.p_hat);
    est.ess = n;
  } else {
    const double top = *std::max_element(logw.begin(), logw.end());
    std::vector<double> e(logw.size()), e2(logw.size());
    for (std::size_t i = 0; i < logw.size(); ++i) {
      e[i] = std::exp(logw[i] - top);
      e2[i] = e[i] * e[i];
    }
    const double sum = compensated_sum(e);
    const double sum2 = compensated_sum(e2);
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : e) ss += (v - mean) * (v - mean);
    ss += (n - static_cast<double>(e.size())) * mean * mean;
    const double se = est.n > 1 ? std::sqrt(ss / (n - 1.0) / n) : mean;
    est.log_p = std::min(0.0, top + std::log(mean));
    est.p_hat = std::exp(est.log_p);
    const double lo = mean - kZ95 * se;
    est.ci_low = lo > 0.0 ? std::min(est.p_hat, std::exp(top + std::log(lo))) : 0.0;
    est.ci_high = std::min(1.0, std::max(est.p_hat, std::exp(top + std::log(mean + kZ95 * se))));
    est.ess = sum * sum / sum2;
    est.degenerate_weights = est.ess < 10.0;
  }
  est.log_value = speed * est.log_p;
  est.log_value_low = scaled_log(speed, est.ci_low);
  est.log_value_high = scaled_log(speed, est.ci_high);
  return est;
}

LogProbEstimate mc_probability(const ProcessModel& model, const Point& x, double eps, const EventSpec& event,
                               const McBudget& budget, Membership kind, const SpeedFn& speed) {
  const auto batch = simulate_indicators(model, x, eps, nullptr, budget, [&](const DiscretePath& path) {
    return std::vector<char>{static_cast<char>(contains(path, event, kind))};
  });
  return estimate_from_batch(batch, 0, eps, x, false, budget.seed, speed(eps));
}

LogProbEstimate is_probability(const ProcessModel& model, const Point& x, double eps, const EventSpec& event,
                               const Control& tilt, const McBudget& budget, Membership kind, const SpeedFn& speed) {
  if (!(tilt.grid() == model.grid()) || tilt.channels() != model.channels())
    throw ShapeError("tilt does not match the model grid and channels");
  if (tilt.is_zero()) return mc_probability(model, x, eps, event, budget, kind, speed);
  const auto batch = simulate_indicators(model, x, eps, &tilt, budget, [&](const DiscretePath& path) {
    return std::vector<char>{static_cast<char>(contains(path, event, kind))};
  });
  return estimate_from_batch(batch, 0, eps, x, true, budget.seed, speed(eps));
}

LaplaceEstimate laplace_functional(const ProcessModel& model, const Point& x, double eps, const TestFunction& h,
                                   const McBudget& budget, const Control* tilt, const SpeedFn& speed) {
  check_eps(eps);
  check_budget(budget);
  if (tilt && tilt->is_zero()) tilt = nullptr;
  const double a = speed(eps);
  const Control zero = Control::zero(model.grid(), model.channels());
  const Control& u = tilt ? *tilt : zero;
  std::vector<double> hv(budget.samples), logw(budget.samples, 0.0);
  parallel_for(budget.samples, budget.threads, [&](std::size_t i) {
    const NoiseDraw noise = sample_noise(model.grid(), model.channels(), budget.seed, i);
    const bool tilted = tilt && (i % 2 == 1);
    const DiscretePath path = solve_controlled(model, x, eps, tilted ? u : zero, &noise);
    hv[i] = h(path);
    if (tilt) {
      // log dP/dQ at this path, then against the mixture (P + Q) / 2.
      const double cross = dot2(u.values(), noise.increments) / std::sqrt(eps);
      const double log_ratio = tilted ? -cross - u.energy() / eps : -cross + u.energy() / eps;
      const double lse = log_ratio < 0.0 ? -log_ratio + std::log1p(std::exp(log_ratio))
                                         : std::log1p(std::exp(-log_ratio));
      logw[i] = std::log(2.0) - lse;
    }
  });
  LaplaceEstimate est;
  est.eps = eps;
  est.x = x;
  est.speed = a;
  est.n = budget.samples;
  est.seed = budget.seed;
  est.tilted = tilt != nullptr;
  est.h_min = *std::min_element(hv.begin(), hv.end());
  est.h_max = *std::max_element(hv.begin(), hv.end());
  const double n = static_cast<double>(budget.samples);
  std::vector<double> v(budget.samples);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -(hv[i] - est.h_min) / a + logw[i];
  const double top = *std::max_element(v.begin(), v.end());
  std::vector<double> e(v.size()), e2(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    e[i] = std::exp(v[i] - top);
    e2[i] = e[i] * e[i];
  }
  const double sum = compensated_sum(e);
  est.ess = sum * sum / compensated_sum(e2);
  est.value = -est.h_min + a * (top + std::log(sum / n));
  return est;
}

}  // namespace ulab
