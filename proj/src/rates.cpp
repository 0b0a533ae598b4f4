#include "ulab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/QR>

#include "ulab/error.hpp"
#include "ulab/rng.hpp"

namespace ulab {

RateValue RateValue::achieved(Control control) { return RateValue(std::move(control)); }

double RateValue::value() const noexcept {
  return control_ ? control_->energy() : std::numeric_limits<double>::infinity();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_brownian(const ProcessModel& model, const char* op) {
  if (!model.translation_type())
    throw ConfigError(std::string(op) + " needs a translated, perturbed or swapped Brownian model");
}

void require_on_grid(const ProcessModel& model, const DiscretePath& phi) {
  if (!(phi.grid() == model.grid())) throw ShapeError("path is not on the model grid");
  if (phi.dim() != model.state_dim()) throw ShapeError("path dimension does not match the model");
}

bool starts_at(const DiscretePath& phi, const Point& x0) {
  double worst = 0.0;
  double scale = 1.0;
  for (std::size_t k = 0; k < x0.size(); ++k) {
    worst = std::max(worst, std::abs((phi.origin()[k] - x0[k]) + phi.displacement(0)[k]));
    scale = std::max(scale, std::abs(x0[k]));
  }
  return worst <= kStartTolerance * scale;
}

}  // namespace

RateValue rate_closed_form(const ProcessModel& model, double x, const DiscretePath& phi) {
  require_brownian(model, "rate_closed_form");
  require_on_grid(model, phi);
  const Point x0 = model.rate_origin({x});
  if (!starts_at(phi, x0)) return RateValue::infinite();
  const TimeGrid& grid = model.grid();
  const auto d = phi.displacements();
  std::vector<double> u(grid.steps());
  for (std::size_t i = 0; i < grid.steps(); ++i) u[i] = (d[i + 1] - d[i]) / grid.dt();
  return RateValue::achieved(Control(grid, 1, std::move(u)));
}

RateValue rate_variational(const ProcessModel& model, const Point& x, const DiscretePath& phi, double tol) {
  require_on_grid(model, phi);
  if (x.size() != model.state_dim()) throw ShapeError("initial point has wrong dimension");
  const Point x0 = model.rate_origin(x);
  if (!starts_at(phi, x0)) return RateValue::infinite();

  const TimeGrid& grid = model.grid();
  const double dt = grid.dt();
  const std::size_t m = model.state_dim();
  const std::size_t k = model.channels();
  const auto* sde = std::get_if<FiniteSDE>(&model.kind());
  const auto* spde = std::get_if<GalerkinSPDE>(&model.kind());

  Eigen::ArrayXd decay = Eigen::ArrayXd::Ones(m), factor = Eigen::ArrayXd::Ones(m);
  if (spde) {
    for (std::size_t c = 0; c < m; ++c) {
      const double z = spde->eigenvalues[c] * dt;
      decay[c] = std::exp(-z);
      factor[c] = -std::expm1(-z) / z;
    }
  }

  std::vector<double> u(grid.steps() * k);
  Eigen::VectorXd state(m), next(m), b(m), r(m);
  Eigen::MatrixXd g(m, k);
  for (std::size_t i = 0; i < grid.steps(); ++i) {
    if (model.translation_type()) {
      r[0] = phi.displacement(i + 1)[0] - phi.displacement(i)[0];
      next[0] = phi.value(i + 1);
      g.setConstant(dt);
    } else {
      for (std::size_t c = 0; c < m; ++c) {
        state[c] = phi.value(i, c);
        next[c] = phi.value(i + 1, c);
      }
      if (sde) {
        sde->drift(state, b);
        sde->diffusion(state, g);
        r = next - state - b * dt;
        g *= dt;
      } else {
        spde->drift(state, b);
        spde->noise(state, g);
        r = next - (decay * state.array()).matrix() - (factor * (b * dt).array()).matrix();
        g = factor.matrix().asDiagonal() * g * dt;
      }
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(g);
    const Eigen::VectorXd ui = cod.solve(r);
    const double residual = (g * ui - r).lpNorm<Eigen::Infinity>();
    if (!ui.allFinite() || residual > tol * (1.0 + next.lpNorm<Eigen::Infinity>())) return RateValue::infinite();
    for (std::size_t c = 0; c < k; ++c) u[i * k + c] = ui[static_cast<Eigen::Index>(c)];
  }

  Control control(grid, k, std::move(u));
  const DiscretePath replay = skeleton(model, x, control);
  double scale = 1.0;
  for (std::size_t i = 0; i < phi.points(); ++i)
    for (std::size_t c = 0; c < m; ++c) scale = std::max(scale, std::abs(phi.value(i, c)));
  if (sup_metric(replay, phi) > tol * scale) return RateValue::infinite();
  return RateValue::achieved(std::move(control));
}

RateValue rate_of(const ProcessModel& model, const Point& x, const DiscretePath& phi) {
  if (model.translation_type()) {
    if (x.size() != 1) throw ShapeError("initial point has wrong dimension");
    return rate_closed_form(model, x[0], phi);
  }
  return rate_variational(model, x, phi);
}

LevelSetSample sample_level_set(const ProcessModel& model, const Point& x, double s, std::size_t count,
                                std::uint64_t seed) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("level s must be finite and >= 0");
  if (count < 1) throw ConfigError("level-set sample needs count >= 1");
  const TimeGrid& grid = model.grid();
  const std::size_t k = model.channels();
  const std::size_t draws = s > 0.0 ? count : 1;
  std::vector<Control> controls;
  controls.reserve(draws);
  controls.push_back(Control::zero(grid, k));
  for (std::size_t idx = 1; idx < draws; ++idx) {
    auto gen = substream(seed, idx, StreamDomain::level_set);
    std::normal_distribution<double> normal;
    std::vector<double> v(grid.steps() * k);
    double norm2 = 0.0;
    for (double& e : v) {
      e = normal(gen);
      norm2 += e * e;
    }
    norm2 *= grid.dt();
    const double r = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    const double scale = std::sqrt(2.0 * r * s / norm2);
    for (double& e : v) e *= scale;
    Control u(grid, k, std::move(v));
    if (u.energy() > s) u = u.scaled(std::sqrt(s / u.energy()));
    controls.push_back(std::move(u));
  }
  std::vector<DiscretePath> paths;
  std::vector<double> rates;
  paths.reserve(draws);
  for (const auto& u : controls) {
    paths.push_back(skeleton(model, x, u));
    rates.push_back(u.energy());
  }
  return LevelSetSample{x, s, seed, PathSet(std::move(paths)), std::move(controls), std::move(rates)};
}

namespace {

/// Minimum of sum_i (v_{i+1} - v_i)^2 over v in boxes [lo_i, hi_i], with lo = hi at both ends.
double taut_string_sum_squares(const std::vector<double>& lo, const std::vector<double>& hi) {
  const std::size_t last = lo.size() - 1;
  double total = 0.0;
  std::size_t a = 0;
  double v = lo[0];
  auto segment = [&](std::size_t b, double w) {
    const double len = static_cast<double>(b - a);
    const double slope = (w - v) / len;
    total += slope * slope * len;
    a = b;
    v = w;
  };
  while (a < last) {
    double smax = kInf, smin = -kInf;
    std::size_t ku = a, kl = a;
    bool bent = false;
    for (std::size_t j = a + 1; j <= last; ++j) {
      const double dj = static_cast<double>(j - a);
      const double sl = (lo[j] - v) / dj;
      const double sh = (hi[j] - v) / dj;
      if (sl > smax) {
        segment(ku, hi[ku]);
        bent = true;
        break;
      }
      if (sh < smin) {
        segment(kl, lo[kl]);
        bent = true;
        break;
      }
      if (sh <= smax) {
        smax = sh;
        ku = j;
      }
      if (sl >= smin) {
        smin = sl;
        kl = j;
      }
    }
    if (!bent) segment(last, lo[last]);
  }
  return total;
}

}  // namespace

double min_tube_energy(const ProcessModel& model, const Point& x, const DiscretePath& psi, double r) {
  require_brownian(model, "min_tube_energy");
  require_on_grid(model, psi);
  if (!(r >= 0.0)) throw ConfigError("tube radius must be >= 0");
  const double x0 = model.rate_origin(x)[0];
  const std::size_t n = model.grid().steps();
  const double shift = psi.origin()[0] - x0;
  const auto d = psi.displacements();
  const double c0 = shift + d[0];
  if (std::abs(c0) > r) return kInf;
  // Reflect the tube about t = T; the free-end minimum is half of the pinned one.
  std::vector<double> lo(2 * n + 1), hi(2 * n + 1);
  for (std::size_t j = 0; j <= 2 * n; ++j) {
    const std::size_t i = j <= n ? j : 2 * n - j;
    const double c = shift + d[i];
    lo[j] = c - r;
    hi[j] = c + r;
  }
  lo[0] = hi[0] = 0.0;
  lo[2 * n] = hi[2 * n] = 0.0;
  return 0.25 * taut_string_sum_squares(lo, hi) / model.grid().dt();
}

ExactLevelSet::ExactLevelSet(ProcessModel model, Point x, double level)
    : model_(std::move(model)), x_(std::move(x)), level_(level) {
  require_brownian(model_, "ExactLevelSet");
  if (!(level_ >= 0.0) || !std::isfinite(level_)) throw ConfigError("level must be finite and >= 0");
  if (x_.size() != 1) throw ShapeError("initial point has wrong dimension");
}

double ExactLevelSet::distance(const DiscretePath& psi) const {
  const double x0 = model_.rate_origin(x_)[0];
  const double shift = psi.origin()[0] - x0;
  double lo = std::abs(shift + psi.displacement(0)[0]);
  double hi = 0.0;
  for (double v : psi.displacements()) hi = std::max(hi, std::abs(shift + v));
  double f_lo = min_tube_energy(model_, x_, psi, lo) - level_;
  if (f_lo <= 0.0) return lo;
  double f_hi = min_tube_energy(model_, x_, psi, hi) - level_;
  // Illinois iteration on the convex, nonincreasing tube energy.
  int side = 0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++iter) {
    double mid = std::isfinite(f_lo) ? (lo * f_hi - hi * f_lo) / (f_hi - f_lo) : 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    const double f_mid = min_tube_energy(model_, x_, psi, mid) - level_;
    if (f_mid <= 0.0) {
      hi = mid;
      f_hi = f_mid;
      if (side == -1) f_lo *= 0.5;
      side = -1;
    } else {
      lo = mid;
      f_lo = f_mid;
      if (side == 1) f_hi *= 0.5;
      side = 1;
    }
  }
  return hi;
}

bool ExactLevelSet::at_least(const DiscretePath& psi, double delta) const {
  return min_tube_energy(model_, x_, psi, delta) > level_;
}

std::vector<DiscretePath> ExactLevelSet::representatives() const {
  return {DiscretePath::constant(model_.grid(), model_.rate_origin(x_))};
}

std::string ExactLevelSet::describe() const {
  std::ostringstream out;
  out << "ExactLevelSet(x=" << x_[0] << ", s=" << level_ << ")";
  return out.str();
}

CandidatePool candidate_pool(const ProcessModel& model, const Point& x, const std::vector<DiscretePath>& anchors,
                             const InfBudget& budget) {
  LevelSetSample sample = sample_level_set(model, x, budget.level, budget.count, budget.seed);
  CandidatePool pool{sample.paths.members(), std::move(sample.controls), std::move(sample.rates)};
  for (const auto& anchor : anchors) {
    if (!(anchor.grid() == model.grid()) || anchor.dim() != model.state_dim()) continue;
    RateValue rv = rate_of(model, x, anchor);
    if (!rv.finite()) continue;
    const Control& u = *rv.control();
    pool.paths.push_back(anchor);
    pool.controls.push_back(u);
    pool.rates.push_back(u.energy());
    if (budget.ray_points < 2) continue;
    for (std::size_t k = 0; k < budget.ray_points; ++k) {
      const double lambda = 2.0 * static_cast<double>(k) / static_cast<double>(budget.ray_points - 1);
      if (lambda == 1.0) continue;
      Control scaled = u.scaled(lambda);
      pool.paths.push_back(skeleton(model, x, scaled));
      pool.rates.push_back(scaled.energy());
      pool.controls.push_back(std::move(scaled));
    }
  }
  return pool;
}

InfimumEstimate inf_h_plus_I(const ProcessModel& model, const Point& x, const TestFunction& h,
                             const InfBudget& budget) {
  if (budget.level < 2.0 * h.bound())
    throw ConfigError("inf_h_plus_I needs level >= 2 bound(h) = " + std::to_string(2.0 * h.bound()));
  CandidatePool pool = candidate_pool(model, x, h.anchors(), budget);
  std::size_t best = 0;
  double value = kInf;
  for (std::size_t i = 0; i < pool.paths.size(); ++i) {
    const double v = h(pool.paths[i]) + pool.rates[i];
    if (v < value) {
      value = v;
      best = i;
    }
  }
  return InfimumEstimate{value, pool.paths[best], pool.controls[best], pool.paths.size()};
}

}  // namespace ulab
