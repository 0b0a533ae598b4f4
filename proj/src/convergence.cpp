#include "ulab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ulab/error.hpp"
#include "ulab/estimators.hpp"
#include "ulab/numeric.hpp"
#include "ulab/parallel.hpp"
#include "ulab/rng.hpp"

namespace ulab {

std::vector<Control> sample_control_ball(const TimeGrid& grid, std::size_t channels, double n, std::size_t count,
                                         std::uint64_t seed) {
  if (!(n >= 0.0)) throw ConfigError("control ball radius N must be >= 0");
  if (count < 1) throw ConfigError("need at least one control");
  std::vector<Control> out;
  out.push_back(Control::zero(grid, channels));
  if (count > 1) {
    const double c = std::sqrt(n / (static_cast<double>(channels) * grid.horizon()));
    out.push_back(Control::constant(grid, Point(channels, c)));
  }
  for (std::size_t j = 2; j < count; ++j) {
    auto gen = substream(seed, j, StreamDomain::control_ball);
    std::normal_distribution<double> normal;
    std::vector<double> v(grid.steps() * channels);
    double norm2 = 0.0;
    for (double& e : v) {
      e = normal(gen);
      norm2 += e * e;
    }
    norm2 *= grid.dt();
    const double scale = std::sqrt(n / norm2);
    for (double& e : v) e *= scale;
    Control u(grid, channels, std::move(v));
    if (!u.in_ball(n)) u = u.scaled(std::sqrt(n / u.squared_norm()));
    out.push_back(std::move(u));
  }
  return out;
}

ConvergenceTable control_conv(const ProcessModel& model, const IndexSetSample& xs, double n, double delta,
                              const std::vector<double>& eps, const ConvergenceBudget& budget) {
  if (xs.points.empty()) throw ConfigError("x-sample must be nonempty");
  if (eps.empty()) throw ConfigError("eps grid must be nonempty");
  if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
  if (budget.samples < 1) throw ConfigError("need at least one sample per cell");
  if (std::holds_alternative<PerturbedBM>(model.kind()) || std::holds_alternative<SwappedBM>(model.kind()))
    throw ConfigError("control_conv takes the Galerkin SPDE, a finite SDE or translated Brownian motion");
  if (model.noise_growth() == NoiseGrowth::linear && xs.intended != IndexClass::bounded &&
      xs.intended != IndexClass::compact)
    throw ConfigError("linear-growth noise needs an x-sample tagged bounded");
  for (double e : eps)
    if (!(e >= 0.0)) throw ConfigError("eps values must be >= 0");
  for (const auto& x : xs.points)
    if (x.size() != model.state_dim()) throw ShapeError("x-sample point has wrong dimension");

  const std::vector<Control> controls =
      sample_control_ball(model.grid(), model.channels(), n, budget.controls, budget.seed);
  const std::size_t nx = xs.points.size();
  const std::size_t nu = controls.size();
  const std::size_t ns = budget.samples;

  std::vector<DiscretePath> skeletons;
  for (const auto& x : xs.points)
    for (const auto& u : controls) skeletons.push_back(skeleton(model, x, u));

  // errors[(cell * ns + s) * ne + e]
  const std::size_t ne = eps.size();
  std::vector<double> errors(nx * nu * ns * ne);
  parallel_for(nx * nu * ns, budget.threads, [&](std::size_t flat) {
    const std::size_t cell = flat / ns;
    const std::size_t s = flat % ns;
    const Point& x = xs.points[cell / nu];
    const Control& u = controls[cell % nu];
    const NoiseDraw noise = sample_noise(model.grid(), model.channels(), budget.seed, s);
    for (std::size_t e = 0; e < ne; ++e) {
      const DiscretePath path = solve_controlled(model, x, eps[e], u, &noise);
      errors[flat * ne + e] = sup_metric(path, skeletons[cell]);
    }
  });

  ConvergenceTable table;
  table.model = model.name();
  table.x_sample = xs;
  table.n_radius = n;
  table.delta = delta;
  table.controls = nu;
  table.samples = ns;
  table.seed = budget.seed;
  table.note =
      "deterministic controls only: the sup over adapted controls is bounded below by this surrogate, not computed";
  for (std::size_t e = 0; e < ne; ++e) {
    ConvergenceRow row;
    row.eps = eps[e];
    std::vector<double> pooled;
    pooled.reserve(nx * nu * ns);
    std::size_t worst_hits = 0;
    for (std::size_t cell = 0; cell < nx * nu; ++cell) {
      std::size_t hits = 0;
      for (std::size_t s = 0; s < ns; ++s) {
        const double err = errors[(cell * ns + s) * ne + e];
        pooled.push_back(err);
        if (err > delta) ++hits;
      }
      if (hits > worst_hits || cell == 0) {
        if (hits > worst_hits || worst_hits == 0) {
          row.worst_x = cell / nu;
          row.worst_control = cell % nu;
        }
        worst_hits = std::max(worst_hits, hits);
      }
    }
    row.sup_prob = static_cast<double>(worst_hits) / static_cast<double>(ns);
    row.sup_prob_high = wilson_interval(worst_hits, ns).high;
    row.median_error = quantile(pooled, 0.5);
    row.q90_error = quantile(pooled, 0.9);
    row.max_error = *std::max_element(pooled.begin(), pooled.end());
    table.rows.push_back(row);
  }
  std::vector<double> lx, ly;
  for (const auto& row : table.rows) {
    if (row.eps > 0.0 && row.median_error > 0.0) {
      lx.push_back(std::log(row.eps));
      ly.push_back(std::log(row.median_error));
    }
  }
  const LineFit fit = fit_line(lx, ly);
  table.slope = fit.slope;
  table.slope_se = fit.slope_se;
  table.intercept = fit.intercept;
  return table;
}

MomentReport moment_bound_check(const ProcessModel& model, double radius, double n, double p, double eps,
                                std::size_t samples, std::uint64_t seed, std::size_t controls) {
  if (!(p >= 2.0)) throw ConfigError("moment order p must be >= 2");
  if (!(radius >= 0.0)) throw ConfigError("radius R must be >= 0");
  if (!(eps >= 0.0)) throw ConfigError("eps must be >= 0");
  if (samples < 1) throw ConfigError("need at least one sample");
  const std::size_t m = model.state_dim();
  std::vector<Point> xs;
  xs.push_back(Point(m, 0.0));
  Point e1(m, 0.0);
  e1[0] = radius;
  xs.push_back(e1);
  xs.push_back(Point(m, radius / std::sqrt(static_cast<double>(m))));
  Point last(m, 0.0);
  last[m - 1] = -radius;
  xs.push_back(last);

  const std::vector<Control> us = sample_control_ball(model.grid(), model.channels(), n, controls, seed);
  MomentReport report;
  report.radius = radius;
  report.n_radius = n;
  report.p = p;
  report.eps = eps;
  report.samples = samples;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double xn = 0.0;
    for (double v : xs[i]) xn += v * v;
    for (std::size_t j = 0; j < us.size(); ++j) {
      MomentRow row{i, std::sqrt(xn), j, 0.0};
      std::vector<double> vals(samples);
      try {
        for (std::size_t s = 0; s < samples; ++s) {
          const NoiseDraw noise = sample_noise(model.grid(), model.channels(), seed, s);
          const DiscretePath path = solve_controlled(model, xs[i], eps, us[j], &noise);
          double sup = 0.0;
          for (std::size_t t = 0; t < path.points(); ++t) {
            double sq = 0.0;
            for (std::size_t k = 0; k < m; ++k) sq += path.value(t, k) * path.value(t, k);
            sup = std::max(sup, sq);
          }
          vals[s] = std::pow(sup, 0.5 * p);
        }
      } catch (const NumericalBlowup& e) {
        report.blowup = true;
        report.finite = false;
        report.blowup_step = e.step();
        return report;
      }
      row.moment = compensated_sum(vals) / static_cast<double>(samples);
      report.finite = report.finite && std::isfinite(row.moment);
      report.max_moment = std::max(report.max_moment, row.moment);
      report.rows.push_back(row);
    }
  }
  return report;
}

Control sine_control(const TimeGrid& grid, std::size_t channels, std::size_t frequency) {
  std::vector<double> v(grid.steps() * channels, 0.0);
  if (frequency > 0) {
    const double a = static_cast<double>(frequency) * std::numbers::pi / grid.horizon();
    for (std::size_t i = 0; i < grid.steps(); ++i)
      v[i * channels] = (std::cos(a * grid.time(i)) - std::cos(a * grid.time(i + 1))) / (a * grid.dt());
  }
  return Control(grid, channels, std::move(v));
}

std::vector<WeakContinuityRow> weak_continuity_check(const ProcessModel& model, const Point& x,
                                                     const std::vector<std::size_t>& frequencies) {
  const TimeGrid& grid = model.grid();
  const DiscretePath base = skeleton(model, x, Control::zero(grid, model.channels()));
  std::vector<WeakContinuityRow> rows;
  for (std::size_t f : frequencies) {
    if (4 * f > grid.steps())
      throw ConfigError("frequency " + std::to_string(f) + " exceeds grid.steps / 4 = " +
                        std::to_string(grid.steps() / 4));
    const DiscretePath path = skeleton(model, x, sine_control(grid, model.channels(), f));
    rows.push_back({f, sup_metric(path, base)});
  }
  return rows;
}

}  // namespace ulab
