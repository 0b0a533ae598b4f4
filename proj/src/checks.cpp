#include "ulab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include "ulab/error.hpp"
#include "ulab/numeric.hpp"

namespace ulab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_common(const ProcessModel& model, const IndexSetSample& a) {
  if (a.points.empty()) throw ConfigError("index set must be nonempty");
  for (const auto& x : a.points)
    if (x.size() != model.state_dim()) throw ShapeError("index point has wrong dimension for the model");
}

InfBudget search_budget(const CheckBudget& b, double level) {
  return InfBudget{level, b.level_set_count, b.level_set_seed, b.ray_points};
}

/// Lower bound a log P + S, with S = +inf making the bound vacuous.
double lower_gap(double log_value, double sup_rate) {
  if (sup_rate == kInf) return kInf;
  return log_value + sup_rate;
}

/// Upper bound a log P + T; with T = +inf only a null probability is consistent.
double upper_gap(double log_value, double inf_rate) {
  if (inf_rate == kInf) return log_value == -kInf ? -kInf : kInf;
  return log_value + inf_rate;
}

TrendSummary summarize(const std::string& bound, const std::string& kind, const std::vector<double>& eps,
                       const std::vector<GapCell>& cells, double slack,
                       const std::function<bool(const GapCell&)>& select) {
  TrendSummary t;
  t.bound = bound;
  t.eps = eps;
  for (double e : eps) {
    double agg = kind == "lower" ? kInf : -kInf;
    bool any = false;
    for (const auto& c : cells) {
      if (c.eps != e || !select(c)) continue;
      any = true;
      if (kind == "lower")
        agg = std::min(agg, c.gap);
      else if (kind == "upper")
        agg = std::max(agg, c.gap);
      else
        agg = std::max(agg, std::abs(c.gap));
    }
    t.gaps.push_back(any ? agg : std::numeric_limits<double>::quiet_NaN());
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (std::isfinite(t.gaps[i])) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(t.gaps[i]);
    }
  }
  const LineFit fit = fit_line(lx, ly);
  t.slope = fit.slope;
  t.slope_se = fit.slope_se;
  t.verdict = trend_verdict(kind, t.gaps, slack);
  return t;
}

CheckReport base_report(const std::string& definition, const ProcessModel& model, const IndexSetSample& a,
                        const EpsilonSchedule& schedule, const CheckBudget& budget) {
  CheckReport r;
  r.definition = definition;
  r.model = model.name();
  r.index_set = a;
  r.eps = schedule.values();
  r.notes["index_set"] = "finite surrogate '" + a.label + "' for the class " + to_string(a.intended);
  r.notes["speed"] = schedule.speed_label();
  r.settings["samples"] = static_cast<double>(budget.mc.samples);
  r.settings["seed"] = static_cast<double>(budget.mc.seed);
  r.settings["level_set_count"] = static_cast<double>(budget.level_set_count);
  r.settings["level_set_seed"] = static_cast<double>(budget.level_set_seed);
  r.settings["slack"] = budget.slack;
  r.settings["tilt"] = budget.tilt ? 1.0 : 0.0;
  r.settings["grid_steps"] = static_cast<double>(model.grid().steps());
  r.settings["horizon"] = model.grid().horizon();
  return r;
}

}  // namespace

std::string to_string(IndexClass c) {
  switch (c) {
    case IndexClass::all_subsets:
      return "all-subsets";
    case IndexClass::bounded:
      return "bounded";
    case IndexClass::compact:
      return "compact";
  }
  return "bounded";
}

IndexClass index_class_from_string(const std::string& s) {
  if (s == "all-subsets") return IndexClass::all_subsets;
  if (s == "bounded") return IndexClass::bounded;
  if (s == "compact") return IndexClass::compact;
  throw ConfigError("unknown index class '" + s + "' (all-subsets, bounded, compact)");
}

double IndexSetSample::radius() const {
  double r = 0.0;
  for (const auto& x : points) {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    r = std::max(r, std::sqrt(sq));
  }
  return r;
}

IndexSetSample make_index_set(std::string label, std::vector<double> scalars, IndexClass intended) {
  IndexSetSample a{std::move(label), {}, intended};
  for (double v : scalars) a.points.push_back({v});
  return a;
}

const TrendSummary* CheckReport::trend(const std::string& bound) const {
  for (const auto& t : trends)
    if (t.bound == bound) return &t;
  return nullptr;
}

std::string trend_verdict(const std::string& kind, const std::vector<double>& gaps, double slack) {
  std::vector<double> g;
  for (double v : gaps)
    if (!std::isnan(v)) g.push_back(v);
  if (g.empty()) return kInconclusive;
  if (kind == "lower") {
    if (std::any_of(g.begin(), g.end(), [](double v) { return v == -kInf; })) return kFailsInfCell;
    if (std::all_of(g.begin(), g.end(), [](double v) { return v == kInf; })) return kVacuous;
    if (g.back() >= -slack) return kHoldsTrend;
    return g.back() <= g.front() ? kFailsTrend : kInconclusive;
  }
  if (kind == "upper") {
    if (std::any_of(g.begin(), g.end(), [](double v) { return v == kInf; })) return kFailsTrend;
    if (g.back() <= slack) return kHoldsTrend;
    return g.back() >= g.front() ? kFailsTrend : kInconclusive;
  }
  if (g.back() <= slack) return kHoldsTrend;
  return g.back() >= g.front() - slack ? kFailsTrend : kInconclusive;
}

std::string combine_verdicts(const std::vector<TrendSummary>& trends) {
  if (trends.empty()) return kInconclusive;
  for (const auto& t : trends)
    if (t.verdict == kFailsInfCell) return kFailsInfCell;
  for (const auto& t : trends)
    if (t.verdict == kFailsTrend) return kFailsTrend;
  bool any_holds = false;
  for (const auto& t : trends) {
    if (t.verdict == kInconclusive) return kInconclusive;
    any_holds = any_holds || t.verdict == kHoldsTrend;
  }
  return any_holds ? kHoldsTrend : kVacuous;
}

bool verdict_matches(const std::string& expected, const std::string& observed) {
  if (expected == observed) return true;
  if (expected == "fails") return observed.rfind("fails", 0) == 0;
  return false;
}

CheckReport fwuldp_gaps(const ProcessModel& model, const IndexSetSample& a, double s0, double delta,
                        const EpsilonSchedule& schedule, const CheckBudget& budget) {
  check_common(model, a);
  if (!(s0 > 0.0)) throw ConfigError("s0 must be > 0");
  if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
  if (budget.s_levels < 2) throw ConfigError("need at least two s levels");
  if (budget.exact_level_sets && !model.translation_type())
    throw ConfigError("exact level-set distances need a Brownian model");

  CheckReport r = base_report("fwuldp", model, a, schedule, budget);
  r.delta = delta;
  r.s0 = s0;
  r.notes["level_sets"] = budget.exact_level_sets
                              ? "exact distance (minimum tube energy)"
                              : "sampled, " + std::to_string(budget.level_set_count) + " controls per set";
  r.notes["lower_centers"] =
      "sampled Phi_x(s0), " + std::to_string(budget.level_set_count) + " controls including the zero control";

  std::vector<double> levels(budget.s_levels);
  for (std::size_t l = 0; l < levels.size(); ++l)
    levels[l] = s0 * static_cast<double>(l) / static_cast<double>(levels.size() - 1);

  for (const auto& x : a.points) {
    const LevelSetSample centers = sample_level_set(model, x, s0, budget.level_set_count, budget.level_set_seed);
    std::vector<std::shared_ptr<const TargetSet>> sets;
    std::vector<std::shared_ptr<const ExactLevelSet>> exact;
    for (double s : levels) {
      if (budget.exact_level_sets) {
        exact.push_back(std::make_shared<const ExactLevelSet>(model, x, s));
        sets.push_back(exact.back());
      } else {
        const LevelSetSample ls = sample_level_set(model, x, s, budget.level_set_count, budget.level_set_seed);
        sets.push_back(std::make_shared<const SampledSet>(ls.paths));
      }
    }
    for (double eps : schedule.values()) {
      const double speed = schedule.speed(eps);
      for (std::size_t k = 0; k < centers.paths.size(); ++k) {
        const EventSpec ball = EventSpec::ball(centers.paths[k], delta);
        const Control& u = centers.controls[k];
        LogProbEstimate est = budget.tilt ? is_probability(model, x, eps, ball, u, budget.mc, Membership::open,
                                                           schedule.speed_fn())
                                          : mc_probability(model, x, eps, ball, budget.mc, Membership::open,
                                                           schedule.speed_fn());
        GapCell cell;
        cell.bound = "lower";
        cell.eps = eps;
        cell.x = x;
        cell.extra["phi_index"] = static_cast<double>(k);
        cell.terms["rate"] = centers.rates[k];
        cell.terms["log_value"] = est.log_value;
        cell.gap = est.log_value + centers.rates[k];
        cell.estimates.push_back(std::move(est));
        r.cells.push_back(std::move(cell));
      }
      const auto batch = simulate_indicators(model, x, eps, nullptr, budget.mc, [&](const DiscretePath& path) {
        std::vector<char> hit(levels.size());
        for (std::size_t l = 0; l < levels.size(); ++l)
          hit[l] = budget.exact_level_sets ? exact[l]->at_least(path, delta) : sets[l]->distance(path) >= delta;
        return hit;
      });
      for (std::size_t l = 0; l < levels.size(); ++l) {
        LogProbEstimate est = estimate_from_batch(batch, l, eps, x, false, budget.mc.seed, speed);
        GapCell cell;
        cell.bound = "upper";
        cell.eps = eps;
        cell.x = x;
        cell.extra["s"] = levels[l];
        cell.terms["level"] = levels[l];
        cell.terms["log_value"] = est.log_value;
        cell.gap = est.log_value + levels[l];
        cell.estimates.push_back(std::move(est));
        r.cells.push_back(std::move(cell));
      }
    }
  }
  r.trends.push_back(summarize("lower", "lower", r.eps, r.cells, budget.slack,
                               [](const GapCell& c) { return c.bound == "lower"; }));
  r.trends.push_back(summarize("upper", "upper", r.eps, r.cells, budget.slack,
                               [](const GapCell& c) { return c.bound == "upper"; }));
  r.verdict = combine_verdicts(r.trends);
  return r;
}

RateValue event_rate(const ProcessModel& model, const Point& x, const EventSpec& event, Membership kind, double eta,
                     const CheckBudget& budget) {
  const CandidatePool pool =
      candidate_pool(model, x, event_anchors(event, x), search_budget(budget, budget.search_level));
  std::size_t best = pool.paths.size();
  double value = kInf;
  for (std::size_t i = 0; i < pool.paths.size(); ++i) {
    if (pool.rates[i] < value && contains(pool.paths[i], event, kind, eta)) {
      value = pool.rates[i];
      best = i;
    }
  }
  if (best == pool.paths.size()) return RateValue::infinite();
  return RateValue::achieved(pool.controls[best]);
}

namespace {

LogProbEstimate estimate_event(const ProcessModel& model, const Point& x, double eps, const EventSpec& event,
                               Membership kind, const RateValue& toward, const EpsilonSchedule& schedule,
                               const CheckBudget& budget) {
  if (budget.tilt && toward.finite())
    return is_probability(model, x, eps, event, *toward.control(), budget.mc, kind, schedule.speed_fn());
  return mc_probability(model, x, eps, event, budget.mc, kind, schedule.speed_fn());
}

}  // namespace

CheckReport dzuldp_gaps(const ProcessModel& model, const IndexSetSample& a, const EventSpec& open,
                        const std::optional<EventSpec>& closed, const EpsilonSchedule& schedule,
                        const CheckBudget& budget) {
  check_common(model, a);
  CheckReport r = base_report("dzuldp", model, a, schedule, budget);
  r.notes["rates"] = "min over a level-set sample at s = " + short_number(budget.search_level) + " (" +
                     std::to_string(budget.level_set_count) + " controls) plus event anchors and " +
                     std::to_string(budget.ray_points) + "-point rays";
  r.notes["open_event"] = open.describe();
  if (closed) r.notes["closed_event"] = closed->describe();

  std::vector<RateValue> rate_g, rate_f;
  double sup_g = 0.0, inf_f = kInf;
  for (const auto& x : a.points) {
    rate_g.push_back(event_rate(model, x, open, Membership::open, 0.0, budget));
    sup_g = std::max(sup_g, rate_g.back().value());
    if (closed) {
      rate_f.push_back(event_rate(model, x, *closed, Membership::closed, 0.0, budget));
      inf_f = std::min(inf_f, rate_f.back().value());
    }
  }
  for (double eps : schedule.values()) {
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      const Point& x = a.points[i];
      LogProbEstimate est = estimate_event(model, x, eps, open, Membership::open, rate_g[i], schedule, budget);
      GapCell cell;
      cell.bound = "lower";
      cell.eps = eps;
      cell.x = x;
      cell.terms["log_value"] = est.log_value;
      cell.terms["rate_x"] = rate_g[i].value();
      cell.terms["sup_rate"] = sup_g;
      cell.gap = lower_gap(est.log_value, sup_g);
      cell.estimates.push_back(std::move(est));
      r.cells.push_back(std::move(cell));
      if (!closed) continue;
      LogProbEstimate up = estimate_event(model, x, eps, *closed, Membership::closed, rate_f[i], schedule, budget);
      GapCell ucell;
      ucell.bound = "upper";
      ucell.eps = eps;
      ucell.x = x;
      ucell.terms["log_value"] = up.log_value;
      ucell.terms["rate_x"] = rate_f[i].value();
      ucell.terms["inf_rate"] = inf_f;
      ucell.gap = upper_gap(up.log_value, inf_f);
      ucell.estimates.push_back(std::move(up));
      r.cells.push_back(std::move(ucell));
    }
  }
  r.trends.push_back(summarize("lower", "lower", r.eps, r.cells, budget.slack,
                               [](const GapCell& c) { return c.bound == "lower"; }));
  if (closed)
    r.trends.push_back(summarize("upper", "upper", r.eps, r.cells, budget.slack,
                                 [](const GapCell& c) { return c.bound == "upper"; }));
  r.verdict = combine_verdicts(r.trends);
  return r;
}

namespace {

void laplace_cells(CheckReport& r, const ProcessModel& model, const Point& x, const TestFunction& h,
                   std::size_t h_index, const EpsilonSchedule& schedule, const CheckBudget& budget) {
  const double level = std::max(budget.search_level, 2.0 * h.bound());
  const InfimumEstimate inf = inf_h_plus_I(model, x, h, search_budget(budget, level));
  for (double eps : schedule.values()) {
    const Control* tilt = budget.tilt ? &inf.control : nullptr;
    LaplaceEstimate lap = laplace_functional(model, x, eps, h, budget.mc, tilt, schedule.speed_fn());
    GapCell cell;
    cell.bound = "laplace";
    cell.eps = eps;
    cell.x = x;
    cell.extra["h_index"] = static_cast<double>(h_index);
    cell.terms["laplace"] = lap.value;
    cell.terms["inf_h_plus_I"] = inf.value;
    cell.terms["inf_candidates"] = static_cast<double>(inf.candidates);
    cell.gap = lap.value + inf.value;
    cell.terms["abs_gap"] = std::abs(cell.gap);
    cell.laplace = std::move(lap);
    r.cells.push_back(std::move(cell));
  }
}

}  // namespace

CheckReport ulp_gap(const ProcessModel& model, const IndexSetSample& a, const TestFunctionFactory& h,
                    const EpsilonSchedule& schedule, const CheckBudget& budget) {
  check_common(model, a);
  CheckReport r = base_report("ulp", model, a, schedule, budget);
  r.notes["gap"] = "signed laplace + inf{h + I}; the trend is the sup over A of its absolute value";
  r.notes["test_function"] = h(a.points.front()).describe();
  for (const auto& x : a.points) laplace_cells(r, model, x, h(x), 0, schedule, budget);
  r.trends.push_back(summarize("laplace", "laplace", r.eps, r.cells, budget.slack,
                               [](const GapCell&) { return true; }));
  r.verdict = combine_verdicts(r.trends);
  return r;
}

CheckReport ulp_gap(const ProcessModel& model, const IndexSetSample& a, const TestFunction& h,
                    const EpsilonSchedule& schedule, const CheckBudget& budget) {
  return ulp_gap(model, a, [&h](const Point&) { return h; }, schedule, budget);
}

CheckReport eulp_gap(const ProcessModel& model, const IndexSetSample& a, const EquicontinuousFamily& family,
                     const EpsilonSchedule& schedule, const CheckBudget& budget) {
  check_common(model, a);
  CheckReport r = base_report("eulp", model, a, schedule, budget);
  r.notes["family"] = std::to_string(family.size()) + " members, bound " + short_number(family.bound()) +
                      ", Lipschitz " + short_number(family.lipschitz());
  for (const auto& x : a.points)
    for (std::size_t k = 0; k < family.size(); ++k) laplace_cells(r, model, x, family.members()[k], k, schedule, budget);
  r.trends.push_back(summarize("laplace", "laplace", r.eps, r.cells, budget.slack,
                               [](const GapCell&) { return true; }));
  r.verdict = combine_verdicts(r.trends);
  return r;
}

CheckReport luldp_gaps(const ProcessModel& model, const IndexSetSample& a, const EventSpec& open,
                       const std::optional<EventSpec>& closed, const std::vector<double>& etas,
                       const EpsilonSchedule& schedule, const CheckBudget& budget) {
  check_common(model, a);
  if (etas.empty()) throw ConfigError("eta grid must be nonempty");
  for (double eta : etas)
    if (!(eta > 0.0)) throw ConfigError("eta values must be > 0");
  CheckReport r = base_report("luldp", model, a, schedule, budget);
  r.eta = etas;
  r.notes["open_event"] = open.describe();
  if (closed) r.notes["closed_event"] = closed->describe();
  r.notes["rates"] = "min over a level-set sample at s = " + short_number(budget.search_level) +
                     " plus event anchors and rays, filtered by margin > eta (G) or >= -eta (F)";

  std::vector<double> sup_g(etas.size(), 0.0), inf_f(etas.size(), kInf);
  for (std::size_t e = 0; e < etas.size(); ++e) {
    for (const auto& x : a.points) {
      sup_g[e] = std::max(sup_g[e], event_rate(model, x, open, Membership::open, etas[e], budget).value());
      if (closed)
        inf_f[e] = std::min(inf_f[e], event_rate(model, x, *closed, Membership::closed, etas[e], budget).value());
    }
  }
  std::vector<RateValue> toward_g, toward_f;
  for (const auto& x : a.points) {
    toward_g.push_back(event_rate(model, x, open, Membership::open, 0.0, budget));
    if (closed) toward_f.push_back(event_rate(model, x, *closed, Membership::closed, 0.0, budget));
  }
  for (double eps : schedule.values()) {
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      const Point& x = a.points[i];
      const LogProbEstimate low = estimate_event(model, x, eps, open, Membership::open, toward_g[i], schedule, budget);
      std::optional<LogProbEstimate> up;
      if (closed) up = estimate_event(model, x, eps, *closed, Membership::closed, toward_f[i], schedule, budget);
      for (std::size_t e = 0; e < etas.size(); ++e) {
        GapCell cell;
        cell.bound = "lower";
        cell.eps = eps;
        cell.x = x;
        cell.extra["eta"] = etas[e];
        cell.terms["log_value"] = low.log_value;
        cell.terms["sup_rate_eta"] = sup_g[e];
        cell.gap = lower_gap(low.log_value, sup_g[e]);
        cell.estimates.push_back(low);
        r.cells.push_back(std::move(cell));
        if (!up) continue;
        GapCell ucell;
        ucell.bound = "upper";
        ucell.eps = eps;
        ucell.x = x;
        ucell.extra["eta"] = etas[e];
        ucell.terms["log_value"] = up->log_value;
        ucell.terms["inf_rate_eta"] = inf_f[e];
        ucell.gap = upper_gap(up->log_value, inf_f[e]);
        ucell.estimates.push_back(*up);
        r.cells.push_back(std::move(ucell));
      }
    }
  }
  for (double eta : etas) {
    const std::string tag = "eta=" + short_number(eta);
    r.trends.push_back(summarize("lower " + tag, "lower", r.eps, r.cells, budget.slack, [eta](const GapCell& c) {
      return c.bound == "lower" && c.extra.at("eta") == eta;
    }));
    if (closed)
      r.trends.push_back(summarize("upper " + tag, "upper", r.eps, r.cells, budget.slack, [eta](const GapCell& c) {
        return c.bound == "upper" && c.extra.at("eta") == eta;
      }));
  }
  // The definition takes eta -> 0, so the verdict comes from the smallest eta.
  const double eta_min = *std::min_element(etas.begin(), etas.end());
  std::vector<TrendSummary> decisive;
  for (const auto& t : r.trends)
    if (t.bound.find("eta=" + short_number(eta_min)) != std::string::npos) decisive.push_back(t);
  r.verdict = combine_verdicts(decisive);
  return r;
}

}  // namespace ulab
