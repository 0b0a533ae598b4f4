#include "ulab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>

#include "ulab/error.hpp"
#include "ulab/io.hpp"
#include "ulab/model_spec.hpp"
#include "ulab/rates.hpp"

namespace ulab {

using nlohmann::json;

namespace {

Point point_from_json(const json& v, std::size_t dim) {
  if (v.is_number()) return Point(dim, v.get<double>());
  auto p = v.get<std::vector<double>>();
  if (p.size() != dim) throw ShapeError("point has " + std::to_string(p.size()) + " coordinates, expected " +
                                        std::to_string(dim));
  return p;
}

DiscretePath line_path(const TimeGrid& grid, double start, double slope) {
  std::vector<double> disp(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) disp[i] = slope * grid.time(i);
  return DiscretePath::anchored(grid, {start}, std::move(disp));
}

std::shared_ptr<const TargetSet> level_set_from_json(const json& spec, const ProcessModel& model) {
  const Point x = point_from_json(spec.at("x"), model.state_dim());
  const double s = spec.at("s").get<double>();
  if (spec.value("exact", false)) return std::make_shared<const ExactLevelSet>(model, x, s);
  const LevelSetSample ls =
      sample_level_set(model, x, s, spec.value("count", std::size_t{32}), spec.value("seed", std::uint64_t{7}));
  return std::make_shared<const SampledSet>(ls.paths, "sampled Phi(s=" + format_double(s) + ")");
}

std::vector<double> numbers(const json& spec, const char* key) { return spec.at(key).get<std::vector<double>>(); }

}  // namespace

DiscretePath path_from_json(const json& spec, const ProcessModel& model, const Point& x) {
  const TimeGrid& grid = model.grid();
  if (spec.contains("line")) {
    const auto& l = spec.at("line");
    if (model.state_dim() != 1) throw ShapeError("line paths are scalar");
    return line_path(grid, l.value("start", 0.0), l.value("slope", 1.0));
  }
  if (spec.contains("constant")) return DiscretePath::constant(grid, point_from_json(spec.at("constant"), model.state_dim()));
  if (spec.contains("csv")) {
    DiscretePath p = read_path_csv(std::filesystem::path(spec.at("csv").get<std::string>()));
    if (!(p.grid() == grid) || p.dim() != model.state_dim())
      throw ShapeError("path file does not match the model grid and dimension");
    return p;
  }
  if (spec.contains("skeleton")) {
    const auto& s = spec.at("skeleton");
    if (x.empty()) throw ConfigError("skeleton paths need an index point");
    const Point c = point_from_json(s.at("control"), model.channels());
    return skeleton(model, x, Control::constant(grid, c));
  }
  throw ConfigError("path needs one of line, constant, csv, skeleton");
}

EventSpec event_from_json(const json& spec, const ProcessModel& model) {
  const std::string type = spec.at("type").get<std::string>();
  if (type == "ball") return EventSpec::ball(path_from_json(spec.at("center"), model), spec.at("radius").get<double>());
  if (type == "relative-ball")
    return EventSpec::relative_ball(path_from_json(spec.at("center"), model), spec.at("radius").get<double>());
  if (type == "union-of-balls") {
    std::vector<event::Ball> balls;
    for (const auto& b : spec.at("balls"))
      balls.push_back({path_from_json(b.at("center"), model), b.at("radius").get<double>()});
    return EventSpec::union_of_balls(std::move(balls));
  }
  if (type == "line-balls") {
    const auto starts = numbers(spec, "starts");
    const auto radii = numbers(spec, "radii");
    if (starts.size() != radii.size()) throw ConfigError("line-balls needs as many radii as starts");
    std::vector<event::Ball> balls;
    for (std::size_t i = 0; i < starts.size(); ++i)
      balls.push_back({line_path(model.grid(), starts[i], spec.value("slope", 1.0)), radii[i]});
    return EventSpec::union_of_balls(std::move(balls));
  }
  if (type == "terminal-at-least")
    return EventSpec::terminal_at_least(spec.value("coordinate", std::size_t{0}), spec.at("level").get<double>());
  if (type == "distance-at-least")
    return EventSpec::distance_at_least(level_set_from_json(spec.at("level_set"), model),
                                        spec.at("threshold").get<double>());
  if (type == "initial-equals")
    return EventSpec::initial_equals(point_from_json(spec.at("value"), model.state_dim()),
                                     spec.value("tolerance", 1e-9), event_from_json(spec.at("clause"), model));
  if (type == "complement") return EventSpec::complement(event_from_json(spec.at("inner"), model));
  if (type == "union" || type == "intersection") {
    std::vector<EventSpec> parts;
    for (const auto& p : spec.at("parts")) parts.push_back(event_from_json(p, model));
    return type == "union" ? EventSpec::any_of(std::move(parts)) : EventSpec::all_of(std::move(parts));
  }
  throw ConfigError("unknown event type '" + type + "'");
}

TestFunction test_function_from_json(const json& spec, const ProcessModel& model, const Point& x) {
  const std::string type = spec.at("type").get<std::string>();
  if (type == "constant") return TestFunction::constant(spec.at("value").get<double>());
  if (type == "capped-distance")
    return TestFunction::capped_distance(path_from_json(spec.at("center"), model, x), spec.at("scale").get<double>(),
                                         spec.at("width").get<double>());
  if (type == "capped-set-distance")
    return TestFunction::capped_set_distance(level_set_from_json(spec.at("level_set"), model),
                                             spec.at("scale").get<double>(), spec.at("width").get<double>(),
                                             spec.value("inverted", false));
  if (type == "min-over-centers") {
    const auto starts = numbers(spec, "starts");
    std::vector<double> weights;
    if (spec.contains("weights")) {
      weights = numbers(spec, "weights");
    } else {
      for (std::size_t n = 1; n <= starts.size(); ++n) weights.push_back(std::ldexp(1.0, static_cast<int>(n)));
    }
    std::vector<DiscretePath> centers;
    for (double s : starts) centers.push_back(line_path(model.grid(), s, spec.value("slope", 1.0)));
    return TestFunction::min_over_centers(std::move(centers), std::move(weights), spec.value("cap", 1.0));
  }
  if (type == "sum" || type == "min") {
    std::vector<TestFunction> parts;
    for (const auto& p : spec.at("parts")) parts.push_back(test_function_from_json(p, model, x));
    return type == "sum" ? TestFunction::sum(std::move(parts)) : TestFunction::minimum(std::move(parts));
  }
  throw ConfigError("unknown test function type '" + type + "'");
}

EquicontinuousFamily family_from_json(const json& spec, const ProcessModel& model, const IndexSetSample& a) {
  const std::string kind = spec.at("family").get<std::string>();
  if (kind == "constant") {
    std::vector<TestFunction> members;
    double bound = 0.0;
    for (double c : numbers(spec, "values")) {
      members.push_back(TestFunction::constant(c));
      bound = std::max(bound, std::abs(c));
    }
    return EquicontinuousFamily(std::move(members), bound, 0.0);
  }
  const double j = spec.at("j").get<double>();
  const double delta = spec.at("delta").get<double>();
  const double s = spec.at("s").get<double>();
  const std::size_t count = spec.value("count", std::size_t{8});
  const std::uint64_t seed = spec.value("seed", std::uint64_t{7});
  FamilyAnchors anchors;
  for (const auto& x : a.points) {
    if (kind == "lower") {
      const LevelSetSample ls = sample_level_set(model, x, s, count, seed);
      for (const auto& p : ls.paths) anchors.centers.push_back(p);
    } else if (kind == "upper") {
      if (spec.value("exact", model.translation_type())) {
        anchors.level_sets.push_back(std::make_shared<const ExactLevelSet>(model, x, s));
      } else {
        const LevelSetSample ls = sample_level_set(model, x, s, count, seed);
        anchors.level_sets.push_back(std::make_shared<const SampledSet>(ls.paths));
      }
    } else {
      throw ConfigError("unknown family '" + kind + "' (constant, lower, upper)");
    }
  }
  return make_family(kind == "lower" ? FamilyKind::lower : FamilyKind::upper, j, delta, anchors);
}

IndexSetSample index_set_from_json(const json& spec, std::size_t dim) {
  const IndexClass cls = index_class_from_string(spec.value("class", std::string("bounded")));
  IndexSetSample a;
  a.intended = cls;
  if (spec.contains("points")) {
    for (const auto& p : spec.at("points")) a.points.push_back(point_from_json(p, dim));
    a.label = spec.value("label", std::string("explicit"));
  } else if (spec.contains("integers")) {
    const auto& r = spec.at("integers");
    const long lo = r.at("lo").get<long>(), hi = r.at("hi").get<long>();
    for (long n = lo; n <= hi; ++n) a.points.push_back(Point(dim, static_cast<double>(n)));
    a.label = spec.value("label", "{" + std::to_string(lo) + ".." + std::to_string(hi) + "}");
  } else if (spec.contains("dyadic")) {
    const auto& r = spec.at("dyadic");
    const int m = r.at("m").get<int>();
    if (r.value("with_zero", false)) a.points.push_back(Point(dim, 0.0));
    for (int n = 1; n <= m; ++n) a.points.push_back(Point(dim, std::ldexp(1.0, -n)));
    a.label = spec.value("label", "{2^-n : n <= " + std::to_string(m) + "}" +
                                      (r.value("with_zero", false) ? std::string(" + {0}") : std::string()));
  } else if (spec.contains("range")) {
    const auto& r = spec.at("range");
    const double lo = r.at("lo").get<double>(), hi = r.at("hi").get<double>();
    const std::size_t count = r.at("count").get<std::size_t>();
    if (count < 2) throw ConfigError("range needs count >= 2");
    for (std::size_t i = 0; i < count; ++i)
      a.points.push_back(Point(dim, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1)));
    a.label = spec.value("label", "grid of [" + format_double(lo) + ", " + format_double(hi) + "]");
  } else if (spec.contains("norms")) {
    const std::string dir = spec.value("direction", std::string("mixed"));
    std::size_t idx = 0;
    for (double r : numbers(spec, "norms")) {
      Point p(dim, 0.0);
      const std::size_t pattern = dir == "e1" ? 0 : idx++ % 3;
      if (pattern == 0) {
        p[0] = r;
      } else if (pattern == 1) {
        std::fill(p.begin(), p.end(), r / std::sqrt(static_cast<double>(dim)));
      } else {
        p[dim - 1] = -r;
      }
      a.points.push_back(std::move(p));
    }
    a.label = spec.value("label", std::string("points at fixed norms"));
  } else {
    throw ConfigError("index set needs points, integers, dyadic, range or norms");
  }
  if (a.points.empty()) throw ConfigError("index set must be nonempty");
  return a;
}

EpsilonSchedule schedule_from_json(const json& spec) {
  if (spec.is_array()) return EpsilonSchedule(spec.get<std::vector<double>>());
  if (spec.contains("geometric")) {
    const auto& g = spec.at("geometric");
    return EpsilonSchedule::geometric(g.at("hi").get<double>(), g.at("lo").get<double>(),
                                      g.at("count").get<std::size_t>());
  }
  throw ConfigError("eps must be a list or {\"geometric\": {hi, lo, count}}");
}

CheckBudget budget_from_json(const json& spec, const ScenarioOptions& options) {
  CheckBudget b;
  b.mc.samples = options.samples.value_or(spec.value("samples", b.mc.samples));
  b.mc.seed = options.seed.value_or(spec.value("seed", b.mc.seed));
  b.mc.threads = options.threads;
  b.level_set_count = spec.value("level_set_count", b.level_set_count);
  b.level_set_seed = spec.value("level_set_seed", b.level_set_seed);
  b.search_level = spec.value("search_level", b.search_level);
  b.ray_points = spec.value("ray_points", b.ray_points);
  b.s_levels = spec.value("s_levels", b.s_levels);
  b.exact_level_sets = spec.value("exact_level_sets", b.exact_level_sets);
  b.tilt = spec.value("tilt", b.tilt);
  b.slack = spec.value("slack", b.slack);
  return b;
}

namespace {

CheckReport run_check(const json& config, const ScenarioOptions& options) {
  const std::string kind = config.at("kind").get<std::string>();
  const ProcessModel model = model_from_json(config.at("model"));
  const IndexSetSample a = index_set_from_json(config.at("index_set"), model.state_dim());
  const EpsilonSchedule schedule = schedule_from_json(config.at("eps"));
  const CheckBudget budget = budget_from_json(config.value("budget", json::object()), options);
  std::optional<EventSpec> closed;
  if (config.contains("closed")) closed = event_from_json(config.at("closed"), model);
  if (kind == "fwuldp")
    return fwuldp_gaps(model, a, config.at("s0").get<double>(), config.at("delta").get<double>(), schedule, budget);
  if (kind == "dzuldp") return dzuldp_gaps(model, a, event_from_json(config.at("open"), model), closed, schedule, budget);
  if (kind == "luldp")
    return luldp_gaps(model, a, event_from_json(config.at("open"), model), closed,
                      config.at("eta").get<std::vector<double>>(), schedule, budget);
  if (kind == "ulp") {
    const json h = config.at("h");
    return ulp_gap(model, a, [&](const Point& x) { return test_function_from_json(h, model, x); }, schedule, budget);
  }
  if (kind == "eulp") return eulp_gap(model, a, family_from_json(config.at("family"), model, a), schedule, budget);
  throw ConfigError("unknown check kind '" + kind + "'");
}

/// Balls of radius rb^-n around the lines cb^-n + t, n = 1..m.
EventSpec dyadic_balls(const ProcessModel& model, int m, double center_base, double radius_base) {
  std::vector<event::Ball> balls;
  for (int n = 1; n <= m; ++n)
    balls.push_back({line_path(model.grid(), std::pow(center_base, -n), 1.0), std::pow(radius_base, -n)});
  return EventSpec::union_of_balls(std::move(balls));
}

/// The lower cell with the smallest log value at the last eps.
const GapCell* worst_lower_cell(const CheckReport& r) {
  const GapCell* worst = nullptr;
  for (const auto& c : r.cells) {
    if (c.bound != "lower" || c.eps != r.eps.back()) continue;
    if (!worst || c.terms.at("log_value") < worst->terms.at("log_value")) worst = &c;
  }
  return worst;
}

void run_dz_sweep(const json& config, const ScenarioOptions& options, ScenarioBundle& bundle) {
  const ProcessModel model = model_from_json(config.at("model"));
  const EpsilonSchedule schedule = schedule_from_json(config.at("eps"));
  const CheckBudget budget = budget_from_json(config.value("budget", json::object()), options);
  const double cb = config.value("center_base", 2.0), rb = config.value("radius_base", 4.0);
  json rows = json::array();
  double first = 0.0, last = 0.0;
  for (int m : config.at("m_values").get<std::vector<int>>()) {
    json spec{{"dyadic", {{"m", m}}}, {"class", config.value("class", std::string("bounded"))}};
    const IndexSetSample a = index_set_from_json(spec, 1);
    CheckReport r = dzuldp_gaps(model, a, dyadic_balls(model, m, cb, rb), std::nullopt, schedule, budget);
    r.notes["sweep_m"] = std::to_string(m);
    const GapCell* worst = worst_lower_cell(r);
    const double inf_log = worst->terms.at("log_value");
    const double sup_rate = worst->terms.at("sup_rate");
    rows.push_back(json{{"m", m},
                        {"inf_log_value", json_number(inf_log)},
                        {"argmin_x", json_number(worst->x[0])},
                        {"hits", worst->estimates.front().hits},
                        {"n", worst->estimates.front().n},
                        {"sup_rate", json_number(sup_rate)},
                        {"verdict", r.verdict}});
    if (bundle.reports.empty()) first = inf_log;
    last = inf_log;
    bundle.observed = r.verdict;
    bundle.reports.push_back(std::move(r));
  }
  bundle.extra["sweep"] = rows;
  bundle.extra["decrease"] = json_number(first - last);
}

void run_hausdorff(const json& config, const ScenarioOptions& options, ScenarioBundle& bundle) {
  json mspec = config.value("model", json{{"model", "swapped-bm"}});
  const ProcessModel swapped = model_from_json(mspec);
  mspec["model"] = "translated-bm";
  const ProcessModel translated = model_from_json(mspec);
  const double s = config.value("s", 1.0);
  const std::size_t count = config.value("count", std::size_t{32});
  const std::uint64_t seed = config.value("level_set_seed", std::uint64_t{7});
  const PathSet z0 = sample_level_set(swapped, {0.0}, s, count, seed).paths;
  const PathSet x0 = sample_level_set(translated, {0.0}, s, count, seed).paths;
  json rows = json::array();
  for (int n : config.at("n_values").get<std::vector<int>>()) {
    const double xn = std::ldexp(1.0, -n);
    rows.push_back(json{
        {"n", n},
        {"x", json_number(xn)},
        {"swapped", json_number(hausdorff(sample_level_set(swapped, {xn}, s, count, seed).paths, z0))},
        {"translated", json_number(hausdorff(sample_level_set(translated, {xn}, s, count, seed).paths, x0))}});
  }
  bundle.extra["hausdorff"] = rows;
  bundle.extra["level_set"] = json{{"s", json_number(s)}, {"count", count}, {"seed", seed}};

  const json& check = config.at("check");
  const int m = check.at("m").get<int>();
  const EpsilonSchedule schedule = schedule_from_json(check.at("eps"));
  const CheckBudget budget = budget_from_json(check.value("budget", json::object()), options);
  const IndexSetSample a =
      index_set_from_json(json{{"dyadic", {{"m", m}, {"with_zero", true}}}, {"class", "compact"}}, 1);
  CheckReport rz = dzuldp_gaps(swapped, a, dyadic_balls(swapped, m, 2.0, 4.0), std::nullopt, schedule, budget);
  CheckReport rx =
      dzuldp_gaps(translated, a, dyadic_balls(translated, m, 2.0, 4.0), std::nullopt, schedule, budget);
  const std::string contrast_expected = check.value("contrast_expected", std::string(kVacuous));
  bundle.extra["contrast"] = json{{"model", translated.name()},
                                  {"verdict", rx.verdict},
                                  {"expected", contrast_expected},
                                  {"matches", verdict_matches(contrast_expected, rx.verdict)}};
  bundle.observed = rz.verdict;
  bundle.reports.push_back(std::move(rz));
  bundle.reports.push_back(std::move(rx));
}

void run_control_conv(const json& config, const ScenarioOptions& options, ScenarioBundle& bundle) {
  const ProcessModel model = model_from_json(config.at("model"));
  const IndexSetSample xs = index_set_from_json(config.at("x_sample"), model.state_dim());
  const json b = config.value("budget", json::object());
  ConvergenceBudget budget;
  budget.controls = b.value("controls", budget.controls);
  budget.samples = options.samples.value_or(b.value("samples", budget.samples));
  budget.seed = options.seed.value_or(b.value("seed", budget.seed));
  budget.threads = options.threads;
  const ConvergenceTable table = control_conv(model, xs, config.at("N").get<double>(),
                                              config.at("delta").get<double>(),
                                              config.at("eps").get<std::vector<double>>(), budget);
  const double max_final = config.value("max_final_prob", 0.05);
  bool nonincreasing = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    nonincreasing = nonincreasing && table.rows[i].sup_prob <= table.rows[i - 1].sup_prob_high;
  const double final_prob = table.rows.back().sup_prob;
  bundle.observed = final_prob <= max_final && nonincreasing ? kHoldsTrend : kFailsTrend;
  bundle.extra["final_sup_prob"] = json_number(final_prob);
  bundle.extra["max_final_prob"] = json_number(max_final);
  bundle.extra["nonincreasing_within_ci"] = nonincreasing;
  bundle.extra["slope"] = json_number(table.slope);
  bundle.extra["slope_se"] = json_number(table.slope_se);
  if (config.contains("moments")) {
    const json& mo = config.at("moments");
    const MomentReport mr = moment_bound_check(model, mo.at("R").get<double>(), mo.at("N").get<double>(),
                                               mo.value("p", 2.0), mo.at("eps").get<double>(),
                                               mo.value("samples", std::size_t{20}), budget.seed,
                                               mo.value("controls", std::size_t{6}));
    bundle.extra["moments"] = to_json(mr);
  }
  if (config.contains("weak_continuity")) {
    const json& wc = config.at("weak_continuity");
    const Point x(model.state_dim(), wc.value("x", 0.0));
    bundle.extra["weak_continuity"] =
        to_json(weak_continuity_check(model, x, wc.at("frequencies").get<std::vector<std::size_t>>()));
  }
  bundle.convergence = table;
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  const std::filesystem::path dir(ULAB_SCENARIO_DIR);
  if (!std::filesystem::is_directory(dir)) return names;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

json load_scenario(const std::string& name_or_file) {
  std::filesystem::path file(name_or_file);
  if (!std::filesystem::is_regular_file(file)) file = std::filesystem::path(ULAB_SCENARIO_DIR) / (name_or_file + ".json");
  if (!std::filesystem::is_regular_file(file)) {
    std::string known;
    for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown scenario '" + name_or_file + "' (" + known + ")");
  }
  std::ifstream in(file);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse scenario " + file.string() + ": " + e.what());
  }
}

ScenarioBundle run_scenario(const json& config, const ScenarioOptions& options) {
  ScenarioBundle bundle;
  try {
    bundle.name = config.value("name", std::string("unnamed"));
    bundle.description = config.value("description", std::string());
    bundle.expected = config.value("expected", std::string());
    const std::string kind = config.at("kind").get<std::string>();
    if (kind == "dz-sweep") {
      run_dz_sweep(config, options, bundle);
    } else if (kind == "hausdorff") {
      run_hausdorff(config, options, bundle);
    } else if (kind == "control-conv") {
      run_control_conv(config, options, bundle);
    } else {
      bundle.reports.push_back(run_check(config, options));
      bundle.observed = bundle.reports.back().verdict;
    }
    bool contrasts_ok = true;
    if (config.contains("contrasts")) {
      json out = json::array();
      for (const auto& c : config.at("contrasts")) {
        CheckReport r = run_check(c, options);
        const std::string expected = c.value("expected", std::string());
        const bool ok = expected.empty() || verdict_matches(expected, r.verdict);
        contrasts_ok = contrasts_ok && ok;
        out.push_back(json{{"definition", r.definition}, {"verdict", r.verdict}, {"expected", expected},
                           {"matches", ok}});
        bundle.reports.push_back(std::move(r));
      }
      bundle.extra["contrasts"] = out;
    }
    if (bundle.extra.contains("contrast")) contrasts_ok = contrasts_ok && bundle.extra["contrast"]["matches"].get<bool>();
    bundle.passed = !bundle.expected.empty() && verdict_matches(bundle.expected, bundle.observed) && contrasts_ok;
  } catch (const json::exception& e) {
    throw ConfigError("invalid scenario '" + bundle.name + "': " + e.what());
  }
  return bundle;
}

json to_json(const ScenarioBundle& bundle) {
  json reports = json::array();
  for (const auto& r : bundle.reports) reports.push_back(to_json(r));
  json out{{"name", bundle.name},
           {"description", bundle.description},
           {"expected", bundle.expected},
           {"verdict", bundle.observed},
           {"passed", bundle.passed},
           {"reports", reports},
           {"extra", bundle.extra}};
  if (bundle.convergence) out["convergence"] = to_json(*bundle.convergence);
  return out;
}

}  // namespace ulab
