#include "ulab/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ulab/checks.hpp"
#include "ulab/convergence.hpp"
#include "ulab/error.hpp"
#include "ulab/estimators.hpp"
#include "ulab/io.hpp"
#include "ulab/model_spec.hpp"
#include "ulab/rates.hpp"
#include "ulab/scenarios.hpp"

namespace ulab {

using nlohmann::json;

namespace {

struct Flags {
  std::string model;
  std::vector<double> x;
  std::vector<double> eps;
  std::string eps_grid;
  double delta = 0.0;
  double s0 = 0.0;
  std::vector<double> eta;
  std::size_t grid_steps = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  unsigned threads = 1;
  std::string path;

  double s = 1.0;
  std::size_t count = 32;
  std::uint64_t sample_index = 0;
  std::vector<double> control;
  std::vector<double> tilt;
  std::string event;
  std::string membership = "open";
  std::string h;
  std::string open;
  std::string closed;
  std::string family;
  std::string config;
  std::string index_class;
  std::string target;
  bool list = false;
  bool exact = false;
  bool no_tilt = false;
  std::size_t level_set_count = 32;
  std::vector<double> x_norms{0.0, 1.0, 1000.0};
  double n_radius = 4.0;
  std::size_t controls = 20;

  CLI::App* active = nullptr;

  bool given(const char* name) const { return active && active->count(name) > 0; }
};

void common_flags(CLI::App* sub, Flags& f, const std::string& default_model) {
  sub->add_option("--model", f.model,
                  "built-in model name or JSON file (" + builtin_model_names() + "); default " + default_model);
  sub->add_option("--x", f.x, "index points (scalar models) or the coordinates of one point")->delimiter(',');
  sub->add_option("--eps", f.eps, "noise levels")->delimiter(',');
  sub->add_option("--eps-grid", f.eps_grid, "lo:hi:count-geom");
  sub->add_option("--grid-steps", f.grid_steps, "time steps on [0, T]")->check(CLI::PositiveNumber);
  sub->add_option("--samples", f.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--out", f.out, "output file (stdout when absent)");
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", f.threads, "worker threads; outputs do not depend on it")->check(CLI::PositiveNumber);
}

json json_arg(const std::string& text) {
  try {
    if (!text.empty() && (text.front() == '{' || text.front() == '[')) return json::parse(text);
    std::ifstream in(text);
    if (!in) throw ConfigError("cannot open " + text);
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse JSON argument '" + text + "': " + e.what());
  }
}

json model_json(const Flags& f) {
  json spec = model_description(f.model);
  if (f.given("--grid-steps")) spec["steps"] = f.grid_steps;
  return spec;
}

std::vector<double> eps_values(const Flags& f, std::vector<double> fallback = {}) {
  if (!f.eps_grid.empty()) {
    std::vector<std::string> parts;
    std::stringstream ss(f.eps_grid);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    const std::string suffix = "-geom";
    if (parts.size() != 3 || parts[2].size() <= suffix.size() ||
        parts[2].compare(parts[2].size() - suffix.size(), suffix.size(), suffix) != 0)
      throw ConfigError("--eps-grid must look like lo:hi:count-geom, got '" + f.eps_grid + "'");
    try {
      const double lo = std::stod(parts[0]), hi = std::stod(parts[1]);
      const std::size_t count = std::stoul(parts[2].substr(0, parts[2].size() - suffix.size()));
      return EpsilonSchedule::geometric(hi, lo, count).values();
    } catch (const std::logic_error&) {
      throw ConfigError("--eps-grid must look like lo:hi:count-geom, got '" + f.eps_grid + "'");
    }
  }
  if (!f.eps.empty()) return f.eps;
  if (fallback.empty()) throw ConfigError("give --eps or --eps-grid");
  return fallback;
}

std::vector<Point> points_for(const ProcessModel& model, const Flags& f) {
  const std::size_t d = model.state_dim();
  std::vector<double> x = f.x.empty() ? std::vector<double>{0.0} : f.x;
  if (d == 1) {
    std::vector<Point> out;
    for (double v : x) out.push_back({v});
    return out;
  }
  if (x.size() == 1) return {Point(d, x[0])};
  if (x.size() != d)
    throw ShapeError("--x needs 1 or " + std::to_string(d) + " values for this model, got " + std::to_string(x.size()));
  return {x};
}

Control constant_control(const ProcessModel& model, const std::vector<double>& values) {
  if (values.empty()) return Control::zero(model.grid(), model.channels());
  if (values.size() == 1) return Control::constant(model.grid(), Point(model.channels(), values[0]));
  if (values.size() != model.channels())
    throw ShapeError("control needs 1 or " + std::to_string(model.channels()) + " values");
  return Control::constant(model.grid(), values);
}

void emit(const Flags& f, std::ostream& out, const std::string& text) {
  if (f.out.empty() || f.out == "-")
    out << text;
  else
    write_text(f.out, text);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_simulate(const Flags& f, std::ostream& out) {
  const ProcessModel model = model_from_json(model_json(f));
  const Point x = points_for(model, f).front();
  const double eps = f.eps.empty() && f.eps_grid.empty() ? 0.0 : eps_values(f).front();
  const Control u = constant_control(model, f.control);
  const std::uint64_t seed = f.given("--seed") ? f.seed : 42;
  std::optional<NoiseDraw> noise;
  if (eps > 0.0) noise = sample_noise(model.grid(), model.channels(), seed, f.sample_index);
  const DiscretePath path = solve_controlled(model, x, eps, u, noise ? &*noise : nullptr);
  if (f.format == "json") {
    json values = json::array();
    for (std::size_t i = 0; i < path.points(); ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < path.dim(); ++k) row.push_back(json_number(path.value(i, k)));
      values.push_back(row);
    }
    emit(f, out, dump(json{{"model", model.name()}, {"eps", eps}, {"seed", seed}, {"sample_index", f.sample_index},
                           {"horizon", model.grid().horizon()}, {"steps", model.grid().steps()}, {"values", values}}));
  } else {
    std::ostringstream s;
    write_path_csv(s, path);
    emit(f, out, s.str());
  }
  return 0;
}

int cmd_rate(const Flags& f, std::ostream& out) {
  if (f.path.empty()) throw ConfigError("rate needs --path <csv>");
  const DiscretePath phi = read_path_csv(std::filesystem::path(f.path));
  json spec = model_json(f);
  spec["horizon"] = phi.grid().horizon();
  spec["steps"] = phi.grid().steps();
  const ProcessModel model = model_from_json(spec);
  const Point x = points_for(model, f).front();
  const RateValue rv = rate_of(model, x, phi);
  if (f.format == "json")
    emit(f, out, dump(json{{"value", json_number(rv.value())}, {"finite", rv.finite()}}));
  else
    emit(f, out, format_double(rv.value()) + "\n");
  return 0;
}

int cmd_level_set(const Flags& f, std::ostream& out) {
  const ProcessModel model = model_from_json(model_json(f));
  const Point x = points_for(model, f).front();
  const LevelSetSample ls = sample_level_set(model, x, f.s, f.count, f.given("--seed") ? f.seed : 7);
  if (f.out.empty()) throw ConfigError("level-set needs --out <directory>");
  export_level_set(f.out, ls);
  out << "wrote " << ls.paths.size() << " paths to " << f.out << "\n";
  return 0;
}

int cmd_estimate(const Flags& f, std::ostream& out) {
  const ProcessModel model = model_from_json(model_json(f));
  const std::vector<double> eps = eps_values(f);
  McBudget budget;
  if (f.given("--samples")) budget.samples = f.samples;
  if (f.given("--seed")) budget.seed = f.seed;
  budget.threads = f.threads;
  const bool csv = f.format == "csv";
  std::ostringstream text;
  json rows = json::array();
  if (!f.h.empty()) {
    if (csv) text << "eps,x,value,h_min,h_max,ess,n,seed\n";
    for (double e : eps) {
      for (const auto& x : points_for(model, f)) {
        const TestFunction h = test_function_from_json(json_arg(f.h), model, x);
        std::optional<Control> tilt;
        if (!f.tilt.empty()) tilt = constant_control(model, f.tilt);
        const LaplaceEstimate est = laplace_functional(model, x, e, h, budget, tilt ? &*tilt : nullptr);
        if (csv) {
          text << format_double(e) << ',' << format_double(x[0]) << ',' << format_double(est.value) << ','
               << format_double(est.h_min) << ',' << format_double(est.h_max) << ',' << format_double(est.ess)
               << ',' << est.n << ',' << est.seed << '\n';
        } else {
          rows.push_back(to_json(est));
        }
      }
    }
  } else {
    if (f.event.empty()) throw ConfigError("estimate needs --event <json> or --test-function <json>");
    const EventSpec event = event_from_json(json_arg(f.event), model);
    const Membership kind = f.membership == "closed" ? Membership::closed : Membership::open;
    if (csv) text << kEstimateHeader << '\n';
    for (double e : eps) {
      for (const auto& x : points_for(model, f)) {
        const LogProbEstimate est =
            f.tilt.empty() ? mc_probability(model, x, e, event, budget, kind)
                           : is_probability(model, x, e, event, constant_control(model, f.tilt), budget, kind);
        if (csv)
          text << estimate_csv_row(est) << '\n';
        else
          rows.push_back(to_json(est));
      }
    }
  }
  emit(f, out, csv ? text.str() : dump(rows));
  return 0;
}

int cmd_check(const Flags& f, std::ostream& out) {
  json config;
  if (!f.config.empty()) {
    config = json_arg(f.config);
  } else {
    if (f.target.empty()) throw ConfigError("check needs a definition (fwuldp, dzuldp, luldp, ulp, eulp) or --config");
    config["kind"] = f.target;
    config["model"] = model_json(f);
    const ProcessModel model = model_from_json(config["model"]);
    json points = json::array();
    for (const auto& p : points_for(model, f)) points.push_back(p);
    config["index_set"] = json{{"points", points}, {"class", f.index_class.empty() ? "bounded" : f.index_class},
                               {"label", "command line"}};
    config["eps"] = eps_values(f);
    if (f.given("--delta")) config["delta"] = f.delta;
    if (f.given("--s0")) config["s0"] = f.s0;
    if (!f.eta.empty()) config["eta"] = f.eta;
    if (!f.open.empty()) config["open"] = json_arg(f.open);
    if (!f.closed.empty()) config["closed"] = json_arg(f.closed);
    if (!f.h.empty()) config["h"] = json_arg(f.h);
    if (!f.family.empty()) config["family"] = json_arg(f.family);
    config["budget"] = json{{"level_set_count", f.level_set_count},
                            {"exact_level_sets", f.exact},
                            {"tilt", !f.no_tilt}};
    if (f.target == "fwuldp" && (!f.given("--delta") || !f.given("--s0"))) throw ConfigError("fwuldp needs --delta and --s0");
  }
  if (!config.contains("kind")) throw ConfigError("check config needs a kind");
  ScenarioOptions options;
  if (f.given("--seed")) options.seed = f.seed;
  if (f.given("--samples")) options.samples = f.samples;
  options.threads = f.threads;
  config["expected"] = "";
  const ScenarioBundle bundle = run_scenario(config, options);
  const CheckReport& report = bundle.reports.front();
  if (f.format == "csv") {
    std::ostringstream s;
    write_report_csv(s, report);
    emit(f, out, s.str());
  } else {
    emit(f, out, dump(to_json(report)));
  }
  return 0;
}

int cmd_scenario(const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.list) {
    for (const auto& n : scenario_names()) out << n << '\n';
    return 0;
  }
  if (f.target.empty()) throw ConfigError("scenario needs a name (see scenario --list)");
  ScenarioOptions options;
  if (f.given("--seed")) options.seed = f.seed;
  if (f.given("--samples")) options.samples = f.samples;
  options.threads = f.threads;
  const ScenarioBundle bundle = run_scenario(load_scenario(f.target), options);
  if (f.format == "csv") {
    std::ostringstream s;
    for (const auto& r : bundle.reports) write_report_csv(s, r);
    if (bundle.convergence) write_convergence_csv(s, *bundle.convergence);
    emit(f, out, s.str());
  } else {
    emit(f, out, dump(to_json(bundle)));
  }
  std::ostream& log = f.out.empty() || f.out == "-" ? err : out;
  log << bundle.name << ": " << bundle.observed << " (expected " << bundle.expected << ") "
      << (bundle.passed ? "PASS" : "FAIL") << '\n';
  return bundle.passed ? 0 : 1;
}

int cmd_converge(const Flags& f, std::ostream& out) {
  const ProcessModel model = model_from_json(model_json(f));
  const json xs_spec{{"norms", f.x_norms},
                     {"class", f.index_class.empty() ? "all-subsets" : f.index_class},
                     {"label", "command line norms"}};
  const IndexSetSample xs = index_set_from_json(xs_spec, model.state_dim());
  ConvergenceBudget budget;
  budget.controls = f.controls;
  if (f.given("--samples")) budget.samples = f.samples;
  if (f.given("--seed")) budget.seed = f.seed;
  budget.threads = f.threads;
  const double delta = f.given("--delta") ? f.delta : 0.25;
  const ConvergenceTable table =
      control_conv(model, xs, f.n_radius, delta, eps_values(f, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}), budget);
  if (f.format == "csv") {
    std::ostringstream s;
    write_convergence_csv(s, table);
    emit(f, out, s.str());
  } else {
    emit(f, out, dump(to_json(table)));
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uniform large deviations laboratory"};
  app.require_subcommand(1);
  Flags f;

  auto* simulate = app.add_subcommand("simulate", "one controlled noisy path as CSV");
  common_flags(simulate, f, "translated-bm");
  simulate->add_option("--control", f.control, "constant control values")->delimiter(',');
  simulate->add_option("--sample-index", f.sample_index, "noise sample index");

  auto* rate = app.add_subcommand("rate", "rate function of a path CSV");
  common_flags(rate, f, "translated-bm");
  rate->add_option("--path", f.path, "path CSV with header t,x0,...")->required();

  auto* level = app.add_subcommand("level-set", "sample a level set and export it");
  common_flags(level, f, "translated-bm");
  level->add_option("--s", f.s, "level")->check(CLI::NonNegativeNumber);
  level->add_option("--count", f.count, "number of controls")->check(CLI::PositiveNumber);

  auto* estimate = app.add_subcommand("estimate", "probability or Laplace functional estimates");
  common_flags(estimate, f, "translated-bm");
  estimate->add_option("--event", f.event, "event JSON (file or inline)");
  estimate->add_option("--membership", f.membership, "open or closed")->check(CLI::IsMember({"open", "closed"}));
  estimate->add_option("--test-function", f.h, "test function JSON; estimates the Laplace functional instead");
  estimate->add_option("--tilt", f.tilt, "constant tilt control")->delimiter(',');

  auto* check = app.add_subcommand("check", "bound-gap report for one definition");
  common_flags(check, f, "translated-bm");
  check->add_option("definition", f.target, "fwuldp, dzuldp, luldp, ulp or eulp")
      ->check(CLI::IsMember({"fwuldp", "dzuldp", "luldp", "ulp", "eulp"}));
  check->add_option("--config", f.config, "check description JSON instead of flags");
  check->add_option("--delta", f.delta, "ball radius")->check(CLI::PositiveNumber);
  check->add_option("--s0", f.s0, "level bound")->check(CLI::PositiveNumber);
  check->add_option("--eta", f.eta, "eta grid")->delimiter(',');
  check->add_option("--open", f.open, "open event JSON");
  check->add_option("--closed", f.closed, "closed event JSON");
  check->add_option("--test-function", f.h, "test function JSON");
  check->add_option("--family", f.family, "family JSON");
  check->add_option("--class", f.index_class, "all-subsets, bounded or compact");
  check->add_option("--level-set-count", f.level_set_count, "controls per sampled level set");
  check->add_flag("--exact-level-sets", f.exact, "exact level-set distances (Brownian models)");
  check->add_flag("--no-tilt", f.no_tilt, "plain Monte Carlo only");

  auto* scenario = app.add_subcommand("scenario", "run a pinned scenario and compare with its expected verdict");
  common_flags(scenario, f, "translated-bm");
  scenario->add_option("name", f.target, "scenario name or file");
  scenario->add_flag("--list", f.list, "list shipped scenarios");

  auto* converge = app.add_subcommand("converge", "uniform convergence table of noisy to noiseless controlled paths");
  common_flags(converge, f, "spde-bounded");
  converge->add_option("--x-norms", f.x_norms, "norms of the initial points")->delimiter(',');
  converge->add_option("--class", f.index_class, "all-subsets, bounded or compact");
  converge->add_option("--N", f.n_radius, "control ball radius")->check(CLI::NonNegativeNumber);
  converge->add_option("--controls", f.controls, "controls sampled from the ball")->check(CLI::PositiveNumber);
  converge->add_option("--delta", f.delta, "sup-distance threshold")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  for (auto* sub : app.get_subcommands()) f.active = sub;
  if (f.model.empty()) f.model = *converge ? "spde-bounded" : "translated-bm";
  try {
    if (*simulate) {
      if (f.format.empty()) f.format = "csv";
      return cmd_simulate(f, out);
    }
    if (f.format.empty()) f.format = *rate ? "csv" : "json";
    if (*rate) return cmd_rate(f, out);
    if (*level) return cmd_level_set(f, out);
    if (*estimate) return cmd_estimate(f, out);
    if (*check) return cmd_check(f, out);
    if (*scenario) return cmd_scenario(f, out, err);
    if (*converge) return cmd_converge(f, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalBlowup& e) {
    err << "error: numerical blowup at step " << e.step() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace ulab
