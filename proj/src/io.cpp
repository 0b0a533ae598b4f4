#include "ulab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ulab/error.hpp"

namespace ulab {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

namespace {

json point_json(const Point& x) {
  json out = json::array();
  for (double v : x) out.push_back(json_number(v));
  return out;
}

std::string point_text(const Point& x) {
  std::string out;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k) out += ';';
    out += format_double(x[k]);
  }
  return out;
}

json map_json(const std::map<std::string, double>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = json_number(v);
  return out;
}

std::string map_text(const std::map<std::string, double>& m) {
  std::string out;
  for (const auto& [k, v] : m) {
    if (!out.empty()) out += ';';
    out += k + "=" + format_double(v);
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  while (used < s.size() && (s[used] == ' ' || s[used] == '\r')) ++used;
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

}  // namespace

void write_path_csv(std::ostream& out, const DiscretePath& path) {
  out << 't';
  for (std::size_t k = 0; k < path.dim(); ++k) out << ",x" << k;
  out << '\n';
  for (std::size_t i = 0; i < path.points(); ++i) {
    out << format_double(path.grid().time(i));
    for (std::size_t k = 0; k < path.dim(); ++k) out << ',' << format_double(path.value(i, k));
    out << '\n';
  }
}

DiscretePath read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("path CSV is empty");
  const auto header = split(line, ',');
  if (header.size() < 2 || header[0] != "t") throw ConfigError("path CSV header must be t,x0,...");
  const std::size_t dim = header.size() - 1;
  std::vector<double> times, values;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    if (cells.size() != dim + 1) throw ConfigError("path CSV row has " + std::to_string(cells.size()) + " fields");
    times.push_back(parse_double(cells[0]));
    for (std::size_t k = 0; k < dim; ++k) values.push_back(parse_double(cells[k + 1]));
  }
  if (times.size() < 2) throw ConfigError("path CSV needs at least two rows");
  if (times.front() != 0.0) throw ConfigError("path CSV must start at t = 0");
  const TimeGrid grid(times.back(), times.size() - 1);
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - grid.time(i)) > 1e-9 * grid.horizon())
      throw ConfigError("path CSV times are not a uniform grid");
  return DiscretePath(grid, dim, std::move(values));
}

DiscretePath read_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open path file " + file.string());
  return read_path_csv(in);
}

std::string estimate_csv_row(const LogProbEstimate& est) {
  std::ostringstream out;
  out << format_double(est.eps) << ',' << point_text(est.x) << ',' << format_double(est.p_hat) << ','
      << format_double(est.ci_low) << ',' << format_double(est.ci_high) << ',' << format_double(est.log_value)
      << ',' << (est.zero_hit ? 1 : 0) << ',' << format_double(est.ess) << ',' << est.n << ',' << est.seed;
  return out.str();
}

json to_json(const LogProbEstimate& est) {
  return json{{"eps", json_number(est.eps)},
              {"x", point_json(est.x)},
              {"speed", json_number(est.speed)},
              {"phat", json_number(est.p_hat)},
              {"ci_lo", json_number(est.ci_low)},
              {"ci_hi", json_number(est.ci_high)},
              {"log_value", json_number(est.log_value)},
              {"log_value_lo", json_number(est.log_value_low)},
              {"log_value_hi", json_number(est.log_value_high)},
              {"hits", est.hits},
              {"n", est.n},
              {"zero_hit", est.zero_hit},
              {"rule_of_three", json_number(est.rule_of_three)},
              {"ess", json_number(est.ess)},
              {"tilted", est.tilted},
              {"degenerate_weights", est.degenerate_weights},
              {"seed", est.seed}};
}

json to_json(const LaplaceEstimate& est) {
  return json{{"eps", json_number(est.eps)},       {"x", point_json(est.x)},
              {"speed", json_number(est.speed)},   {"value", json_number(est.value)},
              {"h_min", json_number(est.h_min)},   {"h_max", json_number(est.h_max)},
              {"ess", json_number(est.ess)},       {"n", est.n},
              {"tilted", est.tilted},              {"seed", est.seed}};
}

json to_json(const IndexSetSample& a) {
  json points = json::array();
  for (const auto& x : a.points) points.push_back(point_json(x));
  return json{{"label", a.label}, {"class", to_string(a.intended)}, {"radius", json_number(a.radius())},
              {"points", points}};
}

json to_json(const CheckReport& report) {
  json eps = json::array();
  for (double e : report.eps) eps.push_back(json_number(e));
  json eta = json::array();
  for (double e : report.eta) eta.push_back(json_number(e));
  json params{{"eps", eps}, {"eta", eta}};
  params["delta"] = report.delta ? json_number(*report.delta) : json(nullptr);
  params["s0"] = report.s0 ? json_number(*report.s0) : json(nullptr);

  json cells = json::array();
  for (const auto& c : report.cells) {
    json inputs = map_json(c.terms);
    json estimates = json::array();
    for (const auto& e : c.estimates) estimates.push_back(to_json(e));
    inputs["estimates"] = estimates;
    if (c.laplace) inputs["laplace_estimate"] = to_json(*c.laplace);
    cells.push_back(json{{"bound", c.bound},
                         {"eps", json_number(c.eps)},
                         {"x", point_json(c.x)},
                         {"extra", map_json(c.extra)},
                         {"gap", json_number(c.gap)},
                         {"inputs", inputs}});
  }
  json trends = json::array();
  for (const auto& t : report.trends) {
    json gaps = json::array();
    for (double g : t.gaps) gaps.push_back(json_number(g));
    json teps = json::array();
    for (double e : t.eps) teps.push_back(json_number(e));
    trends.push_back(json{{"bound", t.bound},
                          {"eps", teps},
                          {"gaps", gaps},
                          {"slope", json_number(t.slope)},
                          {"slope_se", json_number(t.slope_se)},
                          {"verdict", t.verdict}});
  }
  json trend{{"verdict", report.verdict}, {"bounds", trends}};
  trend["slope"] = report.trends.empty() ? json(nullptr) : json_number(report.trends.front().slope);

  json notes = json::object();
  for (const auto& [k, v] : report.notes) notes[k] = v;
  return json{{"definition", report.definition},
              {"model", report.model},
              {"A", to_json(report.index_set)},
              {"params", params},
              {"settings", map_json(report.settings)},
              {"notes", notes},
              {"cells", cells},
              {"trend", trend}};
}

void write_report_csv(std::ostream& out, const CheckReport& report) {
  out << "definition,bound,eps,x,extra,gap,terms\n";
  for (const auto& c : report.cells) {
    out << report.definition << ',' << c.bound << ',' << format_double(c.eps) << ',' << point_text(c.x) << ','
        << map_text(c.extra) << ',' << format_double(c.gap) << ',' << map_text(c.terms) << '\n';
  }
}

json to_json(const ConvergenceTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back(json{{"eps", json_number(r.eps)},
                        {"sup_prob", json_number(r.sup_prob)},
                        {"sup_prob_hi", json_number(r.sup_prob_high)},
                        {"worst_x", r.worst_x},
                        {"worst_control", r.worst_control},
                        {"median_error", json_number(r.median_error)},
                        {"q90_error", json_number(r.q90_error)},
                        {"max_error", json_number(r.max_error)}});
  }
  return json{{"model", table.model},
              {"x_sample", to_json(table.x_sample)},
              {"N", json_number(table.n_radius)},
              {"delta", json_number(table.delta)},
              {"controls", table.controls},
              {"samples", table.samples},
              {"seed", table.seed},
              {"rows", rows},
              {"slope", json_number(table.slope)},
              {"slope_se", json_number(table.slope_se)},
              {"intercept", json_number(table.intercept)},
              {"note", table.note}};
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table) {
  out << "eps,sup_prob,sup_prob_hi,worst_x,worst_control,median_error,q90_error,max_error\n";
  for (const auto& r : table.rows) {
    out << format_double(r.eps) << ',' << format_double(r.sup_prob) << ',' << format_double(r.sup_prob_high) << ','
        << r.worst_x << ',' << r.worst_control << ',' << format_double(r.median_error) << ','
        << format_double(r.q90_error) << ',' << format_double(r.max_error) << '\n';
  }
}

json to_json(const MomentReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back(json{{"x_index", r.x_index},
                        {"x_norm", json_number(r.x_norm)},
                        {"control_index", r.control_index},
                        {"moment", json_number(r.moment)}});
  return json{{"R", json_number(report.radius)},  {"N", json_number(report.n_radius)},
              {"p", json_number(report.p)},       {"eps", json_number(report.eps)},
              {"samples", report.samples},        {"rows", rows},
              {"max_moment", json_number(report.max_moment)},
              {"finite", report.finite},          {"blowup", report.blowup},
              {"blowup_step", report.blowup_step}};
}

json to_json(const std::vector<WeakContinuityRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) out.push_back(json{{"frequency", r.frequency}, {"error", json_number(r.error)}});
  return out;
}

void export_level_set(const std::filesystem::path& dir, const LevelSetSample& sample) {
  std::filesystem::create_directories(dir);
  json rates = json::array();
  json files = json::array();
  for (std::size_t i = 0; i < sample.paths.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "path_%03zu.csv", i);
    std::ofstream out(dir / name);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    write_path_csv(out, sample.paths[i]);
    rates.push_back(json_number(sample.rates[i]));
    files.push_back(name);
  }
  const json manifest{{"x", point_json(sample.x)},
                      {"s", json_number(sample.level)},
                      {"count", sample.paths.size()},
                      {"seed", sample.seed},
                      {"rates", rates},
                      {"files", files}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw ConfigError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

void write_text(const std::string& file, const std::string& text) {
  if (file.empty() || file == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + file);
  out << text;
}

}  // namespace ulab
