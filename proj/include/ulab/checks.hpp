#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ulab/estimators.hpp"
#include "ulab/models.hpp"
#include "ulab/pathspace.hpp"
#include "ulab/rates.hpp"
#include "ulab/test_function.hpp"

namespace ulab {

enum class IndexClass { all_subsets, bounded, compact };

std::string to_string(IndexClass c);
IndexClass index_class_from_string(const std::string& s);

/// Finite surrogate for an index set A, tagged with the class it stands in for.
struct IndexSetSample {
  std::string label;
  std::vector<Point> points;
  IndexClass intended = IndexClass::bounded;
  /// sup |x| over the points, recorded for bounded sets.
  double radius() const;
};

IndexSetSample make_index_set(std::string label, std::vector<double> scalars, IndexClass intended);

/// One gap value with every input that produced it.
struct GapCell {
  std::string bound;
  double eps = 0.0;
  Point x;
  std::map<std::string, double> extra;
  double gap = 0.0;
  std::map<std::string, double> terms;
  std::vector<LogProbEstimate> estimates;
  std::optional<LaplaceEstimate> laplace;
};

/// Gap aggregated over A (and the other cell parameters) per eps.
struct TrendSummary {
  std::string bound;
  std::vector<double> eps;
  std::vector<double> gaps;
  double slope = 0.0;
  double slope_se = 0.0;
  std::string verdict;
};

struct CheckReport {
  std::string definition;
  std::string model;
  IndexSetSample index_set;
  std::vector<double> eps;
  std::optional<double> delta;
  std::optional<double> s0;
  std::vector<double> eta;
  std::vector<GapCell> cells;
  std::vector<TrendSummary> trends;
  std::string verdict;
  std::map<std::string, std::string> notes;
  std::map<std::string, double> settings;

  const TrendSummary* trend(const std::string& bound) const;
};

struct CheckBudget {
  McBudget mc;
  std::size_t level_set_count = 32;
  std::uint64_t level_set_seed = 7;
  /// Level of the candidate sample used for I_x(G), I_x(F) and inf{h + I}.
  double search_level = 2.0;
  std::size_t ray_points = 21;
  std::size_t s_levels = 8;
  /// Exact distances to level sets (Brownian models) instead of sampled ones.
  bool exact_level_sets = false;
  /// Tilt estimates toward the rate-optimal control of each cell.
  bool tilt = true;
  double slack = 0.15;
};

/// Verdict strings.
inline constexpr const char* kHoldsTrend = "holds-trend";
inline constexpr const char* kFailsInfCell = "fails (-inf cell)";
inline constexpr const char* kFailsTrend = "fails-trend";
inline constexpr const char* kVacuous = "vacuous";
inline constexpr const char* kInconclusive = "inconclusive";

/**
 * Lower: a log P(rho(X, phi) < delta) + I_x(phi) over x in A and phi in a
 * sampled Phi_x(s0). Upper: a log P(dist(X, Phi_x(s)) >= delta) + s over x in A
 * and s on budget.s_levels equispaced levels of [0, s0].
 */
CheckReport fwuldp_gaps(const ProcessModel& model, const IndexSetSample& a, double s0, double delta,
                        const EpsilonSchedule& schedule, const CheckBudget& budget);

/// min I_x over candidate paths whose margin passes the membership test at eta.
RateValue event_rate(const ProcessModel& model, const Point& x, const EventSpec& event, Membership kind, double eta,
                     const CheckBudget& budget);

/**
 * Lower: inf_x a log P(X in G) + sup_x I_x(G). Upper: sup_x a log P(X in F) + inf_x I_x(F).
 * The upper half is skipped when @p closed is absent.
 */
CheckReport dzuldp_gaps(const ProcessModel& model, const IndexSetSample& a, const EventSpec& open,
                        const std::optional<EventSpec>& closed, const EpsilonSchedule& schedule,
                        const CheckBudget& budget);

using TestFunctionFactory = std::function<TestFunction(const Point& x)>;

/// Signed a log E exp(-h/a) + inf{h + I_x} per (eps, x); the trend aggregates its absolute value.
CheckReport ulp_gap(const ProcessModel& model, const IndexSetSample& a, const TestFunctionFactory& h,
                    const EpsilonSchedule& schedule, const CheckBudget& budget);
CheckReport ulp_gap(const ProcessModel& model, const IndexSetSample& a, const TestFunction& h,
                    const EpsilonSchedule& schedule, const CheckBudget& budget);

/// ulp_gap over every member of an equicontinuous family.
CheckReport eulp_gap(const ProcessModel& model, const IndexSetSample& a, const EquicontinuousFamily& family,
                     const EpsilonSchedule& schedule, const CheckBudget& budget);

/**
 * As dzuldp_gaps with the rates taken over G_eta (margin > eta) and
 * F^eta (margin >= -eta) for each eta in @p etas.
 */
CheckReport luldp_gaps(const ProcessModel& model, const IndexSetSample& a, const EventSpec& open,
                       const std::optional<EventSpec>& closed, const std::vector<double>& etas,
                       const EpsilonSchedule& schedule, const CheckBudget& budget);

/// Verdict of a trend: lower bounds want gaps >= -slack, upper ones <= slack, laplace ones |gap| <= slack.
std::string trend_verdict(const std::string& kind, const std::vector<double>& gaps, double slack);

/// Combined verdict over several trends.
std::string combine_verdicts(const std::vector<TrendSummary>& trends);

/// True when @p observed satisfies @p expected: equal, or "fails" matching any failing verdict.
bool verdict_matches(const std::string& expected, const std::string& observed);

}  // namespace ulab
