#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "ulab/checks.hpp"
#include "ulab/error.hpp"

using namespace ulab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DiscretePath line(const TimeGrid& g, double start, double slope) {
  return DiscretePath::sampled(g, [=](double t) { return start + slope * t; });
}

CheckBudget small_budget(std::size_t samples) {
  CheckBudget b;
  b.mc = McBudget{samples, 42, 1};
  b.level_set_count = 4;
  b.exact_level_sets = true;
  return b;
}

}  // namespace

TEST(TrendVerdict, Rules) {
  EXPECT_EQ(trend_verdict("lower", {-0.3, -0.1, -0.01}, 0.15), kHoldsTrend);
  EXPECT_EQ(trend_verdict("lower", {-0.3, -kInf}, 0.15), kFailsInfCell);
  EXPECT_EQ(trend_verdict("lower", {kInf, kInf}, 0.15), kVacuous);
  EXPECT_EQ(trend_verdict("lower", {-0.3, -0.5}, 0.15), kFailsTrend);
  EXPECT_EQ(trend_verdict("upper", {0.3, 0.1}, 0.15), kHoldsTrend);
  EXPECT_EQ(trend_verdict("upper", {0.3, 0.5}, 0.15), kFailsTrend);
  EXPECT_EQ(trend_verdict("laplace", {0.4, 0.5}, 0.15), kFailsTrend);
  EXPECT_EQ(trend_verdict("laplace", {0.4, 0.01}, 0.15), kHoldsTrend);
  EXPECT_EQ(trend_verdict("lower", {NAN}, 0.15), kInconclusive);
}

TEST(TrendVerdict, Matching) {
  EXPECT_TRUE(verdict_matches("fails", kFailsInfCell));
  EXPECT_TRUE(verdict_matches("fails", kFailsTrend));
  EXPECT_TRUE(verdict_matches(kHoldsTrend, kHoldsTrend));
  EXPECT_FALSE(verdict_matches("fails", kHoldsTrend));
  EXPECT_FALSE(verdict_matches(kHoldsTrend, kVacuous));
}

TEST(IndexSet, ClassesAndRadius) {
  const IndexSetSample a = make_index_set("r", {-3.0, 2.0}, IndexClass::bounded);
  EXPECT_EQ(a.radius(), 3.0);
  EXPECT_EQ(index_class_from_string(to_string(IndexClass::all_subsets)), IndexClass::all_subsets);
  EXPECT_THROW(index_class_from_string("everything"), ConfigError);
}

TEST(Fwuldp, TranslatedBmCellsAgreeAcrossStartingPoints) {
  const TimeGrid g(1.0, 32);
  const ProcessModel bm(g, TranslatedBM{});
  const IndexSetSample a = make_index_set("far", {-1e6, 0.0, 1e6}, IndexClass::all_subsets);
  const CheckReport r = fwuldp_gaps(bm, a, 0.5, 0.5, EpsilonSchedule({0.2, 0.1}), small_budget(1000));
  ASSERT_FALSE(r.cells.empty());
  std::size_t compared = 0;
  for (const GapCell& c : r.cells) {
    if (c.x[0] != 0.0) continue;
    for (const GapCell& d : r.cells) {
      if (d.x[0] == 0.0 || d.bound != c.bound || d.eps != c.eps || d.extra != c.extra) continue;
      EXPECT_EQ(d.gap, c.gap);
      ++compared;
    }
  }
  EXPECT_GT(compared, 0u);
}

TEST(Fwuldp, Reproducible) {
  const TimeGrid g(1.0, 16);
  const ProcessModel bm(g, TranslatedBM{});
  const IndexSetSample a = make_index_set("p", {0.0}, IndexClass::all_subsets);
  const CheckReport r1 = fwuldp_gaps(bm, a, 0.5, 0.5, EpsilonSchedule({0.2}), small_budget(500));
  const CheckReport r2 = fwuldp_gaps(bm, a, 0.5, 0.5, EpsilonSchedule({0.2}), small_budget(500));
  ASSERT_EQ(r1.cells.size(), r2.cells.size());
  for (std::size_t i = 0; i < r1.cells.size(); ++i) EXPECT_EQ(r1.cells[i].gap, r2.cells[i].gap);
  EXPECT_EQ(r1.verdict, r2.verdict);
}

TEST(Fwuldp, PerturbedModelHasInfiniteLowerCell) {
  const TimeGrid g(1.0, 32);
  const ProcessModel y(g, PerturbedBM{});
  const IndexSetSample a = make_index_set("y", {1000.0}, IndexClass::all_subsets);
  const CheckReport r = fwuldp_gaps(y, a, 0.5, 0.1, EpsilonSchedule({0.01}), small_budget(1000));
  const TrendSummary* lower = r.trend("lower");
  ASSERT_NE(lower, nullptr);
  EXPECT_EQ(lower->gaps.back(), -kInf);
  EXPECT_TRUE(verdict_matches("fails", r.verdict));
}

TEST(Luldp, VacuousWhenEtaExceedsRadius) {
  const TimeGrid g(1.0, 16);
  const ProcessModel bm(g, TranslatedBM{});
  const IndexSetSample a = make_index_set("p", {0.0}, IndexClass::bounded);
  const EventSpec open = EventSpec::ball(line(g, 0.0, 1.0), 0.1);
  const CheckReport r = luldp_gaps(bm, a, open, std::nullopt, {0.2}, EpsilonSchedule({0.1}), small_budget(200));
  ASSERT_EQ(r.trends.size(), 1u);
  EXPECT_EQ(r.trends[0].verdict, kVacuous);
}

TEST(Dzuldp, BallAroundBrownianStartHolds) {
  const TimeGrid g(1.0, 32);
  const ProcessModel bm(g, TranslatedBM{});
  const IndexSetSample a = make_index_set("p", {0.0}, IndexClass::bounded);
  const EventSpec open = EventSpec::ball(line(g, 0.0, 0.0), 0.5);
  const CheckReport r = dzuldp_gaps(bm, a, open, std::nullopt, EpsilonSchedule({0.1, 0.05}), small_budget(1000));
  const TrendSummary* lower = r.trend("lower");
  ASSERT_NE(lower, nullptr);
  ASSERT_EQ(lower->gaps.size(), 2u);
  EXPECT_LE(lower->gaps[0], 0.0);
  EXPECT_LT(lower->gaps[0], lower->gaps[1]);
  EXPECT_LE(lower->gaps[1], 0.0);
  EXPECT_EQ(lower->verdict, kHoldsTrend);
}

TEST(Ulp, ConstantFunctionGapIsZero) {
  const TimeGrid g(1.0, 16);
  const ProcessModel bm(g, TranslatedBM{});
  const IndexSetSample a = make_index_set("p", {-2.0, 0.0, 2.0}, IndexClass::all_subsets);
  const CheckReport r = ulp_gap(bm, a, TestFunction::constant(0.7), EpsilonSchedule({0.1, 0.01}), small_budget(100));
  for (const GapCell& c : r.cells) EXPECT_NEAR(c.gap, 0.0, 1e-12);
  EXPECT_EQ(r.verdict, kHoldsTrend);
}

TEST(Eulp, ConstantFamilyAndRejection) {
  const TimeGrid g(1.0, 16);
  const ProcessModel bm(g, TranslatedBM{});
  const IndexSetSample a = make_index_set("p", {0.0, 3.0}, IndexClass::all_subsets);
  const EquicontinuousFamily fam({TestFunction::constant(0.1), TestFunction::constant(0.9)}, 1.0, 0.0);
  const CheckReport r = eulp_gap(bm, a, fam, EpsilonSchedule({0.1}), small_budget(100));
  for (const GapCell& c : r.cells) EXPECT_NEAR(c.gap, 0.0, 1e-12);
  EXPECT_THROW(
      EquicontinuousFamily({TestFunction::capped_distance(DiscretePath::constant(g, {0.0}), 1.0, 0.1)}, 1.0, 2.0),
      ConfigError);
  EXPECT_THROW(EquicontinuousFamily({TestFunction::constant(2.0)}, 1.0, 1.0), ConfigError);
}

TEST(Eulp, MakeFamilyDeclaresBoundAndLipschitz) {
  const TimeGrid g(1.0, 8);
  FamilyAnchors anchors;
  anchors.centers = {line(g, 0.0, 1.0), line(g, 0.0, -1.0)};
  const EquicontinuousFamily fam = make_family(FamilyKind::lower, 2.0, 0.5, anchors);
  EXPECT_EQ(fam.size(), 2u);
  EXPECT_EQ(fam.bound(), 2.0);
  EXPECT_EQ(fam.lipschitz(), 4.0);
  EXPECT_EQ(fam.members()[0](anchors.centers[0]), 0.0);
  EXPECT_EQ(fam.members()[0](anchors.centers[1]), 2.0);
}

TEST(Checks, LowerFamilyLaplaceMonotoneInJ) {
  const TimeGrid g(1.0, 16);
  const ProcessModel bm(g, TranslatedBM{});
  const McBudget mc{2000, 3, 1};
  double previous = 0.0;
  for (double j : {0.5, 1.0, 2.0}) {
    const TestFunction h = TestFunction::capped_distance(line(g, 0.0, 1.0), j, 0.5);
    const LaplaceEstimate est = laplace_functional(bm, {0.0}, 0.1, h, mc);
    EXPECT_LE(est.value, previous);
    previous = est.value;
  }
}
