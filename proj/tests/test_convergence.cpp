#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ulab/convergence.hpp"
#include "ulab/error.hpp"
#include "ulab/model_spec.hpp"

using namespace ulab;

namespace {

IndexSetSample along_first_axis(std::size_t dim, std::vector<double> norms, IndexClass intended) {
  IndexSetSample a;
  a.label = "axis";
  a.intended = intended;
  for (double r : norms) {
    Point x(dim, 0.0);
    x[0] = r;
    a.points.push_back(x);
  }
  return a;
}

}  // namespace

TEST(ControlBall, EnergiesOnTheSphere) {
  const TimeGrid g(1.0, 32);
  const std::vector<Control> us = sample_control_ball(g, 3, 4.0, 5, 1);
  ASSERT_EQ(us.size(), 5u);
  EXPECT_EQ(us[0].energy(), 0.0);
  for (std::size_t i = 1; i < us.size(); ++i) EXPECT_NEAR(us[i].energy(), 0.5 * 4.0, 1e-12);
  EXPECT_THROW(sample_control_ball(g, 1, -1.0, 3, 1), ConfigError);
}

TEST(ControlConv, TranslatedBmCouplingGivesHalfSlope) {
  const TimeGrid g(1.0, 64);
  const ProcessModel bm(g, TranslatedBM{});
  const IndexSetSample xs = make_index_set("x", {0.0, 5.0}, IndexClass::all_subsets);
  const ConvergenceTable t = control_conv(bm, xs, 4.0, 0.25, {0.1, 0.01, 0.001, 0.0}, ConvergenceBudget{3, 100, 42, 1});
  ASSERT_EQ(t.rows.size(), 4u);
  for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LE(t.rows[i].sup_prob, t.rows[i - 1].sup_prob);
  EXPECT_EQ(t.rows.back().sup_prob, 0.0);
  EXPECT_EQ(t.rows.back().max_error, 0.0);
  EXPECT_NEAR(t.slope, 0.5, 1e-9);
  EXPECT_NEAR(t.rows[1].median_error / t.rows[2].median_error, std::sqrt(10.0), 1e-9);
}

TEST(ControlConv, ZeroNoiseHasNoError) {
  const TimeGrid g(1.0, 20);
  CatalogConfig c;
  c.modes = c.channels = 4;
  c.noise = "zero";
  const ProcessModel m(g, make_galerkin(c));
  const IndexSetSample xs = along_first_axis(4, {0.0, 1.0}, IndexClass::all_subsets);
  const ConvergenceTable t = control_conv(m, xs, 1.0, 0.1, {0.1, 0.01}, ConvergenceBudget{3, 20, 42, 1});
  for (const ConvergenceRow& r : t.rows) {
    EXPECT_EQ(r.sup_prob, 0.0);
    EXPECT_EQ(r.max_error, 0.0);
  }
}

TEST(ControlConv, LinearGrowthNeedsBoundedSample) {
  const ProcessModel m = load_model("spde-linear-growth", ModelOverrides{std::nullopt, 20, 4});
  const IndexSetSample all = along_first_axis(4, {0.0, 1.0}, IndexClass::all_subsets);
  EXPECT_THROW(control_conv(m, all, 1.0, 0.1, {0.1}, ConvergenceBudget{2, 5, 42, 1}), ConfigError);
  const IndexSetSample bounded = along_first_axis(4, {0.0, 1.0}, IndexClass::bounded);
  EXPECT_NO_THROW(control_conv(m, bounded, 1.0, 0.1, {0.1}, ConvergenceBudget{2, 5, 42, 1}));
}

TEST(WeakContinuity, TranslatedBmSineControls) {
  const TimeGrid g(2.0, 64);
  const ProcessModel bm(g, TranslatedBM{});
  const std::vector<WeakContinuityRow> rows = weak_continuity_check(bm, {0.3}, {0, 1, 2, 4, 8, 16});
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].error, 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double n = static_cast<double>(rows[i].frequency);
    EXPECT_NEAR(rows[i].error, 2.0 * 2.0 / (n * std::numbers::pi), 1e-12) << n;
    if (i > 1) {
      EXPECT_LT(rows[i].error, rows[i - 1].error);
    }
  }
  EXPECT_THROW(weak_continuity_check(bm, {0.0}, {17}), ConfigError);
}

TEST(Moments, DeterministicStartGivesNormPower) {
  const TimeGrid g(1.0, 16);
  const ProcessModel bm(g, TranslatedBM{});
  const MomentReport r = moment_bound_check(bm, 3.0, 0.0, 2.0, 0.0, 4, 1, 2);
  EXPECT_TRUE(r.finite);
  EXPECT_FALSE(r.blowup);
  EXPECT_NEAR(r.max_moment, 9.0, 1e-12);
  for (const MomentRow& row : r.rows) EXPECT_NEAR(row.moment, row.x_norm * row.x_norm, 1e-12);
}

TEST(Moments, NondecreasingInRadius) {
  const ProcessModel m = load_model("spde-bounded", ModelOverrides{std::nullopt, 20, 4});
  double previous = 0.0;
  for (double radius : {1.0, 10.0, 100.0}) {
    const MomentReport r = moment_bound_check(m, radius, 4.0, 2.0, 0.1, 10, 3, 3);
    EXPECT_TRUE(r.finite);
    EXPECT_GE(r.max_moment, previous);
    previous = r.max_moment;
  }
  EXPECT_THROW(moment_bound_check(m, 1.0, 1.0, 1.0, 0.1, 10, 3), ConfigError);
}
