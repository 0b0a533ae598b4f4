#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "ulab/error.hpp"
#include "ulab/pathspace.hpp"

using namespace ulab;

namespace {

DiscretePath line(const TimeGrid& g, double start, double slope) {
  return DiscretePath::sampled(g, [=](double t) { return start + slope * t; });
}

DiscretePath random_path(const TimeGrid& g, std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  std::vector<double> v(g.points());
  for (double& e : v) e = n(gen);
  return DiscretePath(g, 1, std::move(v));
}

}  // namespace

TEST(TimeGrid, LastPointIsHorizon) {
  const TimeGrid g(0.7, 3);
  EXPECT_EQ(g.time(3), 0.7);
  EXPECT_EQ(g.time(0), 0.0);
  EXPECT_EQ(g.points(), 4u);
  EXPECT_THROW(TimeGrid(1.0, 0), ConfigError);
  EXPECT_THROW(TimeGrid(-1.0, 4), ConfigError);
}

TEST(DiscretePath, RejectsBadShapes) {
  const TimeGrid g(1.0, 4);
  EXPECT_THROW(DiscretePath(g, 1, std::vector<double>(4)), ShapeError);
  EXPECT_THROW(DiscretePath(g, 2, std::vector<double>(5)), ShapeError);
  EXPECT_THROW(DiscretePath(g, 1, std::vector<double>{0, 1, NAN, 2, 3}), ConfigError);
}

TEST(DiscretePath, TranslationChangesOnlyOrigin) {
  const TimeGrid g(1.0, 8);
  const DiscretePath p = line(g, 0.0, 1.0);
  const DiscretePath q = p.translated({1e6});
  EXPECT_EQ(q.origin()[0], p.origin()[0] + 1e6);
  for (std::size_t i = 0; i < g.points(); ++i) EXPECT_EQ(q.displacement(i)[0], p.displacement(i)[0]);
  EXPECT_EQ(sup_metric(p.translated({-1e6}), q), 2e6);
}

TEST(SupMetric, Examples) {
  const TimeGrid g(1.0, 10);
  EXPECT_DOUBLE_EQ(sup_metric(line(g, 0.0, 1.0), DiscretePath::constant(g, {0.0})), 1.0);
  const DiscretePath p = line(g, 0.3, -2.0);
  EXPECT_EQ(sup_metric(p, p), 0.0);

  const TimeGrid g100(1.0, 100);
  const DiscretePath s = DiscretePath::sampled(g100, [](double t) { return std::sin(M_PI * t); });
  double expected = 0.0;
  for (std::size_t i = 0; i < g100.points(); ++i) expected = std::max(expected, std::abs(std::sin(M_PI * g100.time(i))));
  EXPECT_DOUBLE_EQ(sup_metric(s, DiscretePath::constant(g100, {0.0})), expected);
}

TEST(SupMetric, IsAMetricOnRandomTriples) {
  const TimeGrid g(1.0, 16);
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const DiscretePath a = random_path(g, gen), b = random_path(g, gen), c = random_path(g, gen);
    EXPECT_GE(sup_metric(a, b), 0.0);
    EXPECT_EQ(sup_metric(a, b), sup_metric(b, a));
    EXPECT_LE(sup_metric(a, c), sup_metric(a, b) + sup_metric(b, c) + 1e-12);
  }
}

TEST(SupMetric, RejectsMismatchedGrids) {
  EXPECT_THROW(sup_metric(DiscretePath::constant(TimeGrid(1.0, 4), {0.0}), DiscretePath::constant(TimeGrid(1.0, 5), {0.0})),
               ShapeError);
}

TEST(DistToSet, Examples) {
  const TimeGrid g(1.0, 4);
  const PathSet s({DiscretePath::constant(g, {0.0}), DiscretePath::constant(g, {2.0})});
  EXPECT_EQ(dist_to_set(DiscretePath::constant(g, {0.5}), s), 0.5);
  EXPECT_EQ(dist_to_set(s[1], s), 0.0);
}

TEST(Hausdorff, SingletonsAndSelf) {
  const TimeGrid g(1.0, 8);
  const DiscretePath a = line(g, 0.0, 1.0), b = line(g, 0.2, -1.0);
  EXPECT_EQ(hausdorff(PathSet({a}), PathSet({b})), sup_metric(a, b));
  const PathSet s({a, b});
  EXPECT_EQ(hausdorff(s, s), 0.0);
}

TEST(Hausdorff, ZeroOnlyForEqualSetsAndTriangle) {
  const TimeGrid g(1.0, 8);
  std::mt19937_64 gen(11);
  auto make = [&] { return PathSet({random_path(g, gen), random_path(g, gen), random_path(g, gen)}); };
  for (int trial = 0; trial < 50; ++trial) {
    const PathSet a = make(), b = make(), c = make();
    EXPECT_GT(hausdorff(a, b), 0.0);
    EXPECT_EQ(hausdorff(a, b), hausdorff(b, a));
    EXPECT_LE(hausdorff(a, c), hausdorff(a, b) + hausdorff(b, c) + 1e-12);
    const PathSet reordered({a[2], a[0], a[1]});
    EXPECT_EQ(hausdorff(a, reordered), 0.0);
  }
}

TEST(EventMargin, BallExamples) {
  const TimeGrid g(1.0, 4);
  const EventSpec ball = EventSpec::ball(DiscretePath::constant(g, {0.0}), 0.1);
  EXPECT_DOUBLE_EQ(event_margin(DiscretePath::constant(g, {0.0}), ball), 0.1);
  EXPECT_DOUBLE_EQ(event_margin(DiscretePath::constant(g, {0.05}), ball), 0.05);
}

TEST(EventMargin, DyadicUnionOfBalls) {
  const TimeGrid g(1.0, 4);
  std::vector<event::Ball> balls;
  for (int n = 1; n <= 2; ++n) balls.push_back({line(g, std::ldexp(1.0, -n), 1.0), std::ldexp(1.0, -2 * n)});
  const EventSpec u = EventSpec::union_of_balls(balls);
  EXPECT_EQ(event_margin(line(g, 0.25, 1.0), u), 0.0625);
}

TEST(EventMargin, ComplementNegates) {
  const TimeGrid g(1.0, 8);
  std::mt19937_64 gen(5);
  const EventSpec ball = EventSpec::ball(line(g, 0.0, 1.0), 0.7);
  const EventSpec u = EventSpec::union_of_balls({{line(g, 0.0, 1.0), 0.5}, {line(g, 1.0, -1.0), 0.9}});
  for (int trial = 0; trial < 50; ++trial) {
    const DiscretePath p = random_path(g, gen);
    EXPECT_EQ(event_margin(p, EventSpec::complement(ball)), -event_margin(p, ball));
    EXPECT_EQ(event_margin(p, EventSpec::complement(u)), -event_margin(p, u));
  }
}

TEST(EventMargin, MembershipMonotoneInEta) {
  const TimeGrid g(1.0, 8);
  std::mt19937_64 gen(9);
  const EventSpec ball = EventSpec::ball(DiscretePath::constant(g, {0.0}), 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const DiscretePath p = random_path(g, gen);
    for (double eta1 : {0.1, 0.5, 1.0})
      for (double eta2 : {0.0, 0.05, 0.3}) {
        if (eta2 >= eta1) continue;
        if (in_open(p, ball, eta1)) {
          EXPECT_TRUE(in_open(p, ball, eta2));
        }
        if (in_closed(p, ball, eta2)) {
          EXPECT_TRUE(in_closed(p, ball, eta1));
        }
      }
  }
}

TEST(EventMargin, OpenAndClosedBoundary) {
  const TimeGrid g(1.0, 4);
  const EventSpec ball = EventSpec::ball(DiscretePath::constant(g, {0.0}), 0.5);
  const DiscretePath edge = DiscretePath::constant(g, {0.5});
  EXPECT_FALSE(in_open(edge, ball));
  EXPECT_TRUE(in_closed(edge, ball));
  EXPECT_TRUE(contains(edge, ball, Membership::closed));
  EXPECT_FALSE(contains(edge, ball, Membership::open));
}

TEST(EventMargin, RelativeBallIgnoresStart) {
  const TimeGrid g(1.0, 8);
  const EventSpec rb = EventSpec::relative_ball(line(g, 0.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(event_margin(line(g, 1e3, 1.0), rb), 0.25);
  EXPECT_DOUBLE_EQ(event_margin(line(g, -7.0, 1.0), rb), 0.25);
  EXPECT_LT(event_margin(line(g, 0.0, 0.0), rb), 0.0);
}

TEST(EventMargin, TerminalInitialAndCombinators) {
  const TimeGrid g(1.0, 4);
  const DiscretePath p = line(g, 0.0, 2.0);
  const EventSpec term = EventSpec::terminal_at_least(0, 1.5);
  EXPECT_DOUBLE_EQ(event_margin(p, term), 0.5);
  const EventSpec init = EventSpec::initial_equals({0.0}, 0.1, term);
  EXPECT_DOUBLE_EQ(event_margin(p, init), 0.1);
  EXPECT_LT(event_margin(p.translated({1.0}), init), 0.0);
  const EventSpec both = EventSpec::all_of({term, EventSpec::ball(p, 0.2)});
  EXPECT_DOUBLE_EQ(event_margin(p, both), 0.2);
  const EventSpec either = EventSpec::any_of({term, EventSpec::ball(p, 0.2)});
  EXPECT_DOUBLE_EQ(event_margin(p, either), 0.5);
}

TEST(EventMargin, DistanceAtLeastSampledSet) {
  const TimeGrid g(1.0, 4);
  auto set = std::make_shared<SampledSet>(PathSet({DiscretePath::constant(g, {0.0})}));
  const EventSpec e = EventSpec::distance_at_least(set, 0.25);
  EXPECT_DOUBLE_EQ(event_margin(DiscretePath::constant(g, {1.0}), e), 0.75);
  EXPECT_DOUBLE_EQ(event_margin(DiscretePath::constant(g, {0.0}), e), -0.25);
}

TEST(EventAnchors, BallCentersAreAnchors) {
  const TimeGrid g(1.0, 4);
  const EventSpec u = EventSpec::union_of_balls({{line(g, 0.0, 1.0), 0.1}, {line(g, 1.0, 1.0), 0.1}});
  EXPECT_EQ(event_anchors(u, {0.0}).size(), 2u);
}
