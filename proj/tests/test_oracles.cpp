#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ulab/estimators.hpp"
#include "ulab/models.hpp"

using namespace ulab;

TEST(Oracle, HermiteIntegratesGaussianMoments) {
  const oracle::Rule r = oracle::gauss_hermite(10);
  const double expected[] = {1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0};
  for (int k = 0; k < 9; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
    EXPECT_NEAR(s, expected[k], 1e-10 * std::max(1.0, expected[k])) << k;
  }
}

TEST(Oracle, LegendreIntegratesPolynomials) {
  const oracle::Rule r = oracle::gauss_legendre01(8);
  for (int k = 0; k < 16; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
    EXPECT_NEAR(s, 1.0 / (k + 1), 1e-13) << k;
  }
}

TEST(Oracle, GenzSingleStepIsNormalCdf) {
  const double sd = std::sqrt(0.3 * 0.5);
  const double p = oracle::box_probability_genz(0.1, 0.3, 0.5, {-0.2}, {0.4}, 16);
  EXPECT_NEAR(p, oracle::normal_cdf(0.3 / sd) - oracle::normal_cdf(-0.3 / sd), 1e-15);
}

TEST(Oracle, GenzWideBoxesReachOne) {
  const double p = oracle::box_probability_genz(0.0, 0.1, 0.25, {-50, -50, -50}, {50, 50, 50}, 12);
  EXPECT_NEAR(p, 1.0, 1e-12);
}

TEST(Oracle, HermiteTerminalMatchesErfc) {
  for (double eps : {0.25, 0.05}) {
    const double p = oracle::terminal_probability_hermite(0.0, eps, 0.25, 4, 1.0, 20);
    EXPECT_NEAR(p, oracle::normal_tail(1.0 / std::sqrt(eps)), 1e-10) << eps;
  }
}

TEST(Oracle, BruteForceTubeEnergyOnLine) {
  std::vector<double> c{0.0, 0.5, 1.0, 1.5, 2.0};
  EXPECT_NEAR(oracle::tube_energy_bruteforce(c, 0.5, 0.25, 20000), 0.5 * 1.5 * 1.5, 1e-9);
}

TEST(OracleVsEstimator, BallProbabilityOnFourSteps) {
  const TimeGrid g(1.0, 4);
  const ProcessModel bm(g, TranslatedBM{});
  const double eps = 0.25;
  const DiscretePath center = DiscretePath::sampled(g, [](double t) { return t; });
  std::vector<double> lo, hi;
  for (std::size_t i = 1; i <= 4; ++i) {
    lo.push_back(g.time(i) - 0.5);
    hi.push_back(g.time(i) + 0.5);
  }
  const double exact = oracle::box_probability_genz(0.0, eps, 0.25, lo, hi, 24);
  const LogProbEstimate est =
      is_probability(bm, {0.0}, eps, EventSpec::ball(center, 0.5), Control::constant(g, {1.0}), McBudget{40000, 7, 1});
  const double half = 0.5 * (est.ci_high - est.ci_low);
  EXPECT_NEAR(est.p_hat, exact, 2.0 * half);
}
