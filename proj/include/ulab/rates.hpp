#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ulab/models.hpp"
#include "ulab/pathspace.hpp"
#include "ulab/test_function.hpp"

namespace ulab {

/// I_x(phi): finite together with an achieving control, or +inf without one.
class RateValue {
 public:
  static RateValue infinite() { return RateValue(); }
  static RateValue achieved(Control control);

  bool finite() const noexcept { return control_.has_value(); }
  double value() const noexcept;
  const std::optional<Control>& control() const noexcept { return control_; }

 private:
  RateValue() = default;
  explicit RateValue(Control c) : control_(std::move(c)) {}

  std::optional<Control> control_;
};

/// Relative tolerance on phi(0) = x for the closed-form rate.
inline constexpr double kStartTolerance = 1e-12;

/// Cameron-Martin energy of phi for the Brownian models; +inf if phi does not start at x.
RateValue rate_closed_form(const ProcessModel& model, double x, const DiscretePath& phi);

/**
 * Minimum-norm control reproducing phi step by step through the discrete
 * skeleton. +inf when a step residual is not in the range of the noise map or
 * the recovered control does not reproduce phi within tol.
 */
RateValue rate_variational(const ProcessModel& model, const Point& x, const DiscretePath& phi, double tol = 1e-9);

/// Closed form for the Brownian models, variational otherwise.
RateValue rate_of(const ProcessModel& model, const Point& x, const DiscretePath& phi);

/// Skeleton images of controls with energy at most s; the zero control comes first.
struct LevelSetSample {
  Point x;
  double level;
  std::uint64_t seed;
  PathSet paths;
  std::vector<Control> controls;
  /// Energy of each generating control, an upper bound on the rate of its path.
  std::vector<double> rates;
};

/**
 * Samples Phi_x(s): count controls (the first is zero) with uniform direction
 * and energy r s, r uniform on [0, 1]. At s = 0 the sample is the constant path.
 * Controls depend on (seed, index) only, never on x.
 */
LevelSetSample sample_level_set(const ProcessModel& model, const Point& x, double s, std::size_t count,
                                std::uint64_t seed);

/**
 * Minimum energy over paths starting at the model's rate origin for x that
 * stay within the closed tube |phi_i - psi_i| <= r. +inf if the start is
 * outside the tube. Brownian models only.
 */
double min_tube_energy(const ProcessModel& model, const Point& x, const DiscretePath& psi, double r);

/// Exact dist(psi, Phi_x(s)) for the Brownian models, by a bracketed root search on min_tube_energy.
class ExactLevelSet final : public TargetSet {
 public:
  ExactLevelSet(ProcessModel model, Point x, double level);

  double distance(const DiscretePath& psi) const override;
  /// dist >= delta, decided by a single energy evaluation.
  bool at_least(const DiscretePath& psi, double delta) const;
  std::vector<DiscretePath> representatives() const override;
  std::size_t sample_size() const override { return 0; }
  std::string describe() const override;

  double level() const noexcept { return level_; }

 private:
  ProcessModel model_;
  Point x_;
  double level_;
};

struct InfBudget {
  double level = 2.0;
  std::size_t count = 64;
  std::uint64_t seed = 1;
  /// Multiples lambda in [0, 2] of each anchor control tried as extra candidates.
  std::size_t ray_points = 21;
};

struct InfimumEstimate {
  double value;
  DiscretePath argmin;
  Control control;
  std::size_t candidates;
};

/**
 * min h(phi) + I_x(phi) over a level-set sample at budget.level, the anchors of
 * h, and rays through their controls. An upper bound on the true infimum.
 * @throws ConfigError if budget.level < 2 bound(h).
 */
InfimumEstimate inf_h_plus_I(const ProcessModel& model, const Point& x, const TestFunction& h,
                             const InfBudget& budget);

/// Candidate paths from x: a level-set sample, the given anchors, and rays through their controls.
struct CandidatePool {
  std::vector<DiscretePath> paths;
  std::vector<Control> controls;
  std::vector<double> rates;
};

CandidatePool candidate_pool(const ProcessModel& model, const Point& x, const std::vector<DiscretePath>& anchors,
                             const InfBudget& budget);

}  // namespace ulab
