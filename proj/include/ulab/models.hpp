#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ulab/pathspace.hpp"

namespace ulab {

/// Gaussian increments, N(0, dt) per entry, laid out steps x channels.
struct NoiseDraw {
  TimeGrid grid;
  std::size_t channels;
  std::vector<double> increments;
  std::uint64_t master_seed;
  std::uint64_t sample_index;

  std::span<const double> step(std::size_t i) const noexcept { return {increments.data() + i * channels, channels}; }
};

NoiseDraw sample_noise(const TimeGrid& grid, std::size_t channels, std::uint64_t master_seed,
                       std::uint64_t sample_index);

/// Step control, constant on [t_i, t_{i+1}), with values in R^K.
class Control {
 public:
  Control(TimeGrid grid, std::size_t channels, std::vector<double> values);

  static Control zero(TimeGrid grid, std::size_t channels);
  static Control constant(TimeGrid grid, const Point& value);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t channels() const noexcept { return channels_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> step(std::size_t i) const noexcept { return {values_.data() + i * channels_, channels_}; }

  /// Cameron-Martin energy: half the squared L2 norm.
  double energy() const noexcept { return energy_; }
  double squared_norm() const noexcept { return 2.0 * energy_; }
  /// |u|^2 <= N.
  bool in_ball(double n) const noexcept;
  bool is_zero() const noexcept;

  Control scaled(double c) const;
  friend Control operator+(const Control& a, const Control& b);

 private:
  TimeGrid grid_;
  std::size_t channels_;
  std::vector<double> values_;
  double energy_;
};

/// out = f(x) for a state x in R^d.
using DriftFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& out)>;
/// out = G(x), a d x K matrix.
using NoiseFn = std::function<void(const Eigen::VectorXd& x, Eigen::MatrixXd& out)>;

enum class NoiseGrowth { none, bounded, linear };

/// x + sqrt(eps) W.
struct TranslatedBM {};

/// (1 + eps) x + sqrt(eps) W.
struct PerturbedBM {};

/// Translated BM except that the start 0 is replaced by swap_to.
struct SwappedBM {
  double swap_to = 0.5;
};

/// dX = b(X) dt + sigma(X) (sqrt(eps) dW + u dt), Euler-Maruyama.
struct FiniteSDE {
  std::size_t dim = 1;
  std::size_t channels = 1;
  DriftFn drift;
  NoiseFn diffusion;
  NoiseGrowth growth = NoiseGrowth::bounded;
  std::string label;
};

/// Regularity data of the noise map, kept for reports only.
struct NoiseRegularity {
  double alpha = 0.0;
  std::string kernel;
};

/**
 * Galerkin truncation dX = (-a X + B(X)) dt + G(X)(sqrt(eps) dw + u dt) on m
 * eigenmodes of the linear part, stepped with exponential Euler.
 */
struct GalerkinSPDE {
  std::size_t modes = 32;
  std::size_t channels = 32;
  std::vector<double> eigenvalues;
  DriftFn drift;
  NoiseFn noise;
  double kappa = 0.0;
  NoiseGrowth growth = NoiseGrowth::bounded;
  NoiseRegularity regularity;
  std::string drift_label;
  std::string noise_label;
};

class ProcessModel {
 public:
  using Kind = std::variant<TranslatedBM, PerturbedBM, SwappedBM, FiniteSDE, GalerkinSPDE>;

  ProcessModel(TimeGrid grid, Kind kind, std::string name = {});

  const TimeGrid& grid() const noexcept { return grid_; }
  const Kind& kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t state_dim() const noexcept;
  std::size_t channels() const noexcept;
  /// Rate function is the Cameron-Martin energy of the path itself.
  bool translation_type() const noexcept;
  NoiseGrowth noise_growth() const noexcept;
  /// Starting point the rate function is anchored at (the swap for SwappedBM).
  Point rate_origin(const Point& x) const;

  ProcessModel with_grid(TimeGrid grid) const;

 private:
  TimeGrid grid_;
  Kind kind_;
  std::string name_;
};

/**
 * X^{eps,u}_x driven by sqrt(eps) times @p noise plus the integral of u.
 * @p noise may be null only when eps == 0.
 * @throws NumericalBlowup when a state becomes non-finite.
 */
DiscretePath solve_controlled(const ProcessModel& model, const Point& x, double eps, const Control& u,
                              const NoiseDraw* noise = nullptr);

/// Noiseless controlled path, solve_controlled at eps = 0.
DiscretePath skeleton(const ProcessModel& model, const Point& x, const Control& u);

/// Discrete stochastic, controlled and nonlinear convolutions of a GalerkinSPDE along a frozen path.
struct Convolutions {
  DiscretePath stochastic;
  DiscretePath controlled;
  DiscretePath nonlinear;
};

Convolutions convolutions(const ProcessModel& model, const DiscretePath& phi, const Control& u,
                          const NoiseDraw& noise);

/// e^{-a t_j} x for every grid point j, the free part of the mild solution.
DiscretePath semigroup_orbit(const ProcessModel& model, const Point& x);

}  // namespace ulab
