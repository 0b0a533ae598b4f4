#include "ulab/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ulab/error.hpp"
#include "ulab/numeric.hpp"
#include "ulab/rng.hpp"

namespace ulab {

NoiseDraw sample_noise(const TimeGrid& grid, std::size_t channels, std::uint64_t master_seed,
                       std::uint64_t sample_index) {
  if (channels < 1) throw ConfigError("noise needs at least one channel");
  NoiseDraw draw{grid, channels, std::vector<double>(grid.steps() * channels), master_seed, sample_index};
  auto gen = substream(master_seed, sample_index, StreamDomain::noise);
  std::normal_distribution<double> normal(0.0, std::sqrt(grid.dt()));
  for (double& v : draw.increments) v = normal(gen);
  return draw;
}

Control::Control(TimeGrid grid, std::size_t channels, std::vector<double> values)
    : grid_(grid), channels_(channels), values_(std::move(values)), energy_(0.0) {
  if (channels_ < 1) throw ShapeError("control needs at least one channel");
  if (values_.size() != grid_.steps() * channels_)
    throw ShapeError("control has " + std::to_string(values_.size()) + " values, expected " +
                     std::to_string(grid_.steps() * channels_));
  for (double v : values_)
    if (!std::isfinite(v)) throw ShapeError("control value is not finite");
  energy_ = 0.5 * dot2(values_, values_) * grid_.dt();
}

Control Control::zero(TimeGrid grid, std::size_t channels) {
  return Control(grid, channels, std::vector<double>(grid.steps() * channels, 0.0));
}

Control Control::constant(TimeGrid grid, const Point& value) {
  std::vector<double> v(grid.steps() * value.size());
  for (std::size_t i = 0; i < grid.steps(); ++i)
    std::copy(value.begin(), value.end(), v.begin() + static_cast<std::ptrdiff_t>(i * value.size()));
  return Control(grid, value.size(), std::move(v));
}

bool Control::in_ball(double n) const noexcept { return squared_norm() <= n * (1.0 + 1e-12); }

bool Control::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

Control Control::scaled(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= c;
  return Control(grid_, channels_, std::move(v));
}

Control operator+(const Control& a, const Control& b) {
  if (!(a.grid_ == b.grid_) || a.channels_ != b.channels_) throw ShapeError("adding controls of different shapes");
  std::vector<double> v = a.values_;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values_[i];
  return Control(a.grid_, a.channels_, std::move(v));
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_kind(const ProcessModel::Kind& kind) {
  std::visit(overloaded{
                 [](const TranslatedBM&) {},
                 [](const PerturbedBM&) {},
                 [](const SwappedBM& s) {
                   if (!std::isfinite(s.swap_to)) throw ConfigError("swap target must be finite");
                 },
                 [](const FiniteSDE& m) {
                   if (m.dim < 1 || m.channels < 1) throw ConfigError("SDE dimensions must be >= 1");
                   if (!m.drift || !m.diffusion) throw ConfigError("SDE needs drift and diffusion");
                 },
                 [](const GalerkinSPDE& m) {
                   if (m.modes < 1 || m.channels < 1) throw ConfigError("SPDE needs at least one mode and channel");
                   if (m.eigenvalues.size() != m.modes) throw ConfigError("SPDE needs one eigenvalue per mode");
                   for (std::size_t k = 0; k < m.modes; ++k) {
                     if (!(m.eigenvalues[k] > 0.0) || !std::isfinite(m.eigenvalues[k]))
                       throw ConfigError("SPDE eigenvalues must be finite and > 0");
                     if (k > 0 && m.eigenvalues[k] < m.eigenvalues[k - 1])
                       throw ConfigError("SPDE eigenvalues must be nondecreasing");
                   }
                   if (!m.drift || !m.noise) throw ConfigError("SPDE needs drift and noise maps");
                 },
             },
             kind);
}

}  // namespace

ProcessModel::ProcessModel(TimeGrid grid, Kind kind, std::string name)
    : grid_(grid), kind_(std::move(kind)), name_(std::move(name)) {
  validate_kind(kind_);
}

std::size_t ProcessModel::state_dim() const noexcept {
  return std::visit(overloaded{
                        [](const FiniteSDE& m) { return m.dim; },
                        [](const GalerkinSPDE& m) { return m.modes; },
                        [](const auto&) -> std::size_t { return 1; },
                    },
                    kind_);
}

std::size_t ProcessModel::channels() const noexcept {
  return std::visit(overloaded{
                        [](const FiniteSDE& m) { return m.channels; },
                        [](const GalerkinSPDE& m) { return m.channels; },
                        [](const auto&) -> std::size_t { return 1; },
                    },
                    kind_);
}

bool ProcessModel::translation_type() const noexcept {
  return std::holds_alternative<TranslatedBM>(kind_) || std::holds_alternative<PerturbedBM>(kind_) ||
         std::holds_alternative<SwappedBM>(kind_);
}

NoiseGrowth ProcessModel::noise_growth() const noexcept {
  return std::visit(overloaded{
                        [](const FiniteSDE& m) { return m.growth; },
                        [](const GalerkinSPDE& m) { return m.growth; },
                        [](const auto&) { return NoiseGrowth::bounded; },
                    },
                    kind_);
}

Point ProcessModel::rate_origin(const Point& x) const {
  if (const auto* s = std::get_if<SwappedBM>(&kind_); s && x.size() == 1 && x[0] == 0.0) return {s->swap_to};
  return x;
}

ProcessModel ProcessModel::with_grid(TimeGrid grid) const { return ProcessModel(grid, kind_, name_); }

namespace {

void check_inputs(const ProcessModel& model, const Point& x, double eps, const Control& u, const NoiseDraw* noise) {
  if (x.size() != model.state_dim()) throw ShapeError("initial point has wrong dimension");
  if (!(u.grid() == model.grid()) || u.channels() != model.channels())
    throw ShapeError("control does not match the model grid and channels");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be finite and >= 0");
  if (eps > 0.0 && noise == nullptr) throw ConfigError("eps > 0 requires a noise draw");
  if (noise && (!(noise->grid == model.grid()) || noise->channels != model.channels()))
    throw ShapeError("noise draw does not match the model grid and channels");
}

DiscretePath solve_translation(const ProcessModel& model, Point origin, double eps, const Control& u,
                               const NoiseDraw* noise) {
  const TimeGrid& grid = model.grid();
  const double dt = grid.dt();
  const double scale = std::sqrt(eps);
  std::vector<double> disp(grid.points(), 0.0);
  const auto uv = u.values();
  double acc = 0.0;
  if (eps > 0.0) {
    const auto& dw = noise->increments;
    for (std::size_t i = 0; i < grid.steps(); ++i) {
      acc += scale * dw[i] + uv[i] * dt;
      disp[i + 1] = acc;
    }
  } else {
    for (std::size_t i = 0; i < grid.steps(); ++i) {
      acc += uv[i] * dt;
      disp[i + 1] = acc;
    }
  }
  if (!std::isfinite(acc)) throw NumericalBlowup(grid.steps(), "translated Brownian path is not finite");
  return DiscretePath::anchored(grid, std::move(origin), std::move(disp));
}

void require_finite(const Eigen::VectorXd& v, std::size_t step, const char* what) {
  if (!v.allFinite()) throw NumericalBlowup(step, what);
}

DiscretePath solve_sde(const ProcessModel& model, const FiniteSDE& sde, const Point& x, double eps, const Control& u,
                       const NoiseDraw* noise) {
  const TimeGrid& grid = model.grid();
  const double dt = grid.dt();
  const double scale = std::sqrt(eps);
  const std::size_t d = sde.dim;
  const std::size_t k = sde.channels;
  std::vector<double> values(grid.points() * d);
  Eigen::VectorXd state = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(d));
  Eigen::VectorXd b(d), drive(k);
  Eigen::MatrixXd sigma(d, k);
  std::copy(x.begin(), x.end(), values.begin());
  for (std::size_t i = 0; i < grid.steps(); ++i) {
    sde.drift(state, b);
    sde.diffusion(state, sigma);
    const auto ui = u.step(i);
    for (std::size_t c = 0; c < k; ++c) drive[c] = ui[c] * dt + (noise ? scale * noise->step(i)[c] : 0.0);
    state += b * dt + sigma * drive;
    require_finite(state, i + 1, "SDE state is not finite");
    std::copy(state.data(), state.data() + d, values.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
  }
  return DiscretePath(grid, d, std::move(values));
}

struct ExpEuler {
  Eigen::ArrayXd decay;
  Eigen::ArrayXd factor;
};

ExpEuler exp_euler(const GalerkinSPDE& spde, double dt) {
  ExpEuler e{Eigen::ArrayXd(spde.modes), Eigen::ArrayXd(spde.modes)};
  for (std::size_t k = 0; k < spde.modes; ++k) {
    const double z = spde.eigenvalues[k] * dt;
    e.decay[k] = std::exp(-z);
    e.factor[k] = -std::expm1(-z) / z;
  }
  return e;
}

DiscretePath solve_spde(const ProcessModel& model, const GalerkinSPDE& spde, const Point& x, double eps,
                        const Control& u, const NoiseDraw* noise) {
  const TimeGrid& grid = model.grid();
  const double dt = grid.dt();
  const double scale = std::sqrt(eps);
  const std::size_t m = spde.modes;
  const std::size_t k = spde.channels;
  const ExpEuler e = exp_euler(spde, dt);
  std::vector<double> values(grid.points() * m);
  Eigen::VectorXd state = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(m));
  Eigen::VectorXd b(m), drive(k);
  Eigen::MatrixXd g(m, k);
  std::copy(x.begin(), x.end(), values.begin());
  for (std::size_t i = 0; i < grid.steps(); ++i) {
    spde.drift(state, b);
    spde.noise(state, g);
    const auto ui = u.step(i);
    for (std::size_t c = 0; c < k; ++c) drive[c] = ui[c] * dt + (noise ? scale * noise->step(i)[c] : 0.0);
    Eigen::VectorXd forcing = b * dt + g * drive;
    state = (e.decay * state.array() + e.factor * forcing.array()).matrix();
    require_finite(state, i + 1, "SPDE state is not finite");
    std::copy(state.data(), state.data() + m, values.begin() + static_cast<std::ptrdiff_t>((i + 1) * m));
  }
  return DiscretePath(grid, m, std::move(values));
}

}  // namespace

DiscretePath solve_controlled(const ProcessModel& model, const Point& x, double eps, const Control& u,
                              const NoiseDraw* noise) {
  check_inputs(model, x, eps, u, noise);
  if (eps == 0.0) noise = nullptr;
  return std::visit(overloaded{
                        [&](const TranslatedBM&) { return solve_translation(model, x, eps, u, noise); },
                        [&](const PerturbedBM&) {
                          return solve_translation(model, Point{(1.0 + eps) * x[0]}, eps, u, noise);
                        },
                        [&](const SwappedBM&) { return solve_translation(model, model.rate_origin(x), eps, u, noise); },
                        [&](const FiniteSDE& m) { return solve_sde(model, m, x, eps, u, noise); },
                        [&](const GalerkinSPDE& m) { return solve_spde(model, m, x, eps, u, noise); },
                    },
                    model.kind());
}

DiscretePath skeleton(const ProcessModel& model, const Point& x, const Control& u) {
  return solve_controlled(model, x, 0.0, u, nullptr);
}

Convolutions convolutions(const ProcessModel& model, const DiscretePath& phi, const Control& u,
                          const NoiseDraw& noise) {
  const auto* spde = std::get_if<GalerkinSPDE>(&model.kind());
  if (!spde) throw ConfigError("convolutions are defined for the Galerkin SPDE model only");
  const TimeGrid& grid = model.grid();
  if (!(phi.grid() == grid) || phi.dim() != spde->modes) throw ShapeError("path does not match the SPDE model");
  if (!(u.grid() == grid) || u.channels() != spde->channels) throw ShapeError("control does not match the SPDE model");
  if (!(noise.grid == grid) || noise.channels != spde->channels) throw ShapeError("noise does not match the SPDE model");
  const std::size_t m = spde->modes;
  const std::size_t k = spde->channels;
  const double dt = grid.dt();
  const ExpEuler e = exp_euler(*spde, dt);
  std::vector<double> gamma(grid.points() * m, 0.0), lambda(grid.points() * m, 0.0), theta(grid.points() * m, 0.0);
  Eigen::VectorXd g_acc = Eigen::VectorXd::Zero(m), l_acc = g_acc, t_acc = g_acc, state(m), b(m), dw(k), ui(k);
  Eigen::MatrixXd g(m, k);
  for (std::size_t i = 0; i < grid.steps(); ++i) {
    for (std::size_t c = 0; c < m; ++c) state[c] = phi.value(i, c);
    spde->drift(state, b);
    spde->noise(state, g);
    for (std::size_t c = 0; c < k; ++c) {
      dw[c] = noise.step(i)[c];
      ui[c] = u.step(i)[c] * dt;
    }
    g_acc = (e.decay * g_acc.array() + e.factor * (g * dw).array()).matrix();
    l_acc = (e.decay * l_acc.array() + e.factor * (g * ui).array()).matrix();
    t_acc = (e.decay * t_acc.array() + e.factor * (b * dt).array()).matrix();
    for (std::size_t c = 0; c < m; ++c) {
      gamma[(i + 1) * m + c] = g_acc[c];
      lambda[(i + 1) * m + c] = l_acc[c];
      theta[(i + 1) * m + c] = t_acc[c];
    }
  }
  return {DiscretePath(grid, m, std::move(gamma)), DiscretePath(grid, m, std::move(lambda)),
          DiscretePath(grid, m, std::move(theta))};
}

DiscretePath semigroup_orbit(const ProcessModel& model, const Point& x) {
  const auto* spde = std::get_if<GalerkinSPDE>(&model.kind());
  if (!spde) throw ConfigError("semigroup orbit is defined for the Galerkin SPDE model only");
  if (x.size() != spde->modes) throw ShapeError("initial point has wrong dimension");
  const TimeGrid& grid = model.grid();
  const ExpEuler e = exp_euler(*spde, grid.dt());
  std::vector<double> values(grid.points() * spde->modes);
  Eigen::ArrayXd state = Eigen::Map<const Eigen::ArrayXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  std::copy(x.begin(), x.end(), values.begin());
  for (std::size_t i = 0; i < grid.steps(); ++i) {
    state = e.decay * state;
    std::copy(state.data(), state.data() + spde->modes,
              values.begin() + static_cast<std::ptrdiff_t>((i + 1) * spde->modes));
  }
  return DiscretePath(grid, spde->modes, std::move(values));
}

}  // namespace ulab
