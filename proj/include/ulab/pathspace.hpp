#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ulab {

using Point = std::vector<double>;

/// Uniform grid t_i = i T / n on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t points() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return dt_; }
  /// t_n is exactly T.
  double time(std::size_t i) const noexcept;

  bool operator==(const TimeGrid& other) const noexcept = default;

 private:
  double horizon_;
  std::size_t steps_;
  double dt_;
};

/**
 * Path on a TimeGrid, stored as an origin in R^d plus per-point displacements.
 *
 * The value at t_i is origin + displacement(i). Metrics subtract origins and
 * displacements separately, so translating a path changes only the origin and
 * distances between translates of a common displacement are computed exactly.
 */
class DiscretePath {
 public:
  /// Absolute values, row-major (points x dim); the origin is zero.
  DiscretePath(TimeGrid grid, std::size_t dim, std::vector<double> values);

  static DiscretePath anchored(TimeGrid grid, Point origin, std::vector<double> displacement);
  static DiscretePath constant(TimeGrid grid, const Point& point);
  /// Scalar path with values f(t_i).
  static DiscretePath sampled(TimeGrid grid, const std::function<double(double)>& f);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t points() const noexcept { return grid_.points(); }

  std::span<const double> origin() const noexcept { return origin_; }
  std::span<const double> displacement(std::size_t i) const noexcept {
    return {disp_.data() + i * dim_, dim_};
  }
  std::span<const double> displacements() const noexcept { return disp_; }

  double value(std::size_t i, std::size_t k = 0) const noexcept { return origin_[k] + disp_[i * dim_ + k]; }
  Point point(std::size_t i) const;
  /// Absolute values, row-major.
  std::vector<double> values() const;

  DiscretePath translated(const Point& shift) const;

 private:
  DiscretePath(TimeGrid grid, std::size_t dim, Point origin, std::vector<double> disp, bool);
  void validate() const;

  TimeGrid grid_;
  std::size_t dim_;
  Point origin_;
  std::vector<double> disp_;
};

/// max_i |phi(t_i) - psi(t_i)| with the Euclidean norm in R^d.
double sup_metric(const DiscretePath& phi, const DiscretePath& psi);

/// Finite nonempty set of paths sharing one grid and dimension.
class PathSet {
 public:
  explicit PathSet(std::vector<DiscretePath> members);

  std::size_t size() const noexcept { return members_.size(); }
  const DiscretePath& operator[](std::size_t i) const noexcept { return members_[i]; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }
  const std::vector<DiscretePath>& members() const noexcept { return members_; }
  const TimeGrid& grid() const noexcept { return members_.front().grid(); }
  std::size_t dim() const noexcept { return members_.front().dim(); }

 private:
  std::vector<DiscretePath> members_;
};

double dist_to_set(const DiscretePath& phi, const PathSet& set);
double hausdorff(const PathSet& a, const PathSet& b);

/// A set of paths that can report dist(phi, set).
class TargetSet {
 public:
  virtual ~TargetSet() = default;
  virtual double distance(const DiscretePath& phi) const = 0;
  /// Members that lie in the set, possibly none.
  virtual std::vector<DiscretePath> representatives() const = 0;
  /// Number of sampled members, 0 when the distance is computed exactly.
  virtual std::size_t sample_size() const = 0;
  virtual std::string describe() const = 0;
};

class SampledSet final : public TargetSet {
 public:
  explicit SampledSet(PathSet members, std::string label = "sampled");

  double distance(const DiscretePath& phi) const override { return dist_to_set(phi, members_); }
  std::vector<DiscretePath> representatives() const override { return members_.members(); }
  std::size_t sample_size() const override { return members_.size(); }
  std::string describe() const override { return label_; }

  const PathSet& members() const noexcept { return members_; }

 private:
  PathSet members_;
  std::string label_;
};

class EventSpec;

namespace event {

struct Ball {
  DiscretePath center;
  double radius;
};

struct UnionOfBalls {
  std::vector<Ball> balls;
};

/**
 * Tube of sup-radius r around the shape of a center path, ignoring where it
 * starts: margin is (r - max_i |(phi_i - phi_0) - (c_i - c_0)|) / 2, the exact
 * sup-norm distance to the complement of the set.
 */
struct RelativeBall {
  DiscretePath center;
  double radius;
};

struct DistanceAtLeast {
  std::shared_ptr<const TargetSet> set;
  double threshold;
};

struct TerminalAtLeast {
  std::size_t coordinate;
  double level;
};

struct InitialEquals {
  Point value;
  double tolerance;
  std::shared_ptr<const EventSpec> clause;
};

struct Complement {
  std::shared_ptr<const EventSpec> inner;
};

struct Union {
  std::vector<EventSpec> parts;
};

struct Intersection {
  std::vector<EventSpec> parts;
};

}  // namespace event

/// Event with a signed margin: membership in the open set is margin > 0.
class EventSpec {
 public:
  using Node = std::variant<event::Ball, event::UnionOfBalls, event::RelativeBall, event::DistanceAtLeast,
                            event::TerminalAtLeast, event::InitialEquals, event::Complement, event::Union,
                            event::Intersection>;

  EventSpec(Node node);

  static EventSpec ball(DiscretePath center, double radius);
  static EventSpec union_of_balls(std::vector<event::Ball> balls);
  static EventSpec relative_ball(DiscretePath center, double radius);
  static EventSpec distance_at_least(std::shared_ptr<const TargetSet> set, double threshold);
  static EventSpec terminal_at_least(std::size_t coordinate, double level);
  static EventSpec initial_equals(Point value, double tolerance, EventSpec clause);
  static EventSpec complement(EventSpec inner);
  static EventSpec any_of(std::vector<EventSpec> parts);
  static EventSpec all_of(std::vector<EventSpec> parts);

  const Node& node() const noexcept { return node_; }
  std::string describe() const;

 private:
  Node node_;
};

double event_margin(const DiscretePath& phi, const EventSpec& event);

enum class Membership { open, closed };

/// margin > eta: plain membership at eta = 0, the shrunk set G_eta for eta > 0.
bool in_open(const DiscretePath& phi, const EventSpec& event, double eta = 0.0);
/// margin >= -eta: closure at eta = 0, the fattened set F^eta for eta > 0.
bool in_closed(const DiscretePath& phi, const EventSpec& event, double eta = 0.0);
bool contains(const DiscretePath& phi, const EventSpec& event, Membership kind, double eta = 0.0);

/// Paths in the event that are natural minimizer candidates (ball centers), started at @p start when free.
std::vector<DiscretePath> event_anchors(const EventSpec& event, const Point& start);

}  // namespace ulab
