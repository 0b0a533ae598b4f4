#include "ulab/pathspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ulab/error.hpp"

namespace ulab {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps), dt_(0.0) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("time grid horizon must be finite and > 0");
  if (steps < 1) throw ConfigError("time grid needs at least one step");
  dt_ = horizon_ / static_cast<double>(steps_);
}

double TimeGrid::time(std::size_t i) const noexcept {
  if (i >= steps_) return horizon_;
  return static_cast<double>(i) * dt_;
}

DiscretePath::DiscretePath(TimeGrid grid, std::size_t dim, std::vector<double> values)
    : DiscretePath(grid, dim, Point(dim, 0.0), std::move(values), true) {}

DiscretePath::DiscretePath(TimeGrid grid, std::size_t dim, Point origin, std::vector<double> disp, bool)
    : grid_(grid), dim_(dim), origin_(std::move(origin)), disp_(std::move(disp)) {
  validate();
}

void DiscretePath::validate() const {
  if (dim_ < 1) throw ShapeError("path dimension must be >= 1");
  if (origin_.size() != dim_) throw ShapeError("path origin has wrong dimension");
  if (disp_.size() != grid_.points() * dim_)
    throw ShapeError("path has " + std::to_string(disp_.size()) + " values, expected " +
                     std::to_string(grid_.points() * dim_));
  for (double v : origin_)
    if (!std::isfinite(v)) throw ConfigError("path origin is not finite");
  for (double v : disp_)
    if (!std::isfinite(v)) throw ConfigError("path value is not finite");
}

DiscretePath DiscretePath::anchored(TimeGrid grid, Point origin, std::vector<double> displacement) {
  const std::size_t dim = origin.size();
  return DiscretePath(grid, dim, std::move(origin), std::move(displacement), true);
}

DiscretePath DiscretePath::constant(TimeGrid grid, const Point& point) {
  return anchored(grid, point, std::vector<double>(grid.points() * point.size(), 0.0));
}

DiscretePath DiscretePath::sampled(TimeGrid grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.points());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.time(i));
  return DiscretePath(grid, 1, std::move(v));
}

Point DiscretePath::point(std::size_t i) const {
  Point p(dim_);
  for (std::size_t k = 0; k < dim_; ++k) p[k] = value(i, k);
  return p;
}

std::vector<double> DiscretePath::values() const {
  std::vector<double> v(disp_.size());
  for (std::size_t i = 0; i < points(); ++i)
    for (std::size_t k = 0; k < dim_; ++k) v[i * dim_ + k] = value(i, k);
  return v;
}

DiscretePath DiscretePath::translated(const Point& shift) const {
  if (shift.size() != dim_) throw ShapeError("translation has wrong dimension");
  Point o = origin_;
  for (std::size_t k = 0; k < dim_; ++k) o[k] += shift[k];
  return DiscretePath(grid_, dim_, std::move(o), disp_, true);
}

namespace {

void require_compatible(const DiscretePath& a, const DiscretePath& b) {
  if (!(a.grid() == b.grid())) throw ShapeError("paths live on different grids");
  if (a.dim() != b.dim()) throw ShapeError("paths have different dimensions");
}

}  // namespace

double sup_metric(const DiscretePath& phi, const DiscretePath& psi) {
  require_compatible(phi, psi);
  const std::size_t d = phi.dim();
  const auto o1 = phi.origin();
  const auto o2 = psi.origin();
  const auto d1 = phi.displacements();
  const auto d2 = psi.displacements();
  double best = 0.0;
  if (d == 1) {
    const double shift = o1[0] - o2[0];
    for (std::size_t i = 0; i < d1.size(); ++i) best = std::max(best, std::abs(shift + (d1[i] - d2[i])));
    return best;
  }
  Point shift(d);
  for (std::size_t k = 0; k < d; ++k) shift[k] = o1[k] - o2[k];
  for (std::size_t i = 0; i < phi.points(); ++i) {
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = shift[k] + (d1[i * d + k] - d2[i * d + k]);
      sq += diff * diff;
    }
    best = std::max(best, sq);
  }
  return std::sqrt(best);
}

PathSet::PathSet(std::vector<DiscretePath> members) : members_(std::move(members)) {
  if (members_.empty()) throw ShapeError("path set must be nonempty");
  for (const auto& m : members_) require_compatible(m, members_.front());
}

double dist_to_set(const DiscretePath& phi, const PathSet& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& psi : set) best = std::min(best, sup_metric(phi, psi));
  return best;
}

double hausdorff(const PathSet& a, const PathSet& b) {
  double best = 0.0;
  for (const auto& phi : a) best = std::max(best, dist_to_set(phi, b));
  for (const auto& psi : b) best = std::max(best, dist_to_set(psi, a));
  return best;
}

SampledSet::SampledSet(PathSet members, std::string label) : members_(std::move(members)), label_(std::move(label)) {}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || std::isnan(v)) throw ConfigError(std::string(what) + " must be > 0");
}

void validate(const EventSpec::Node& node) {
  std::visit(overloaded{
                 [](const event::Ball& b) { require_positive(b.radius, "ball radius"); },
                 [](const event::UnionOfBalls& u) {
                   if (u.balls.empty()) throw ConfigError("union of balls needs at least one ball");
                   for (const auto& b : u.balls) {
                     require_positive(b.radius, "ball radius");
                     require_compatible(b.center, u.balls.front().center);
                   }
                 },
                 [](const event::RelativeBall& b) { require_positive(b.radius, "tube radius"); },
                 [](const event::DistanceAtLeast& d) {
                   if (!d.set) throw ConfigError("distance event needs a target set");
                   require_positive(d.threshold, "distance threshold");
                 },
                 [](const event::TerminalAtLeast& t) {
                   if (!std::isfinite(t.level)) throw ConfigError("terminal level must be finite");
                 },
                 [](const event::InitialEquals& e) {
                   if (!(e.tolerance >= 0.0)) throw ConfigError("initial tolerance must be >= 0");
                   if (!e.clause) throw ConfigError("initial-value event needs a clause");
                 },
                 [](const event::Complement& c) {
                   if (!c.inner) throw ConfigError("complement needs an inner event");
                 },
                 [](const event::Union& u) {
                   if (u.parts.empty()) throw ConfigError("union needs at least one part");
                 },
                 [](const event::Intersection& u) {
                   if (u.parts.empty()) throw ConfigError("intersection needs at least one part");
                 },
             },
             node);
}

}  // namespace

EventSpec::EventSpec(Node node) : node_(std::move(node)) { validate(node_); }

EventSpec EventSpec::ball(DiscretePath center, double radius) {
  return EventSpec(event::Ball{std::move(center), radius});
}
EventSpec EventSpec::union_of_balls(std::vector<event::Ball> balls) {
  return EventSpec(event::UnionOfBalls{std::move(balls)});
}
EventSpec EventSpec::relative_ball(DiscretePath center, double radius) {
  return EventSpec(event::RelativeBall{std::move(center), radius});
}
EventSpec EventSpec::distance_at_least(std::shared_ptr<const TargetSet> set, double threshold) {
  return EventSpec(event::DistanceAtLeast{std::move(set), threshold});
}
EventSpec EventSpec::terminal_at_least(std::size_t coordinate, double level) {
  return EventSpec(event::TerminalAtLeast{coordinate, level});
}
EventSpec EventSpec::initial_equals(Point value, double tolerance, EventSpec clause) {
  return EventSpec(
      event::InitialEquals{std::move(value), tolerance, std::make_shared<const EventSpec>(std::move(clause))});
}
EventSpec EventSpec::complement(EventSpec inner) {
  return EventSpec(event::Complement{std::make_shared<const EventSpec>(std::move(inner))});
}
EventSpec EventSpec::any_of(std::vector<EventSpec> parts) { return EventSpec(event::Union{std::move(parts)}); }
EventSpec EventSpec::all_of(std::vector<EventSpec> parts) { return EventSpec(event::Intersection{std::move(parts)}); }

std::string EventSpec::describe() const {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const event::Ball& b) { out << "Ball(r=" << b.radius << ")"; },
                 [&](const event::UnionOfBalls& u) { out << "UnionOfBalls(" << u.balls.size() << ")"; },
                 [&](const event::RelativeBall& b) { out << "RelativeBall(r=" << b.radius << ")"; },
                 [&](const event::DistanceAtLeast& d) {
                   out << "DistanceAtLeast(" << d.set->describe() << ", " << d.threshold << ")";
                 },
                 [&](const event::TerminalAtLeast& t) {
                   out << "TerminalAtLeast(x" << t.coordinate << " >= " << t.level << ")";
                 },
                 [&](const event::InitialEquals& e) { out << "InitialEquals(" << e.clause->describe() << ")"; },
                 [&](const event::Complement& c) { out << "Complement(" << c.inner->describe() << ")"; },
                 [&](const event::Union& u) {
                   out << "Union(";
                   for (std::size_t i = 0; i < u.parts.size(); ++i) out << (i ? ", " : "") << u.parts[i].describe();
                   out << ")";
                 },
                 [&](const event::Intersection& u) {
                   out << "Intersection(";
                   for (std::size_t i = 0; i < u.parts.size(); ++i) out << (i ? ", " : "") << u.parts[i].describe();
                   out << ")";
                 },
             },
             node_);
  return out.str();
}

namespace {

double relative_tube_distance(const DiscretePath& phi, const DiscretePath& center) {
  require_compatible(phi, center);
  const std::size_t d = phi.dim();
  double best = 0.0;
  for (std::size_t i = 0; i < phi.points(); ++i) {
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double a = phi.displacement(i)[k] - phi.displacement(0)[k];
      const double b = center.displacement(i)[k] - center.displacement(0)[k];
      sq += (a - b) * (a - b);
    }
    best = std::max(best, sq);
  }
  return std::sqrt(best);
}

}  // namespace

double event_margin(const DiscretePath& phi, const EventSpec& spec) {
  return std::visit(
      overloaded{
          [&](const event::Ball& b) { return b.radius - sup_metric(phi, b.center); },
          [&](const event::UnionOfBalls& u) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& b : u.balls) best = std::max(best, b.radius - sup_metric(phi, b.center));
            return best;
          },
          [&](const event::RelativeBall& b) { return 0.5 * (b.radius - relative_tube_distance(phi, b.center)); },
          [&](const event::DistanceAtLeast& d) { return d.set->distance(phi) - d.threshold; },
          [&](const event::TerminalAtLeast& t) {
            if (t.coordinate >= phi.dim()) throw ShapeError("terminal coordinate out of range");
            return phi.value(phi.points() - 1, t.coordinate) - t.level;
          },
          [&](const event::InitialEquals& e) {
            if (e.value.size() != phi.dim()) throw ShapeError("initial value has wrong dimension");
            double sq = 0.0;
            for (std::size_t k = 0; k < phi.dim(); ++k) {
              const double diff = phi.value(0, k) - e.value[k];
              sq += diff * diff;
            }
            return std::min(e.tolerance - std::sqrt(sq), event_margin(phi, *e.clause));
          },
          [&](const event::Complement& c) { return -event_margin(phi, *c.inner); },
          [&](const event::Union& u) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& part : u.parts) best = std::max(best, event_margin(phi, part));
            return best;
          },
          [&](const event::Intersection& u) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& part : u.parts) best = std::min(best, event_margin(phi, part));
            return best;
          },
      },
      spec.node());
}

bool in_open(const DiscretePath& phi, const EventSpec& event, double eta) { return event_margin(phi, event) > eta; }

bool in_closed(const DiscretePath& phi, const EventSpec& event, double eta) {
  return event_margin(phi, event) >= -eta;
}

bool contains(const DiscretePath& phi, const EventSpec& event, Membership kind, double eta) {
  return kind == Membership::open ? in_open(phi, event, eta) : in_closed(phi, event, eta);
}

std::vector<DiscretePath> event_anchors(const EventSpec& spec, const Point& start) {
  std::vector<DiscretePath> out;
  auto append = [&out](std::vector<DiscretePath> more) {
    for (auto& p : more) out.push_back(std::move(p));
  };
  std::visit(overloaded{
                 [&](const event::Ball& b) { out.push_back(b.center); },
                 [&](const event::UnionOfBalls& u) {
                   for (const auto& b : u.balls) out.push_back(b.center);
                 },
                 [&](const event::RelativeBall& b) {
                   if (start.size() != b.center.dim()) return;
                   std::vector<double> disp(b.center.displacements().begin(), b.center.displacements().end());
                   for (std::size_t i = 0; i < b.center.points(); ++i)
                     for (std::size_t k = 0; k < start.size(); ++k)
                       disp[i * start.size() + k] -= b.center.displacement(0)[k];
                   out.push_back(DiscretePath::anchored(b.center.grid(), start, std::move(disp)));
                 },
                 [&](const event::DistanceAtLeast&) {},
                 [&](const event::TerminalAtLeast&) {},
                 [&](const event::InitialEquals& e) { append(event_anchors(*e.clause, start)); },
                 [&](const event::Complement&) {},
                 [&](const event::Union& u) {
                   for (const auto& part : u.parts) append(event_anchors(part, start));
                 },
                 [&](const event::Intersection& u) {
                   for (const auto& part : u.parts) append(event_anchors(part, start));
                 },
             },
             spec.node());
  return out;
}

}  // namespace ulab
