#pragma once

#include <vector>

#include "fhn/detail/dopri.hpp"
#include "fhn/errors.hpp"
#include "fhn/geometry.hpp"
#include "fhn/vectorfield.hpp"

namespace fhn {

enum class TrajectoryEnd { reached_t_end, escaped_radius, crossing_found };

/// Accepted-step samples plus the dense extension of every step. For
/// backward integrations `times` are elapsed backward time.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec2> states;
  std::vector<DenseStep<2>> dense;
  TrajectoryEnd end = TrajectoryEnd::reached_t_end;
  bool backward = false;

  double duration() const noexcept { return times.empty() ? 0.0 : times.back(); }
  /// Dense interpolation at elapsed time t, clamped to [0, duration()].
  Vec2 at(double t) const;
};

/// Thrown when the step size underflows; carries what was integrated so far.
class IntegrationError : public numerical_error {
 public:
  IntegrationError(const std::string& what, Trajectory partial)
      : numerical_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

Trajectory integrate(const PlanarField& field, Vec2 start, double t_end,
                     const IntegratorOptions& opt);
Trajectory integrate(const PlanarField& field, Vec2 start, double t_end, double tol);

/// A straight line through `anchor`, parametrized by s along the unit
/// `direction`. Crossings count only when the normal velocity has the sign
/// `orientation` (the section normal is `direction` turned a quarter
/// counterclockwise).
struct Section {
  Vec2 anchor;
  Vec2 direction{1.0, 0.0};
  int orientation = 1;
  /// Only crossings with s > 0 count.
  bool half_line = true;
  /// The anchor is an equilibrium; continuation re-solves it as parameters move.
  bool anchored_at_equilibrium = false;

  Vec2 normal() const noexcept { return perp(direction); }
  Vec2 point(double s) const noexcept { return anchor + s * direction; }
  double coordinate(Vec2 p) const noexcept { return dot(p - anchor, direction); }
  double offset(Vec2 p) const noexcept { return dot(p - anchor, normal()); }
};

/// Builds a section and fixes its orientation from the flow. At a regular
/// anchor the field itself decides; at an equilibrium anchor the linearization
/// applied to the direction does. Throws usage_error when the flow is not
/// transverse to the line there.
Section make_section(const PlanarField& field, Vec2 anchor, Vec2 direction,
                     double transversality_floor = 1e-12);

/// underflow is reported by displacement(); next_crossing throws instead.
enum class ReturnStatus { returned, escaped, timed_out, stalled, underflow };

struct Crossing {
  ReturnStatus status = ReturnStatus::timed_out;
  Vec2 point;
  double time = 0.0;
  double s = 0.0;  ///< section coordinate of `point`
  /// Integral of the divergence from the start to the crossing.
  double divergence_integral = 0.0;

  bool returned() const noexcept { return status == ReturnStatus::returned; }
};

struct CrossingOptions {
  IntegratorOptions integrator{.tol = 1e-12};
  /// Crossings before this much arclength has been travelled are ignored.
  double departure_arclength = 1e-6;
  /// Speed below which the trajectory is considered captured by an equilibrium.
  double stall_speed = 1e-12;
  /// Target |offset| of the refined crossing from the section line.
  double offset_tol = 1e-13;
};

/// First same-direction crossing of the section after leaving the start.
/// With integrator.backward the orbit is followed in reversed time, so the
/// result is the inverse return map.
/// `path`, when given, receives the dense steps up to the crossing; the last
/// one extends past it, so clamp evaluations at Crossing::time.
Crossing next_crossing(const PlanarField& field, const Section& section, Vec2 start,
                       double max_time, const CrossingOptions& opt = {},
                       std::vector<DenseStep<2>>* path = nullptr);

}  // namespace fhn
