#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "fhn/geometry.hpp"
#include "fhn/vectorfield.hpp"

namespace fhn {

enum class EquilibriumKind {
  stable_node,
  unstable_node,
  stable_focus,
  unstable_focus,
  center_candidate,  ///< purely imaginary spectrum: center or weak focus
  saddle,
  saddle_node,
  degenerate,
};

/// O is the origin, S a saddle, A an antisaddle off the origin.
enum class EquilibriumLabel { O, S, A, other };

std::string_view to_string(EquilibriumKind k) noexcept;
std::string_view to_string(EquilibriumLabel l) noexcept;

bool is_antisaddle(EquilibriumKind k) noexcept;

struct Equilibrium {
  Vec2 location;
  Mat2 jacobian;
  std::array<std::complex<double>, 2> eigenvalues;
  EquilibriumKind kind = EquilibriumKind::degenerate;
  int index = 0;
  EquilibriumLabel label = EquilibriumLabel::other;
};

/// Classification thresholds.
inline constexpr double kDetTolerance = 1e-10;
inline constexpr double kCenterTolerance = 1e-8;

Equilibrium classify(const PlanarField& field, Vec2 location);

/// All finite equilibria, origin first, then ascending x. Off-origin points
/// solve c x^2 - b x + K = 0 on y = x / delta, with
/// K = -(gamma*delta - 1)/delta - gamma + a; for delta = 0 only the origin
/// remains. Locations are Newton polished so |P|, |Q| <= 1e-9.
std::vector<Equilibrium> finite_equilibria(const PlanarField& field);
std::vector<Equilibrium> finite_equilibria(const FhnParams& params);

/// Newton polish of an equilibrium guess; empty when it does not converge to
/// a point with |P|, |Q| <= 1e-9.
std::optional<Vec2> polish_equilibrium(const PlanarField& field, Vec2 guess);

/// First equilibrium with the given label, if any.
std::optional<Equilibrium> find_labeled(const std::vector<Equilibrium>& eqs,
                                        EquilibriumLabel label);

struct Circle {
  Vec2 center;
  double radius = 1.0;
};

/// Closed polygon, vertices in counterclockwise order.
struct Polygon {
  std::vector<Vec2> vertices;
};

using ClosedCurve = std::variant<Circle, Polygon>;

/// Winding number of (P, Q) along the curve traversed counterclockwise,
/// from summed angle increments. Intervals whose increment reaches pi/2 are
/// bisected. Throws numerical_error when the field vanishes on the curve or
/// the resolution cannot be reached.
int poincare_index(const PlanarField& field, const ClosedCurve& curve, int n_samples = 256);

enum class InfiniteChart { u_chart, v_chart };
enum class InfiniteKind { simple_node, triple_saddle, other };

struct InfiniteSingularity {
  InfiniteChart chart = InfiniteChart::u_chart;
  double location = 0.0;
  InfiniteKind kind = InfiniteKind::other;
  int multiplicity_of_root = 0;
};

struct InfiniteAnalysis {
  std::vector<InfiniteSingularity> points;
  /// Cubic term absent: the chart analysis below does not apply.
  bool degraded = false;
};

/// Singular points at infinity from the top-degree homogeneous parts of the
/// field, in the charts u = y/x and v = x/y.
InfiniteAnalysis infinite_singularities(const FhnParams& params);

struct IndexBalance {
  int nodes = 0;
  int foci = 0;
  int centers = 0;
  int saddles = 0;
  int infinite_nodes = 0;
  int infinite_saddles = 0;
  /// False when a non-simple finite equilibrium or a missing cubic term makes
  /// the count meaningless.
  bool applicable = true;
  bool holds = false;
};

/// Counts singular points and checks N + N_f + N_c + N' = C + C' + 1.
IndexBalance index_balance(const FhnParams& params);

struct HopfScan {
  std::vector<double> critical_values;
  /// The tracked equilibrium disappeared or lost det J > 0 inside the interval.
  bool collided = false;
  std::optional<double> collision_at;
};

/// Parameter values in `interval` where trace J of the labeled equilibrium
/// changes sign while det J > 0, bisected to 1e-10 relative width.
HopfScan hopf_scan(const PlanarField& field, Param which, Interval interval,
                   EquilibriumLabel which_equilibrium, int n_samples = 200);

}  // namespace fhn
