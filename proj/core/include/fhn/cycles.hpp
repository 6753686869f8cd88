#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "fhn/odeint.hpp"
#include "fhn/vectorfield.hpp"

namespace fhn {

struct CycleOptions {
  CrossingOptions crossing{};
  /// Longest single return considered, in time units.
  double max_return_time = 500.0;
  /// Target |d| of a refined root.
  double root_tol = 1e-10;
  /// Non-crossing local minima of |d| below this are reported as grazes.
  double graze_tol = 1e-6;
  /// |d| below this everywhere on the scan means a period annulus.
  double continuum_tol = 1e-7;
  /// |d_s| below this makes a cycle a semi-stable candidate.
  double semi_stable_tol = 1e-6;
  /// Scan points spaced geometrically instead of uniformly.
  bool geometric_scan = false;
};

struct DisplacementSample {
  double s = 0.0;
  double h = 0.0;
  double d = 0.0;
  bool returned = false;
  ReturnStatus status = ReturnStatus::timed_out;
  double return_time = 0.0;
  double divergence_integral = 0.0;
  /// d_s from the area-scaling identity; valid off cycles too.
  double slope = 0.0;
  Vec2 return_point;
};

/// d(s) = h(s) - s for the first return of the orbit through section.point(s).
/// A missing return is reported in the sample, not thrown.
DisplacementSample displacement(const PlanarField& field, const Section& section, double s,
                                const CycleOptions& opt = {});

enum class CycleStability { stable, unstable, semi_stable_candidate };
std::string_view to_string(CycleStability s) noexcept;

struct LimitCycle {
  FhnParams params;
  Stage stage = Stage::full;
  Section section;
  double s0 = 0.0;
  double period = 0.0;
  /// Dense steps covering [0, period]; the last one may extend past it.
  std::vector<DenseStep<2>> orbit;
  /// The orbit was integrated in reversed time, so its step times run
  /// backwards along the cycle. at() and polyline() hide this.
  bool reversed = false;
  /// +1 counterclockwise, -1 clockwise (sign of the enclosed area).
  int orientation = 1;
  double multiplier_ds = 0.0;
  CycleStability stability = CycleStability::stable;
  /// Largest distance of the orbit from the section anchor.
  double amplitude = 0.0;

  PlanarField field() const { return PlanarField(params, stage); }
  Vec2 at(double t) const;
  /// n points evenly spaced in time, first point repeated at the end.
  std::vector<Vec2> polyline(int n) const;
};

/// Integrates one revolution from section.point(s0) and records the cycle
/// quantities, in reversed time when opt.crossing.integrator.backward is set
/// (the quantities still refer to the forward flow). Throws numerical_error
/// when the orbit does not return.
LimitCycle complete_cycle(const PlanarField& field, const Section& section, double s0,
                          const CycleOptions& opt = {});

struct GrazeCandidate {
  double s = 0.0;
  double d = 0.0;
};

struct CycleSearch {
  std::vector<LimitCycle> cycles;  ///< ascending s0
  std::vector<GrazeCandidate> grazes;
  /// d vanishes over the whole scan: a period annulus rather than isolated cycles.
  bool continuum = false;
  std::vector<DisplacementSample> samples;
};

/// Scans d on [s_min, s_max], refines sign changes and completes each root.
CycleSearch find_cycles(const PlanarField& field, const Section& section, double s_min,
                        double s_max, int n_scan, const CycleOptions& opt = {});

/// exp of the divergence integrated around the orbit, minus one. The integral
/// uses Gauss-Legendre quadrature on the dense output.
double cycle_multiplier(const LimitCycle& cycle);

/// Derivative of d with respect to a parameter at the cycle, in the cycle's
/// section coordinate. Built from the weighted integral of f ^ f_mu along the
/// orbit; zero for parameters inactive in the stage.
double parameter_sensitivity(const LimitCycle& cycle, Param which);

/// Same, for every parameter in Param order.
std::array<double, 5> parameter_sensitivities(const LimitCycle& cycle);

enum class Multiplicity { simple, double_fold, at_least_three, inconclusive };
std::string_view to_string(Multiplicity m) noexcept;

struct MultiplicityEstimate {
  Multiplicity m = Multiplicity::inconclusive;
  double d = 0.0;
  double ds = 0.0;
  double dss = 0.0;
  /// Richardson error estimate of dss.
  double dss_error = 0.0;
};

/// Order of the first nonvanishing derivative of d at s0. d_ss comes from
/// extrapolated central differences of the analytic d_s.
MultiplicityEstimate multiplicity(const PlanarField& field, const Section& section, double s0,
                                  double tol, const CycleOptions& opt = {});

/// Winding number of a closed polyline around a point.
int winding_number(const std::vector<Vec2>& loop, Vec2 p);

/// Signed area of a closed polyline (positive when counterclockwise).
double signed_area(const std::vector<Vec2>& loop);

}  // namespace fhn
