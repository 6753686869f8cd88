#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fhn/cycles.hpp"

namespace fhn {

enum class BranchEventKind {
  fold,
  amplitude_to_zero,
  period_blowup,
  escaped,
  open_edge_of_scan,
  truncated,  ///< corrector gave up; see Branch::diagnostic
};
std::string_view to_string(BranchEventKind k) noexcept;

struct BranchPoint {
  double mu = 0.0;
  double s0 = 0.0;
  double period = 0.0;
  double amplitude = 0.0;
  double multiplier = 0.0;
  /// d_mu for every parameter, in Param order.
  std::array<double, 5> sensitivities{};
  /// Closest approach of the orbit to a saddle (infinity when there is none).
  double saddle_gap = 0.0;
  Vec2 anchor;
};

struct FoldPoint {
  double s = 0.0;
  double mu = 0.0;
  double d = 0.0;
  double ds = 0.0;
  double dss = 0.0;
  bool converged = false;
};

struct BranchEvent {
  BranchEventKind kind = BranchEventKind::fold;
  double mu = 0.0;
  double s0 = 0.0;
  /// Index of the first branch point after the event.
  std::size_t at_point = 0;
  std::optional<FoldPoint> fold;
};

struct Branch {
  Param param = Param::gamma;
  std::vector<BranchPoint> points;
  std::vector<BranchEvent> events;
  BranchEventKind termination = BranchEventKind::open_edge_of_scan;
  /// The branch came back close to its start (a closed family cannot be
  /// told apart from a long open one, so this is only a flag).
  bool possible_cyclic = false;
  std::string diagnostic;
};

struct ContinuationOptions {
  CycleOptions cycle{};
  double step_init = 0.01;
  double step_min = 1e-7;
  double step_max = 0.05;
  int max_points = 400;
  int max_corrector_iterations = 10;
  /// |G| target of the corrector.
  double corrector_tol = 1e-10;
  /// Relative step of the finite difference in the continuation parameter.
  double fd_step = 1e-6;
  /// +1 continues towards increasing parameter, -1 towards decreasing.
  int direction = 1;
  double period_cap = 500.0;
  /// Orbit passing closer than this to a saddle counts as a separatrix approach.
  double saddle_proximity = 1e-3;
  double escape_amplitude = 1e4;
  /// Section coordinate below which an equilibrium-anchored branch is
  /// declared to shrink onto its equilibrium.
  double s_floor = 2e-3;
};

/// Pseudo-arclength continuation of a cycle in one parameter, in the unknowns
/// (s, mu). Sections anchored at an equilibrium follow the equilibrium and
/// work on d/s, which removes the trivial root at s = 0.
Branch continue_branch(const LimitCycle& start, Param which, Interval range,
                       const ContinuationOptions& opt = {});

/// Newton on {d = 0, d_s = 0} in (s, mu).
FoldPoint solve_fold(const PlanarField& field, const Section& section, Param which, double s_guess,
                     double mu_guess, const CycleOptions& opt = {});

struct FoldSurfaceSample {
  double p1 = 0.0;  ///< first grid parameter (a by default)
  double p2 = 0.0;  ///< second grid parameter (c by default)
  double mu = 0.0;  ///< fold parameter (gamma by default)
  double s0 = 0.0;
  double residual_d = 0.0;
  double residual_ds = 0.0;
  bool present = false;
};

struct FoldSurfaceGrid {
  Param p1 = Param::a;
  Interval range1{};
  int n1 = 5;
  Param p2 = Param::c;
  Interval range2{};
  int n2 = 5;
  Param fold_param = Param::gamma;
};

struct FoldSurface {
  std::vector<FoldSurfaceSample> samples;  ///< row-major over (p1, p2)
  std::string diagnostic;
};

/// Grid-wise Newton for the fold set, spreading out from the grid node
/// nearest the seed and warm-starting each node from a solved neighbour.
FoldSurface trace_fold_surface(const PlanarField& base, const Section& section,
                               const FoldPoint& seed, const FoldSurfaceGrid& grid,
                               const CycleOptions& opt = {});

struct CuspBox {
  Interval a{0.0, 1.0};
  Interval c{0.01, 1.0};
  Interval gamma{0.0, 1.0};
};

struct CuspCandidate {
  double s = 0.0;
  FhnParams params;
  std::array<double, 3> residuals{};  ///< |d|, |d_s|, |d_ss|
  bool reproduced = false;
};

struct CuspSearchOptions {
  CycleOptions cycle{};
  int multistarts = 200;
  std::uint64_t seed = 1;
  /// Scan used to seed Newton from cycles present at each start.
  double s_min = 0.02;
  double s_max = 3.0;
  int n_scan = 16;
  /// Newton iterates with s below this are abandoned (the cycle is shrinking
  /// into a degenerate Hopf point, not a triple cycle).
  double s_floor = 0.02;
  int max_iterations = 12;
  double accept_tol = 1e-8;
};

struct CuspSearch {
  std::vector<CuspCandidate> candidates;
  int starts_with_cycles = 0;
  int newton_runs = 0;
};

/// Multistart Newton on {d, d_s, d_ss} = 0 in (s, a, gamma) with c fixed per
/// start. Sections are rays from the origin along `direction`.
CuspSearch search_cusp(const FhnParams& base, const CuspBox& box, Vec2 direction,
                       const CuspSearchOptions& opt = {});

enum class TerminationKind { singular_point, separatrix_cycle, unbounded, open, truncated };
std::string_view to_string(TerminationKind k) noexcept;

struct TerminationReport {
  TerminationKind kind = TerminationKind::open;
  bool possible_cyclic = false;
  /// A homoclinic bracket was supplied and contains the branch end within 1e-3.
  bool confirmed_by_separatrix = false;
  double end_mu = 0.0;
};

TerminationReport classify_termination(const Branch& branch,
                                       std::optional<Interval> homoclinic_bracket = std::nullopt);

}  // namespace fhn
