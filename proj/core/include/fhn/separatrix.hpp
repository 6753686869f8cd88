#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fhn/equilibria.hpp"
#include "fhn/odeint.hpp"

namespace fhn {

enum class BranchFate { captured, escaped, time_cap };
std::string_view to_string(BranchFate f) noexcept;

struct SeparatrixOptions {
  double time_cap = 500.0;
  double tol = 1e-12;
  /// Capture disks have this radius relative to the distance from their
  /// equilibrium to the nearest other one.
  double capture_fraction = 1e-3;
  double escape_radius = 1e3;
};

/// One separatrix. Unstable branches run forward in time, stable ones
/// backward; `path` times are elapsed time in that direction.
struct SeparatrixBranch {
  bool unstable = true;
  int side = 1;
  Vec2 launch;
  std::vector<DenseStep<2>> path;
  double duration = 0.0;
  BranchFate fate = BranchFate::time_cap;
  /// On the capture circle, on the escape circle, or the point at the time cap.
  Vec2 end;
  /// Index into SeparatrixBranchSet::equilibria when captured.
  std::optional<std::size_t> captured_by;

  Vec2 at(double t) const;
};

struct SeparatrixBranchSet {
  Equilibrium saddle;
  std::vector<Equilibrium> equilibria;
  double lambda_unstable = 0.0;
  double lambda_stable = 0.0;
  /// Unit eigenvectors, oriented with a positive x component (positive y on ties).
  Vec2 unstable_vector;
  Vec2 stable_vector;
  double residual_unstable = 0.0;  ///< |J v - lambda v|
  double residual_stable = 0.0;
  SeparatrixBranch unstable_plus, unstable_minus, stable_plus, stable_minus;
};

/// Launches the four separatrices of a saddle at distance `offset` along its
/// eigenvectors and follows each until it enters a capture disk of an
/// attractor (a repeller for stable branches), leaves the escape radius, or
/// reaches the time cap. usage_error for a non-saddle or an offset outside
/// [1e-8, 1e-5].
SeparatrixBranchSet separatrices(const PlanarField& field, const Equilibrium& saddle,
                                 double offset, const SeparatrixOptions& opt = {});

enum class LoopKind { small_O, small_A, big, eight_loop, none };
std::string_view to_string(LoopKind k) noexcept;

struct SplittingSample {
  double gamma = 0.0;
  /// Signed distance of the unstable branch from the stable one on the
  /// transversal; NaN when the unstable branch misses the segment.
  double value = 0.0;
  bool defined = false;
};

struct LoopDetection {
  LoopKind kind = LoopKind::none;
  /// Endpoints have opposite splitting signs.
  Interval gamma_bracket{};
  std::vector<SplittingSample> splitting;  ///< ascending gamma
  int unstable_side = 0;
  int stable_side = 0;
  /// Partner bracket of an eight loop.
  std::optional<Interval> second_bracket;
  std::string diagnostic;
};

struct HomoclinicOptions {
  SeparatrixOptions separatrix{};
  double offset = 1e-7;
  int n_samples = 41;
  double bracket_width = 1e-8;
  /// Two small-loop brackets closer than this form an eight loop.
  double eight_tolerance = 1e-6;
  /// Saddle neighbourhood, relative to the equilibrium separation, outside
  /// which the transversal is placed.
  double transversal_fraction = 0.1;
  int max_resample_depth = 4;
};

/// Every separatrix loop of the saddle S found in gamma_range: the fate of
/// each unstable branch is sampled, fate changes are narrowed, and the sign
/// change of the splitting function inside is bisected. usage_error when S
/// does not exist across the range.
std::vector<LoopDetection> find_loops(const FhnParams& params, Interval gamma_range,
                                      const HomoclinicOptions& opt = {});

/// The loop of the requested kind, or kind none with the sampled splitting
/// trace attached.
LoopDetection find_homoclinic(const FhnParams& params, Interval gamma_range, LoopKind target,
                              const HomoclinicOptions& opt = {});

/// Eight loop out of a small loop around O and one around A whose brackets
/// lie within `tolerance` of each other; nullopt otherwise.
std::optional<LoopDetection> combine_eight_loop(const LoopDetection& around_o,
                                                const LoopDetection& around_a,
                                                double tolerance);

}  // namespace fhn
