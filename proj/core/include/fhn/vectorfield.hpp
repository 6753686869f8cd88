#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fhn/geometry.hpp"

namespace fhn {

enum class Param { a, b, c, gamma, delta };

std::string_view to_string(Param p) noexcept;
std::optional<Param> parse_param(std::string_view name) noexcept;

/// Coefficients of the canonical FitzHugh-Nagumo system
///
///   x' = (gamma*delta - 1) y + (gamma - a) x + b x^2 - c x^3
///   y' = x - delta y
struct FhnParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double gamma = 0.0;
  double delta = 0.0;

  double get(Param p) const noexcept;
  void set(Param p, double v) noexcept;
  FhnParams with(Param p, double v) const noexcept {
    FhnParams q = *this;
    q.set(p, v);
    return q;
  }
  bool finite() const noexcept;

  /// gamma*delta - 1, the coefficient of y in x'.
  double coupling() const noexcept { return gamma * delta - 1.0; }
  /// gamma - a, the linear self-excitation of x.
  double excitation() const noexcept { return gamma - a; }

  friend bool operator==(const FhnParams&, const FhnParams&) = default;
};

/// Which coefficients are switched on. The reduced stages are the nested
/// systems obtained by zeroing parameters and then re-inserting them one at a
/// time: b only, then gamma, then a, then c (all with delta = 0), then delta.
enum class Stage {
  full,                  ///< all five parameters
  reversible_quadratic,  ///< x' = -y + b x^2, y' = x (a center)
  rotated_quadratic,     ///< adds gamma
  hopf_quadratic,        ///< adds a; Hopf at a = gamma
  cubic_lienard,         ///< adds c; delta still zero
};

std::string_view to_string(Stage s) noexcept;
std::optional<Stage> parse_stage(std::string_view name) noexcept;

struct FieldSample {
  Vec2 f;
  Mat2 jacobian;
  double divergence = 0.0;
};

class PlanarField {
 public:
  explicit PlanarField(const FhnParams& params, Stage stage = Stage::full);

  const FhnParams& params() const noexcept { return params_; }
  /// Parameters with inactive entries forced to zero.
  const FhnParams& effective() const noexcept { return eff_; }
  Stage stage() const noexcept { return stage_; }
  bool is_active(Param p) const noexcept;

  /// Hot-path evaluation, no input validation.
  Vec2 velocity(Vec2 p) const noexcept {
    const double x = p.x, x2 = x * x;
    return {ky_ * p.y + kx_ * x + eff_.b * x2 - eff_.c * x2 * x, x - eff_.delta * p.y};
  }
  double divergence(Vec2 p) const noexcept {
    return kx_ + 2.0 * eff_.b * p.x - 3.0 * eff_.c * p.x * p.x - eff_.delta;
  }
  Mat2 jacobian(Vec2 p) const noexcept {
    return {kx_ + 2.0 * eff_.b * p.x - 3.0 * eff_.c * p.x * p.x, ky_, 1.0, -eff_.delta};
  }

  /// Field, closed-form Jacobian and divergence. Throws std::domain_error on
  /// non-finite input.
  FieldSample eval(Vec2 p) const;

  /// Partial derivative of (P, Q) with respect to a parameter; zero when the
  /// parameter is inactive in this stage.
  Vec2 param_partial(Param which, Vec2 p) const noexcept;

  /// Same stage, one parameter replaced.
  PlanarField with(Param which, double value) const {
    return PlanarField(params_.with(which, value), stage_);
  }

 private:
  FhnParams params_;
  FhnParams eff_;
  Stage stage_;
  double ky_ = 0.0;  // gamma*delta - 1 on effective values
  double kx_ = 0.0;  // gamma - a on effective values
};

/// Determinant P * dQ/dmu - Q * dP/dmu of a field rotation parameter.
///
/// For gamma the field is read in the split form x' = R(x, y) + gamma Q(x, y)
/// with R = -y - a x + b x^2 - c x^3, so dP/dgamma is taken as Q and the
/// result is -Q^2. On the canonical polynomial itself dP/dgamma = x + delta y;
/// the two agree only when delta = 0 (see rotation_determinant_exact).
///
/// gamma is accepted only for the full stage; a and c only for fields whose
/// effective delta vanishes. Other pairings throw usage_error.
double rotation_determinant(const PlanarField& field, Param which, Vec2 p);

/// Same determinant built from the field's own parameter partial. For gamma
/// this is -(x - delta y)(x + delta y), which changes sign when delta != 0.
double rotation_determinant_exact(const PlanarField& field, Param which, Vec2 p);

struct Nullclines {
  /// Curves where x' = 0. One curve y(x) normally; vertical lines x = root
  /// when the y coefficient of x' vanishes.
  std::vector<std::vector<Vec2>> v_curves;
  /// Curves where y' = 0: the line y = x/delta, or x = 0 when delta = 0.
  std::vector<std::vector<Vec2>> w_curves;
  /// Set when gamma*delta = 1, so x' does not depend on y.
  bool degenerate = false;
};

Nullclines nullclines(const PlanarField& field, Interval x_range, int n,
                      std::optional<Interval> y_range = std::nullopt);

}  // namespace fhn
