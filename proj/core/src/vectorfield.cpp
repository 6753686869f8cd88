#include "fhn/vectorfield.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "fhn/errors.hpp"
#include "fhn/polynomial.hpp"

namespace fhn {

namespace {

constexpr std::array<std::pair<Param, std::string_view>, 5> kParamNames{{
    {Param::a, "a"},
    {Param::b, "b"},
    {Param::c, "c"},
    {Param::gamma, "gamma"},
    {Param::delta, "delta"},
}};

constexpr std::array<std::pair<Stage, std::string_view>, 5> kStageNames{{
    {Stage::full, "full"},
    {Stage::reversible_quadratic, "reversible_quadratic"},
    {Stage::rotated_quadratic, "rotated_quadratic"},
    {Stage::hopf_quadratic, "hopf_quadratic"},
    {Stage::cubic_lienard, "cubic_lienard"},
}};

// Active-parameter mask per stage, in Param order a, b, c, gamma, delta.
constexpr std::array<bool, 5> stage_mask(Stage s) noexcept {
  switch (s) {
    case Stage::full: return {true, true, true, true, true};
    case Stage::reversible_quadratic: return {false, true, false, false, false};
    case Stage::rotated_quadratic: return {false, true, false, true, false};
    case Stage::hopf_quadratic: return {true, true, false, true, false};
    case Stage::cubic_lienard: return {true, true, true, true, false};
  }
  return {};
}

}  // namespace

std::string_view to_string(Param p) noexcept {
  for (const auto& [k, v] : kParamNames)
    if (k == p) return v;
  return "?";
}

std::optional<Param> parse_param(std::string_view name) noexcept {
  for (const auto& [k, v] : kParamNames)
    if (v == name) return k;
  return std::nullopt;
}

std::string_view to_string(Stage s) noexcept {
  for (const auto& [k, v] : kStageNames)
    if (k == s) return v;
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) noexcept {
  for (const auto& [k, v] : kStageNames)
    if (v == name) return k;
  return std::nullopt;
}

double FhnParams::get(Param p) const noexcept {
  switch (p) {
    case Param::a: return a;
    case Param::b: return b;
    case Param::c: return c;
    case Param::gamma: return gamma;
    case Param::delta: return delta;
  }
  return 0.0;
}

void FhnParams::set(Param p, double v) noexcept {
  switch (p) {
    case Param::a: a = v; break;
    case Param::b: b = v; break;
    case Param::c: c = v; break;
    case Param::gamma: gamma = v; break;
    case Param::delta: delta = v; break;
  }
}

bool FhnParams::finite() const noexcept {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(gamma) &&
         std::isfinite(delta);
}

PlanarField::PlanarField(const FhnParams& params, Stage stage) : params_(params), stage_(stage) {
  if (!params.finite()) throw std::domain_error("FhnParams must be finite");
  const auto mask = stage_mask(stage);
  const std::array<Param, 5> order{Param::a, Param::b, Param::c, Param::gamma, Param::delta};
  for (std::size_t i = 0; i < order.size(); ++i)
    eff_.set(order[i], mask[i] ? params.get(order[i]) : 0.0);
  ky_ = eff_.coupling();
  kx_ = eff_.excitation();
}

bool PlanarField::is_active(Param p) const noexcept {
  return stage_mask(stage_)[static_cast<std::size_t>(p)];
}

FieldSample PlanarField::eval(Vec2 p) const {
  if (!is_finite(p)) throw std::domain_error("PlanarField::eval: non-finite point");
  FieldSample s;
  s.f = velocity(p);
  s.jacobian = jacobian(p);
  s.divergence = s.jacobian.trace();
  return s;
}

Vec2 PlanarField::param_partial(Param which, Vec2 p) const noexcept {
  if (!is_active(which)) return {};
  const double x = p.x, y = p.y;
  switch (which) {
    case Param::a: return {-x, 0.0};
    case Param::b: return {x * x, 0.0};
    case Param::c: return {-x * x * x, 0.0};
    case Param::gamma: return {eff_.delta * y + x, 0.0};
    case Param::delta: return {eff_.gamma * y, -y};
  }
  return {};
}

namespace {

void check_rotation_pairing(const PlanarField& field, Param which) {
  switch (which) {
    case Param::gamma:
      if (field.stage() != Stage::full)
        throw usage_error("rotation_determinant: gamma requires the full stage");
      return;
    case Param::a:
    case Param::c:
      if (field.effective().delta != 0.0)
        throw usage_error("rotation_determinant: a and c require delta = 0");
      if (!field.is_active(which))
        throw usage_error("rotation_determinant: parameter inactive in this stage");
      return;
    default:
      throw usage_error("rotation_determinant: only gamma, a and c are rotation parameters");
  }
}

}  // namespace

double rotation_determinant(const PlanarField& field, Param which, Vec2 p) {
  check_rotation_pairing(field, which);
  const Vec2 f = field.velocity(p);
  // gamma enters through the split P = R + gamma Q, so its direction is (Q, 0).
  const Vec2 fm = which == Param::gamma ? Vec2{f.y, 0.0} : field.param_partial(which, p);
  return f.x * fm.y - f.y * fm.x;
}

double rotation_determinant_exact(const PlanarField& field, Param which, Vec2 p) {
  check_rotation_pairing(field, which);
  const Vec2 f = field.velocity(p);
  const Vec2 fm = field.param_partial(which, p);
  return f.x * fm.y - f.y * fm.x;
}

Nullclines nullclines(const PlanarField& field, Interval x_range, int n,
                      std::optional<Interval> y_range) {
  if (n < 2) throw usage_error("nullclines: need at least two samples");
  const Interval yr = y_range.value_or(x_range);
  const FhnParams& e = field.effective();
  const double ky = e.coupling(), kx = e.excitation();
  auto lerp = [n](Interval r, int i) { return r.lo + (r.hi - r.lo) * i / (n - 1); };

  Nullclines out;
  if (std::abs(ky) <= 1e-14) {
    // x' = x (kx + b x - c x^2) no longer involves y.
    out.degenerate = true;
    for (double root : real_roots_cubic(-e.c, e.b, kx, 0.0)) {
      if (!x_range.contains(root)) continue;
      std::vector<Vec2> line;
      for (int i = 0; i < n; ++i) line.push_back({root, lerp(yr, i)});
      out.v_curves.push_back(std::move(line));
    }
  } else {
    std::vector<Vec2> curve;
    for (int i = 0; i < n; ++i) {
      const double x = lerp(x_range, i);
      curve.push_back({x, -(kx * x + e.b * x * x - e.c * x * x * x) / ky});
    }
    out.v_curves.push_back(std::move(curve));
  }

  std::vector<Vec2> w;
  if (e.delta == 0.0) {
    for (int i = 0; i < n; ++i) w.push_back({0.0, lerp(yr, i)});
  } else {
    for (int i = 0; i < n; ++i) {
      const double x = lerp(x_range, i);
      w.push_back({x, x / e.delta});
    }
  }
  out.w_curves.push_back(std::move(w));
  return out;
}

}  // namespace fhn
