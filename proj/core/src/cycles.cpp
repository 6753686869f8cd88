#include "fhn/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

// Five-point Gauss-Legendre rule on [0, 1].
constexpr std::array<double, 5> kGaussNodes{
    0.046910077030668004, 0.23076534494715845, 0.5, 0.76923465505284155, 0.95308992296933200};
constexpr std::array<double, 5> kGaussWeights{
    0.11846344252809454, 0.23931433524968324, 0.28444444444444444, 0.23931433524968324,
    0.11846344252809454};

Vec2 dense_point(const DenseStep<2>& step, double t) {
  const auto y = step.at(t);
  return {y[0], y[1]};
}

double slope_from_identity(const PlanarField& field, const Section& section, Vec2 start,
                           Vec2 end, double divergence_integral) {
  const double num = wedge(section.direction, field.velocity(start));
  const double den = wedge(section.direction, field.velocity(end));
  return std::exp(divergence_integral) * num / den - 1.0;
}

template <class F>
double integrate_step(const DenseStep<2>& step, double a, double b, F&& g) {
  double sum = 0.0;
  for (std::size_t i = 0; i < 5; ++i) sum += kGaussWeights[i] * g(dense_point(step, a + (b - a) * kGaussNodes[i]));
  return sum * (b - a);
}

}  // namespace

std::string_view to_string(CycleStability s) noexcept {
  switch (s) {
    case CycleStability::stable: return "stable";
    case CycleStability::unstable: return "unstable";
    case CycleStability::semi_stable_candidate: return "semi_stable_candidate";
  }
  return "?";
}

std::string_view to_string(Multiplicity m) noexcept {
  switch (m) {
    case Multiplicity::simple: return "simple";
    case Multiplicity::double_fold: return "double";
    case Multiplicity::at_least_three: return "at_least_three";
    case Multiplicity::inconclusive: return "inconclusive";
  }
  return "?";
}

DisplacementSample displacement(const PlanarField& field, const Section& section, double s,
                                const CycleOptions& opt) {
  DisplacementSample out;
  out.s = s;
  const Vec2 start = section.point(s);
  Crossing c;
  try {
    c = next_crossing(field, section, start, opt.max_return_time, opt.crossing);
  } catch (const numerical_error&) {
    out.status = ReturnStatus::underflow;
    return out;
  }
  out.status = c.status;
  out.return_point = c.point;
  if (!c.returned()) return out;
  out.returned = true;
  out.h = c.s;
  out.d = out.h - s;
  out.return_time = c.time;
  out.divergence_integral = c.divergence_integral;
  out.slope = slope_from_identity(field, section, start, c.point, c.divergence_integral);
  return out;
}

Vec2 LimitCycle::at(double t) const {
  if (orbit.empty()) return section.point(s0);
  t = std::clamp(t, 0.0, period);
  if (reversed) t = period - t;
  auto it = std::upper_bound(orbit.begin(), orbit.end(), t,
                             [](double v, const DenseStep<2>& d) { return v < d.t0; });
  if (it != orbit.begin()) --it;
  return dense_point(*it, t);
}

std::vector<Vec2> LimitCycle::polyline(int n) const {
  std::vector<Vec2> pts;
  pts.reserve(n + 1);
  for (int i = 0; i < n; ++i) pts.push_back(at(period * i / n));
  pts.push_back(pts.front());
  return pts;
}

double signed_area(const std::vector<Vec2>& loop) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < loop.size(); ++i) a += wedge(loop[i], loop[i + 1]);
  if (!loop.empty()) a += wedge(loop.back(), loop.front());
  return 0.5 * a;
}

int winding_number(const std::vector<Vec2>& loop, Vec2 p) {
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2 u = loop[i] - p, v = loop[(i + 1) % loop.size()] - p;
    total += std::atan2(wedge(u, v), dot(u, v));
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

double cycle_multiplier(const LimitCycle& cycle) {
  const PlanarField field = cycle.field();
  double total = 0.0;
  for (const auto& step : cycle.orbit) {
    const double a = step.t0, b = std::min(step.t1(), cycle.period);
    if (b <= a) break;
    total += integrate_step(step, a, b, [&](Vec2 p) { return field.divergence(p); });
  }
  return std::expm1(total);
}

std::array<double, 5> parameter_sensitivities(const LimitCycle& cycle) {
  const PlanarField field = cycle.field();
  constexpr std::array<Param, 5> all{Param::a, Param::b, Param::c, Param::gamma, Param::delta};
  std::array<bool, 5> active{};
  for (std::size_t k = 0; k < 5; ++k) active[k] = field.is_active(all[k]);

  // I_mu = int exp(-D(t)) (f_mu ^ f) dt with D the running divergence integral.
  // On a reversed orbit D(t) = D(T) - running, which folds exp(D(T)) into
  // the weight.
  const double wsign = cycle.reversed ? 1.0 : -1.0;
  std::array<double, 5> weighted{};
  double running = 0.0;
  for (const auto& step : cycle.orbit) {
    const double a = step.t0, b = std::min(step.t1(), cycle.period);
    if (b <= a) break;
    for (std::size_t j = 0; j < 5; ++j) {
      const double tau = a + (b - a) * kGaussNodes[j];
      const double inner =
          integrate_step(step, a, tau, [&](Vec2 p) { return field.divergence(p); });
      const Vec2 p = dense_point(step, tau);
      const Vec2 f = field.velocity(p);
      const double w = kGaussWeights[j] * (b - a) * std::exp(wsign * (running + inner));
      for (std::size_t k = 0; k < 5; ++k)
        if (active[k]) weighted[k] += w * wedge(field.param_partial(all[k], p), f);
    }
    running += integrate_step(step, a, b, [&](Vec2 p) { return field.divergence(p); });
  }

  // Variation transported to the return: h_mu (e ^ f(end)) = exp(D(T)) I_mu.
  const Vec2 end = cycle.at(cycle.period);
  const double scale = (cycle.reversed ? 1.0 : std::exp(running)) /
                       wedge(cycle.section.direction, field.velocity(end));
  std::array<double, 5> out{};
  for (std::size_t k = 0; k < 5; ++k) out[k] = active[k] ? scale * weighted[k] : 0.0;
  return out;
}

double parameter_sensitivity(const LimitCycle& cycle, Param which) {
  return parameter_sensitivities(cycle)[static_cast<std::size_t>(which)];
}

LimitCycle complete_cycle(const PlanarField& field, const Section& section, double s0,
                          const CycleOptions& opt) {
  LimitCycle cyc;
  cyc.params = field.params();
  cyc.stage = field.stage();
  cyc.section = section;
  cyc.s0 = s0;
  const Vec2 start = section.point(s0);
  const Crossing c =
      next_crossing(field, section, start, opt.max_return_time, opt.crossing, &cyc.orbit);
  if (!c.returned()) throw numerical_error("complete_cycle: orbit does not return to the section");
  cyc.period = c.time;

  // Orientation and amplitude from a fine polyline, the maximum then polished.
  std::vector<Vec2> pts;
  std::vector<double> ts;
  for (const auto& step : cyc.orbit) {
    if (step.t0 >= cyc.period) break;
    for (int k = 0; k < 8; ++k) {
      const double t = step.t0 + step.h * k / 8.0;
      if (t >= cyc.period) break;
      ts.push_back(t);
      pts.push_back(dense_point(step, t));
    }
  }
  cyc.orientation = signed_area(pts) >= 0.0 ? 1 : -1;

  auto radius = [&](double t) { return distance(cyc.at(t), section.anchor); };
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (distance(pts[i], section.anchor) > distance(pts[best], section.anchor)) best = i;
  double lo = best > 0 ? ts[best - 1] : 0.0;
  double hi = best + 1 < ts.size() ? ts[best + 1] : cyc.period;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double r1 = radius(x1), r2 = radius(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    if (r1 < r2) {
      lo = x1;
      x1 = x2;
      r1 = r2;
      x2 = lo + g * (hi - lo);
      r2 = radius(x2);
    } else {
      hi = x2;
      x2 = x1;
      r2 = r1;
      x1 = hi - g * (hi - lo);
      r1 = radius(x1);
    }
  }
  cyc.amplitude = std::max({r1, r2, distance(pts[best], section.anchor)});
  if (opt.crossing.integrator.backward) {
    cyc.reversed = true;
    cyc.orientation = -cyc.orientation;
  }

  cyc.multiplier_ds = cycle_multiplier(cyc);
  if (std::abs(cyc.multiplier_ds) < opt.semi_stable_tol) {
    cyc.stability = CycleStability::semi_stable_candidate;
  } else {
    cyc.stability = cyc.multiplier_ds < 0.0 ? CycleStability::stable : CycleStability::unstable;
  }
  return cyc;
}

namespace {

// Safeguarded Newton on d using the analytic slope; keeps a sign bracket.
std::optional<double> refine_root(const PlanarField& field, const Section& section,
                                  DisplacementSample lo, DisplacementSample hi,
                                  const CycleOptions& opt) {
  if (lo.d == 0.0) return lo.s;
  if (hi.d == 0.0) return hi.s;
  DisplacementSample best = std::abs(lo.d) < std::abs(hi.d) ? lo : hi;
  for (int it = 0; it < 100; ++it) {
    if (std::abs(best.d) <= opt.root_tol) return best.s;
    double next = best.s - best.d / best.slope;
    const double width = hi.s - lo.s;
    if (!std::isfinite(next) || next <= lo.s || next >= hi.s) next = 0.5 * (lo.s + hi.s);
    if (width <= 1e-15 * std::max(1.0, std::abs(next))) break;
    const DisplacementSample m = displacement(field, section, next, opt);
    if (!m.returned) return std::nullopt;
    if ((m.d < 0.0) == (lo.d < 0.0)) {
      lo = m;
    } else {
      hi = m;
    }
    // Fall back to bisection when Newton stalls on one side.
    if (std::abs(m.d) > 0.5 * std::abs(best.d)) {
      const double mid = 0.5 * (lo.s + hi.s);
      const DisplacementSample b = displacement(field, section, mid, opt);
      if (!b.returned) return std::nullopt;
      ((b.d < 0.0) == (lo.d < 0.0) ? lo : hi) = b;
      best = std::abs(b.d) < std::abs(m.d) ? b : m;
    } else {
      best = m;
    }
  }
  // A collapsed bracket with a large residual is a jump, not a root.
  if (std::abs(best.d) <= 1e-8) return best.s;
  return std::nullopt;
}

// Zero of the slope between two samples whose slopes differ in sign.
DisplacementSample slope_zero(const PlanarField& field, const Section& section,
                              DisplacementSample lo, DisplacementSample hi,
                              const CycleOptions& opt) {
  DisplacementSample mid = lo;
  for (int it = 0; it < 40 && hi.s - lo.s > 1e-10 * std::max(1.0, hi.s); ++it) {
    const double t = lo.slope / (lo.slope - hi.slope);
    double s = lo.s + std::clamp(t, 0.1, 0.9) * (hi.s - lo.s);
    mid = displacement(field, section, s, opt);
    if (!mid.returned) return mid;
    ((mid.slope < 0.0) == (lo.slope < 0.0) ? lo : hi) = mid;
  }
  return mid;
}

}  // namespace

CycleSearch find_cycles(const PlanarField& field, const Section& section, double s_min,
                        double s_max, int n_scan, const CycleOptions& opt) {
  if (!(s_min > 0.0) || !(s_max > s_min) || n_scan < 2)
    throw usage_error("find_cycles: need 0 < s_min < s_max and n_scan >= 2");
  CycleSearch out;
  out.samples.reserve(n_scan);
  for (int i = 0; i < n_scan; ++i) {
    const double u = double(i) / (n_scan - 1);
    const double s = opt.geometric_scan ? s_min * std::pow(s_max / s_min, u)
                                        : s_min + (s_max - s_min) * u;
    out.samples.push_back(displacement(field, section, s, opt));
  }
  const auto& sm = out.samples;

  int n_returned = 0;
  bool flat = true;
  for (const auto& x : sm) {
    if (!x.returned) continue;
    ++n_returned;
    if (std::abs(x.d) > opt.continuum_tol * std::max(1.0, x.s)) flat = false;
  }
  if (n_returned >= 3 && flat) {
    out.continuum = true;
    return out;
  }

  std::vector<std::pair<DisplacementSample, DisplacementSample>> brackets;
  for (int i = 0; i + 1 < n_scan; ++i) {
    const auto &l = sm[i], &r = sm[i + 1];
    if (!l.returned || !r.returned) continue;
    if (l.d == 0.0 || (l.d < 0.0) != (r.d < 0.0)) {
      brackets.emplace_back(l, r);
      continue;
    }
    // Tangential approach: |d| has an interior minimum and the slope turns.
    if (i == 0 || !sm[i - 1].returned) continue;
    const auto& p = sm[i - 1];
    if ((p.d < 0.0) != (l.d < 0.0)) continue;
    if (std::abs(l.d) > std::abs(p.d) || std::abs(l.d) > std::abs(r.d)) continue;
    if ((p.slope < 0.0) == (r.slope < 0.0)) continue;
    const DisplacementSample z = slope_zero(field, section, p, r, opt);
    if (!z.returned) continue;
    if ((z.d < 0.0) != (l.d < 0.0)) {
      brackets.emplace_back(p, z);
      brackets.emplace_back(z, r);
    } else if (std::abs(z.d) < opt.graze_tol) {
      out.grazes.push_back({z.s, z.d});
    }
  }
  std::sort(brackets.begin(), brackets.end(),
            [](const auto& l, const auto& r) { return l.first.s < r.first.s; });

  for (const auto& [l, r] : brackets) {
    const auto root = refine_root(field, section, l, r, opt);
    if (!root) continue;
    if (!out.cycles.empty() && std::abs(out.cycles.back().s0 - *root) <= 1e-9 * std::max(1.0, *root))
      continue;
    try {
      out.cycles.push_back(complete_cycle(field, section, *root, opt));
    } catch (const numerical_error&) {
    }
  }
  return out;
}

MultiplicityEstimate multiplicity(const PlanarField& field, const Section& section, double s0,
                                  double tol, const CycleOptions& opt) {
  MultiplicityEstimate est;
  const DisplacementSample c = displacement(field, section, s0, opt);
  if (!c.returned) return est;
  est.d = c.d;
  est.ds = c.slope;
  if (std::abs(est.ds) > tol) {
    est.m = Multiplicity::simple;
  }

  const double h = 0.02 * std::max(s0, 1e-3);
  auto central = [&](double step) -> std::optional<double> {
    const auto p = displacement(field, section, s0 + step, opt);
    const auto m = displacement(field, section, s0 - step, opt);
    if (!p.returned || !m.returned) return std::nullopt;
    return (p.slope - m.slope) / (2.0 * step);
  };
  const auto d1 = central(h), d2 = central(0.5 * h);
  if (!d1 || !d2) {
    est.m = Multiplicity::inconclusive;
    return est;
  }
  est.dss = (4.0 * *d2 - *d1) / 3.0;
  est.dss_error = std::abs(*d2 - *d1) / 3.0;
  if (est.m == Multiplicity::simple) return est;

  if (std::abs(est.dss) > tol) {
    est.m = est.dss_error < 0.5 * std::abs(est.dss) ? Multiplicity::double_fold
                                                    : Multiplicity::inconclusive;
    return est;
  }
  // Flat to second order: an isolated root still shows d away from s0,
  // a period annulus does not.
  const auto far_p = displacement(field, section, s0 * 1.1, opt);
  const auto far_m = displacement(field, section, s0 * 0.9, opt);
  const bool flat = far_p.returned && far_m.returned && std::abs(far_p.d) <= tol &&
                    std::abs(far_m.d) <= tol;
  est.m = flat || est.dss_error > tol ? Multiplicity::inconclusive : Multiplicity::at_least_three;
  return est;
}

}  // namespace fhn
