#include "fhn/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fhn/errors.hpp"
#include "fhn/polynomial.hpp"

namespace fhn {

std::string_view to_string(EquilibriumKind k) noexcept {
  switch (k) {
    case EquilibriumKind::stable_node: return "stable_node";
    case EquilibriumKind::unstable_node: return "unstable_node";
    case EquilibriumKind::stable_focus: return "stable_focus";
    case EquilibriumKind::unstable_focus: return "unstable_focus";
    case EquilibriumKind::center_candidate: return "center_candidate";
    case EquilibriumKind::saddle: return "saddle";
    case EquilibriumKind::saddle_node: return "saddle_node";
    case EquilibriumKind::degenerate: return "degenerate";
  }
  return "?";
}

std::string_view to_string(EquilibriumLabel l) noexcept {
  switch (l) {
    case EquilibriumLabel::O: return "O";
    case EquilibriumLabel::S: return "S";
    case EquilibriumLabel::A: return "A";
    case EquilibriumLabel::other: return "other";
  }
  return "?";
}

bool is_antisaddle(EquilibriumKind k) noexcept {
  switch (k) {
    case EquilibriumKind::stable_node:
    case EquilibriumKind::unstable_node:
    case EquilibriumKind::stable_focus:
    case EquilibriumKind::unstable_focus:
    case EquilibriumKind::center_candidate: return true;
    default: return false;
  }
}

Equilibrium classify(const PlanarField& field, Vec2 location) {
  Equilibrium e;
  e.location = location;
  e.jacobian = field.jacobian(location);
  const double tr = e.jacobian.trace(), det = e.jacobian.det();
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
  e.eigenvalues = {0.5 * (tr - disc), 0.5 * (tr + disc)};
  if (e.eigenvalues[0].real() > e.eigenvalues[1].real()) std::swap(e.eigenvalues[0], e.eigenvalues[1]);

  const Mat2& J = e.jacobian;
  const double jmax = std::max({std::abs(J.xx), std::abs(J.xy), std::abs(J.yx), std::abs(J.yy)});
  if (std::abs(det) <= kDetTolerance) {
    e.kind = jmax > kDetTolerance ? EquilibriumKind::saddle_node : EquilibriumKind::degenerate;
    e.index = 0;
  } else if (det < 0.0) {
    e.kind = EquilibriumKind::saddle;
    e.index = -1;
  } else {
    e.index = 1;
    if (tr * tr - 4.0 * det >= 0.0) {
      e.kind = tr < 0.0 ? EquilibriumKind::stable_node : EquilibriumKind::unstable_node;
    } else if (std::abs(0.5 * tr) <= kCenterTolerance * std::max(1.0, std::sqrt(det))) {
      e.kind = EquilibriumKind::center_candidate;
    } else {
      e.kind = tr < 0.0 ? EquilibriumKind::stable_focus : EquilibriumKind::unstable_focus;
    }
  }

  if (location.x == 0.0 && location.y == 0.0) {
    e.label = EquilibriumLabel::O;
  } else if (e.kind == EquilibriumKind::saddle) {
    e.label = EquilibriumLabel::S;
  } else if (is_antisaddle(e.kind)) {
    e.label = EquilibriumLabel::A;
  }
  return e;
}

namespace {

Vec2 polish(const PlanarField& field, Vec2 p) {
  for (int it = 0; it < 20; ++it) {
    const Vec2 f = field.velocity(p);
    const Mat2 J = field.jacobian(p);
    const double det = J.det();
    if (det == 0.0) break;
    const Vec2 step{(J.yy * f.x - J.xy * f.y) / det, (-J.yx * f.x + J.xx * f.y) / det};
    p -= step;
    if (norm(step) <= 1e-16 * std::max(1.0, norm(p))) break;
  }
  return p;
}

}  // namespace

std::optional<Vec2> polish_equilibrium(const PlanarField& field, Vec2 guess) {
  const Vec2 p = polish(field, guess);
  const Vec2 f = field.velocity(p);
  if (!is_finite(p) || std::max(std::abs(f.x), std::abs(f.y)) > 1e-9) return std::nullopt;
  return p;
}

std::vector<Equilibrium> finite_equilibria(const PlanarField& field) {
  const FhnParams& e = field.effective();
  std::vector<Equilibrium> out;
  out.push_back(classify(field, {0.0, 0.0}));
  if (e.delta == 0.0) return out;  // Q = x forces x = 0, then P = -y forces y = 0

  const double k = -(e.coupling() / e.delta) - e.excitation();
  for (double x : real_roots_quadratic(e.c, -e.b, k)) {
    if (x == 0.0) continue;
    Vec2 p = polish(field, {x, x / e.delta});
    if (norm(p) <= 1e-12) continue;
    out.push_back(classify(field, p));
  }
  std::sort(out.begin() + 1, out.end(),
            [](const Equilibrium& l, const Equilibrium& r) { return l.location.x < r.location.x; });
  return out;
}

std::vector<Equilibrium> finite_equilibria(const FhnParams& params) {
  return finite_equilibria(PlanarField(params));
}

std::optional<Equilibrium> find_labeled(const std::vector<Equilibrium>& eqs,
                                        EquilibriumLabel label) {
  for (const auto& e : eqs)
    if (e.label == label) return e;
  return std::nullopt;
}

namespace {

struct CurvePoint {
  double u;
  Vec2 f;
};

class IndexWalker {
 public:
  IndexWalker(const PlanarField& field, const ClosedCurve& curve) : field_(field), curve_(curve) {
    if (const auto* poly = std::get_if<Polygon>(&curve_)) {
      if (poly->vertices.size() < 3) throw usage_error("poincare_index: polygon needs 3 vertices");
      cumulative_.push_back(0.0);
      const auto& v = poly->vertices;
      for (std::size_t i = 0; i < v.size(); ++i)
        cumulative_.push_back(cumulative_.back() + distance(v[i], v[(i + 1) % v.size()]));
    } else if (std::get<Circle>(curve_).radius <= 0.0) {
      throw usage_error("poincare_index: radius must be positive");
    }
  }

  Vec2 point(double u) const {
    if (const auto* c = std::get_if<Circle>(&curve_)) {
      const double th = 2.0 * std::numbers::pi * u;
      return c->center + c->radius * Vec2{std::cos(th), std::sin(th)};
    }
    const auto& v = std::get<Polygon>(curve_).vertices;
    const double len = u * cumulative_.back();
    std::size_t i = std::upper_bound(cumulative_.begin(), cumulative_.end(), len) -
                    cumulative_.begin() - 1;
    i = std::min(i, v.size() - 1);
    const double seg = cumulative_[i + 1] - cumulative_[i];
    const double t = seg > 0.0 ? (len - cumulative_[i]) / seg : 0.0;
    return v[i] + t * (v[(i + 1) % v.size()] - v[i]);
  }

  CurvePoint sample(double u) const {
    const Vec2 f = field_.velocity(point(u));
    if (norm(f) <= 1e-13) throw numerical_error("poincare_index: field vanishes on the curve");
    return {u, f};
  }

  double increment(const CurvePoint& a, const CurvePoint& b, int depth) const {
    const double d = std::atan2(wedge(a.f, b.f), dot(a.f, b.f));
    if (std::abs(d) < 0.5 * std::numbers::pi) return d;
    if (depth > 48) throw numerical_error("poincare_index: angle resolution not reached");
    const CurvePoint m = sample(0.5 * (a.u + b.u));
    return increment(a, m, depth + 1) + increment(m, b, depth + 1);
  }

 private:
  const PlanarField& field_;
  const ClosedCurve& curve_;
  std::vector<double> cumulative_;
};

}  // namespace

int poincare_index(const PlanarField& field, const ClosedCurve& curve, int n_samples) {
  if (n_samples < 4) throw usage_error("poincare_index: need at least 4 samples");
  IndexWalker walk(field, curve);
  double total = 0.0;
  CurvePoint prev = walk.sample(0.0);
  const CurvePoint first = prev;
  for (int i = 1; i <= n_samples; ++i) {
    const CurvePoint cur = i == n_samples ? CurvePoint{1.0, first.f} : walk.sample(double(i) / n_samples);
    total += walk.increment(prev, cur, 0);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

InfiniteAnalysis infinite_singularities(const FhnParams& params) {
  InfiniteAnalysis out;
  if (params.c == 0.0) {
    out.degraded = true;
    out.points.push_back({InfiniteChart::u_chart, 0.0, InfiniteKind::other, 0});
    return out;
  }
  // Top-degree homogeneous parts (degree 3), coefficients of x^3, x^2 y, x y^2, y^3.
  const std::array<double, 4> p3{-params.c, 0.0, 0.0, 0.0};
  const std::array<double, 4> q3{0.0, 0.0, 0.0, 0.0};  // Q has degree one
  // H = x Q3 - y P3, coefficients of x^(4-k) y^k for k = 0..4.
  std::array<double, 5> h{};
  for (int k = 0; k < 4; ++k) {
    h[k] += q3[k];
    h[k + 1] -= p3[k];
  }
  // u chart: H(1, u) = sum h[k] u^k. v chart: H(v, 1) = sum h[4-k] v^k.
  auto lowest = [](auto coef_of) {
    for (int k = 0; k <= 4; ++k)
      if (coef_of(k) != 0.0) return k;
    return 5;
  };
  const int mu = lowest([&](int k) { return h[k]; });
  const int mv = lowest([&](int k) { return h[4 - k]; });

  if (mu >= 1) {
    // Simple root: node when the along-equator and transverse eigenvalues agree.
    const double along = h[1];
    const double transverse = -p3[0];
    InfiniteKind kind = InfiniteKind::other;
    if (mu == 1 && along * transverse > 0.0) kind = InfiniteKind::simple_node;
    out.points.push_back({InfiniteChart::u_chart, 0.0, kind, mu});
  }
  if (mv >= 1) {
    // The y-axis direction carries a triple root with vanishing transverse
    // linear part; it is a degenerate saddle of multiplicity three.
    const InfiniteKind kind = mv == 3 ? InfiniteKind::triple_saddle : InfiniteKind::other;
    out.points.push_back({InfiniteChart::v_chart, 0.0, kind, mv});
  }
  return out;
}

IndexBalance index_balance(const FhnParams& params) {
  IndexBalance b;
  for (const auto& e : finite_equilibria(params)) {
    switch (e.kind) {
      case EquilibriumKind::stable_node:
      case EquilibriumKind::unstable_node: ++b.nodes; break;
      case EquilibriumKind::stable_focus:
      case EquilibriumKind::unstable_focus: ++b.foci; break;
      case EquilibriumKind::center_candidate: ++b.centers; break;
      case EquilibriumKind::saddle: ++b.saddles; break;
      default: b.applicable = false; break;
    }
  }
  const auto inf = infinite_singularities(params);
  if (inf.degraded) b.applicable = false;
  for (const auto& p : inf.points) {
    if (p.kind == InfiniteKind::simple_node) ++b.infinite_nodes;
    if (p.kind == InfiniteKind::triple_saddle) ++b.infinite_saddles;
  }
  b.holds = b.applicable && b.nodes + b.foci + b.centers + b.infinite_nodes ==
                                b.saddles + b.infinite_saddles + 1;
  return b;
}

namespace {

struct TraceSample {
  bool present = false;
  double trace = 0.0;
  double det = 0.0;
};

TraceSample trace_at(const PlanarField& field, Param which, double mu, EquilibriumLabel label) {
  const PlanarField f = field.with(which, mu);
  const auto e = find_labeled(finite_equilibria(f), label);
  if (!e) return {};
  return {true, e->jacobian.trace(), e->jacobian.det()};
}

}  // namespace

HopfScan hopf_scan(const PlanarField& field, Param which, Interval interval,
                   EquilibriumLabel which_equilibrium, int n_samples) {
  if (!field.is_active(which)) throw usage_error("hopf_scan: parameter inactive in this stage");
  if (n_samples < 2 || !(interval.hi > interval.lo)) throw usage_error("hopf_scan: bad interval");
  HopfScan out;
  TraceSample prev;
  double prev_mu = interval.lo;
  for (int i = 0; i < n_samples; ++i) {
    const double mu = interval.lo + interval.width() * i / (n_samples - 1);
    const TraceSample cur = trace_at(field, which, mu, which_equilibrium);
    if (!cur.present || cur.det <= 0.0) {
      out.collided = true;
      double lo = prev_mu, hi = mu;
      if (i > 0) {
        for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const TraceSample m = trace_at(field, which, mid, which_equilibrium);
          (m.present && m.det > 0.0 ? lo : hi) = mid;
        }
      }
      out.collision_at = hi;
      break;
    }
    if (i > 0 && prev.present && (prev.trace < 0.0) != (cur.trace < 0.0)) {
      double lo = prev_mu, hi = mu, tlo = prev.trace;
      for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const TraceSample m = trace_at(field, which, mid, which_equilibrium);
        if (!m.present) break;
        if ((m.trace < 0.0) == (tlo < 0.0)) {
          lo = mid;
          tlo = m.trace;
        } else {
          hi = mid;
        }
      }
      out.critical_values.push_back(0.5 * (lo + hi));
    }
    prev = cur;
    prev_mu = mu;
  }
  return out;
}

}  // namespace fhn
