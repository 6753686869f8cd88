#include "fhn/odeint.hpp"

#include <algorithm>
#include <cmath>

namespace fhn {

namespace {

Vec2 as_vec(const State<2>& y) { return {y[0], y[1]}; }
Vec2 as_vec(const State<3>& y) { return {y[0], y[1]}; }

}  // namespace

Vec2 Trajectory::at(double t) const {
  if (dense.empty()) return states.empty() ? Vec2{} : states.front();
  t = std::clamp(t, 0.0, duration());
  auto it = std::upper_bound(dense.begin(), dense.end(), t,
                             [](double v, const DenseStep<2>& d) { return v < d.t0; });
  if (it != dense.begin()) --it;
  return as_vec(it->at(t));
}

Trajectory integrate(const PlanarField& field, Vec2 start, double t_end,
                     const IntegratorOptions& opt) {
  if (!(opt.tol > 0.0)) throw usage_error("integrate: tol must be positive");
  if (!(t_end > 0.0)) throw usage_error("integrate: t_end must be positive");
  if (!is_finite(start)) throw std::domain_error("integrate: non-finite start");

  const double sign = opt.backward ? -1.0 : 1.0;
  auto rhs = [&field, sign](const State<2>& y) {
    const Vec2 f = field.velocity({y[0], y[1]});
    return State<2>{sign * f.x, sign * f.y};
  };

  Trajectory tr;
  tr.backward = opt.backward;
  tr.times.push_back(0.0);
  tr.states.push_back(start);
  const auto status = detail::drive<2>(rhs, State<2>{start.x, start.y}, t_end, opt,
                                       [&tr](const DenseStep<2>& ds) {
                                         tr.dense.push_back(ds);
                                         tr.times.push_back(ds.t1());
                                         tr.states.push_back(as_vec(ds.at_theta(1.0)));
                                         return true;
                                       });
  switch (status) {
    case detail::DriveStatus::escaped: tr.end = TrajectoryEnd::escaped_radius; break;
    case detail::DriveStatus::underflow:
      throw IntegrationError("integrate: step size underflow", std::move(tr));
    case detail::DriveStatus::max_steps:
      throw IntegrationError("integrate: step budget exhausted", std::move(tr));
    default: tr.end = TrajectoryEnd::reached_t_end; break;
  }
  return tr;
}

Trajectory integrate(const PlanarField& field, Vec2 start, double t_end, double tol) {
  IntegratorOptions opt;
  opt.tol = tol;
  return integrate(field, start, t_end, opt);
}

Section make_section(const PlanarField& field, Vec2 anchor, Vec2 direction,
                     double transversality_floor) {
  if (!is_finite(anchor) || !is_finite(direction) || norm(direction) == 0.0)
    throw usage_error("make_section: invalid anchor or direction");
  Section sec;
  sec.anchor = anchor;
  sec.direction = normalized(direction);
  const Vec2 f = field.velocity(anchor);
  double normal_speed = 0.0;
  if (norm(f) > transversality_floor) {
    normal_speed = dot(f, sec.normal());
  } else {
    sec.anchored_at_equilibrium = true;
    normal_speed = dot(field.jacobian(anchor) * sec.direction, sec.normal());
  }
  if (std::abs(normal_speed) <= transversality_floor)
    throw usage_error("make_section: flow is not transverse to the section line");
  sec.orientation = normal_speed > 0.0 ? 1 : -1;
  return sec;
}

Crossing next_crossing(const PlanarField& field, const Section& section, Vec2 start,
                       double max_time, const CrossingOptions& opt,
                       std::vector<DenseStep<2>>* path) {
  if (!is_finite(start)) throw std::domain_error("next_crossing: non-finite start");
  Crossing out;
  out.point = start;
  if (norm(field.velocity(start)) <= opt.stall_speed) {
    out.status = ReturnStatus::stalled;
    return out;
  }

  const double sign = opt.integrator.backward ? -1.0 : 1.0;
  auto rhs = [&field, sign](const State<3>& y) {
    const Vec2 p{y[0], y[1]};
    const Vec2 f = field.velocity(p);
    return State<3>{sign * f.x, sign * f.y, sign * field.divergence(p)};
  };
  const double sigma = sign * section.orientation;
  auto g = [&](const State<3>& y) { return sigma * section.offset(as_vec(y)); };

  double arclength = 0.0;
  bool found = false;
  bool stalled = false;
  auto on_step = [&](const DenseStep<3>& ds) {
    if (path) {
      DenseStep<2> d2;
      d2.t0 = ds.t0;
      d2.h = ds.h;
      for (std::size_t k = 0; k < 5; ++k) d2.r[k] = {ds.r[k][0], ds.r[k][1]};
      path->push_back(d2);
    }
    const State<3> y1 = ds.at_theta(1.0);
    const double g0 = g(ds.r[0]), g1 = g(y1);
    const Vec2 p0 = as_vec(ds.r[0]), p1 = as_vec(y1);
    if (g0 < 0.0 && g1 >= 0.0) {
      // Illinois iteration on the dense polynomial.
      double lo = 0.0, hi = 1.0, glo = g0, ghi = g1, th = 1.0;
      State<3> yc = y1;
      int side = 0;
      for (int it = 0; it < 100; ++it) {
        th = (ghi - glo) != 0.0 ? lo - glo * (hi - lo) / (ghi - glo) : 0.5 * (lo + hi);
        if (!(th > lo && th < hi)) th = 0.5 * (lo + hi);
        yc = ds.at_theta(th);
        const double gc = g(yc);
        if (std::abs(gc) <= opt.offset_tol || hi - lo < 1e-15) break;
        if (gc < 0.0) {
          lo = th;
          glo = gc;
          if (side == -1) ghi *= 0.5;
          side = -1;
        } else {
          hi = th;
          ghi = gc;
          if (side == 1) glo *= 0.5;
          side = 1;
        }
      }
      const Vec2 pc = as_vec(yc);
      const bool departed = arclength + distance(p0, pc) > opt.departure_arclength;
      const bool on_ray = !section.half_line || section.coordinate(pc) > 0.0;
      if (departed && on_ray) {
        out.point = pc;
        out.time = ds.t0 + th * ds.h;
        out.s = section.coordinate(pc);
        out.divergence_integral = yc[2];
        found = true;
        return false;
      }
    }
    arclength += distance(p0, p1);
    if (norm(field.velocity(p1)) <= opt.stall_speed) {
      stalled = true;
      return false;
    }
    return true;
  };

  const auto status =
      detail::drive<3>(rhs, State<3>{start.x, start.y, 0.0}, max_time, opt.integrator, on_step);
  if (found) {
    out.status = ReturnStatus::returned;
  } else if (stalled) {
    out.status = ReturnStatus::stalled;
  } else if (status == detail::DriveStatus::escaped) {
    out.status = ReturnStatus::escaped;
  } else if (status == detail::DriveStatus::underflow) {
    throw numerical_error("next_crossing: step size underflow");
  } else {
    out.status = ReturnStatus::timed_out;
  }
  return out;
}

}  // namespace fhn
