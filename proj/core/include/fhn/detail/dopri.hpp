#pragma once

// Dormand-Prince 5(4) stepper with the standard quartic dense output.
//
// Step control is error-per-unit-step: the embedded estimate divided by
// max(h, 1e-3) must stay below tol. With h_max <= 1 every accepted step also
// has local error below tol, and the global error scales like tol^(5/4).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace fhn {

template <std::size_t N>
using State = std::array<double, N>;

/// Continuous extension over one accepted step [t0, t0 + h].
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<State<N>, 5> r{};

  double t1() const noexcept { return t0 + h; }

  State<N> at_theta(double th) const noexcept {
    const double th1 = 1.0 - th;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
    return y;
  }
  State<N> at(double t) const noexcept { return at_theta(h != 0.0 ? (t - t0) / h : 0.0); }
};

struct IntegratorOptions {
  /// Mixed absolute/relative error bound per unit step.
  double tol = 1e-10;
  double h_init = 0.0;  ///< 0 selects automatically
  double h_min = 1e-13;
  double h_max = 1.0;  ///< clamped to 1
  long max_steps = 5'000'000;
  /// Trajectories leaving this radius in the (x, y) plane are declared unbounded.
  double escape_radius = 1e4;
  /// Integrate the negated field.
  bool backward = false;
};

namespace detail {

enum class DriveStatus { reached_end, stopped, escaped, underflow, max_steps };

struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

template <std::size_t N>
inline double error_scale(const State<N>& y0, const State<N>& y1, double tol, std::size_t i) {
  return tol * (1.0 + std::max(std::abs(y0[i]), std::abs(y1[i])));
}

/// Drives the stepper from y over elapsed time [0, t_end]. `rhs(y) -> State<N>`
/// must already include the time direction. `on_step(const DenseStep<N>&)`
/// returns false to stop. The first two components are taken as the planar
/// position for the escape test.
template <std::size_t N, class Rhs, class OnStep>
DriveStatus drive(const Rhs& rhs, State<N> y, double t_end, const IntegratorOptions& opt,
                  OnStep&& on_step) {
  using D = Dopri5;
  State<N> k1 = rhs(y), k2, k3, k4, k5, k6, k7, yt, yn;
  double t = 0.0;

  double h = opt.h_init;
  if (h <= 0.0) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt.tol * (1.0 + std::abs(y[i]));
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, 0.01);
  }
  const double h_max = std::min(opt.h_max, 1.0);
  h = std::min({h, h_max, t_end});

  for (long step = 0; step < opt.max_steps; ++step) {
    if (t >= t_end) return DriveStatus::reached_end;
    bool last = false;
    if (t + h >= t_end) {
      h = t_end - t;
      last = true;
    }
    if (h < opt.h_min * std::max(1.0, t)) return DriveStatus::underflow;

    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * D::a21 * k1[i];
    k2 = rhs(yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (D::a31 * k1[i] + D::a32 * k2[i]);
    k3 = rhs(yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
    k4 = rhs(yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] + D::a54 * k4[i]);
    k5 = rhs(yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] + D::a64 * k4[i] +
                          D::a65 * k5[i]);
    k6 = rhs(yt);
    for (std::size_t i = 0; i < N; ++i)
      yn[i] = y[i] + h * (D::a71 * k1[i] + D::a73 * k3[i] + D::a74 * k4[i] + D::a75 * k5[i] +
                          D::a76 * k6[i]);
    k7 = rhs(yn);

    double err = 0.0;
    bool finite = true;
    // Per unit step, except that very short steps are held to a per-step
    // bound; otherwise blow-up towards the escape radius underflows.
    const double unit = std::max(h, 1e-3);
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] +
                            D::e6 * k6[i] + D::e7 * k7[i]);
      if (!std::isfinite(e) || !std::isfinite(yn[i])) finite = false;
      err = std::max(err, std::abs(e) / (unit * error_scale<N>(y, yn, opt.tol, i)));
    }
    if (!finite) {
      h *= 0.25;
      continue;
    }

    const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.25) : 5.0;
    if (err > 1.0) {
      h *= std::max(0.2, fac);
      continue;
    }

    DenseStep<N> ds;
    ds.t0 = t;
    ds.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      const double dy = yn[i] - y[i];
      const double bsp = h * k1[i] - dy;
      ds.r[0][i] = y[i];
      ds.r[1][i] = dy;
      ds.r[2][i] = bsp;
      ds.r[3][i] = dy - h * k7[i] - bsp;
      ds.r[4][i] = h * (D::d1 * k1[i] + D::d3 * k3[i] + D::d4 * k4[i] + D::d5 * k5[i] +
                        D::d6 * k6[i] + D::d7 * k7[i]);
    }
    t = last ? t_end : t + h;
    y = yn;
    k1 = k7;
    if (!on_step(ds)) return DriveStatus::stopped;
    if (std::hypot(y[0], y[1]) > opt.escape_radius) return DriveStatus::escaped;
    if (last) return DriveStatus::reached_end;
    h = std::min(h * std::min(5.0, fac), h_max);
  }
  return DriveStatus::max_steps;
}

}  // namespace detail
}  // namespace fhn
