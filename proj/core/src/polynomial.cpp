#include "fhn/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fhn {

std::vector<double> real_roots_quadratic(double c2, double c1, double c0) {
  if (c2 == 0.0) {
    if (c1 == 0.0) return {};
    return {-c0 / c1};
  }
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  const double scale = std::max({c1 * c1, std::abs(4.0 * c2 * c0), 1e-300});
  if (disc < -1e-14 * scale) return {};
  if (std::abs(disc) <= 1e-14 * scale) return {-c1 / (2.0 * c2)};
  // Cancellation-free form.
  const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  double r1 = q / c2;
  double r2 = q != 0.0 ? c0 / q : -r1;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

namespace {

double polish_cubic(double c3, double c2, double c1, double c0, double x) {
  for (int it = 0; it < 8; ++it) {
    const double f = ((c3 * x + c2) * x + c1) * x + c0;
    const double df = (3.0 * c3 * x + 2.0 * c2) * x + c1;
    if (df == 0.0) break;
    const double step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace

std::vector<double> real_roots_cubic(double c3, double c2, double c1, double c0) {
  if (c3 == 0.0) return real_roots_quadratic(c2, c1, c0);
  // Depressed cubic t^3 + p t + q with x = t - a/3.
  const double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  const double shift = a / 3.0;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  std::vector<double> roots;
  const double tiny = 1e-14 * std::max({1.0, std::abs(q * q), std::abs(p * p * p)});
  if (disc > tiny) {
    const double sq = std::sqrt(disc);
    roots.push_back(std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq) - shift);
  } else if (disc >= -tiny) {
    if (std::abs(p) < 1e-300) {
      roots.push_back(-shift);
    } else {
      const double u = std::cbrt(-q / 2.0);
      roots.push_back(2.0 * u - shift);
      roots.push_back(-u - shift);
    }
  } else {
    const double r = std::sqrt(-p / 3.0);
    const double phi = std::acos(std::clamp(3.0 * q / (2.0 * p * r), -1.0, 1.0));
    for (int k = 0; k < 3; ++k) {
      roots.push_back(2.0 * r * std::cos((phi - 2.0 * std::numbers::pi * k) / 3.0) - shift);
    }
  }
  for (double& x : roots) x = polish_cubic(c3, c2, c1, c0, x);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double u, double v) {
                            return std::abs(u - v) <= 1e-12 * std::max(1.0, std::abs(u));
                          }),
              roots.end());
  return roots;
}

}  // namespace fhn
