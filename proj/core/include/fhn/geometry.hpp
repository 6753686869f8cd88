#pragma once

#include <cmath>

namespace fhn {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) noexcept {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double k) noexcept {
    x *= k;
    y *= k;
    return *this;
  }
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double k, Vec2 a) noexcept { return {k * a.x, k * a.y}; }
constexpr Vec2 operator*(Vec2 a, double k) noexcept { return {k * a.x, k * a.y}; }
constexpr Vec2 operator/(Vec2 a, double k) noexcept { return {a.x / k, a.y / k}; }
constexpr bool operator==(Vec2 a, Vec2 b) noexcept { return a.x == b.x && a.y == b.y; }

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }

/// Planar wedge product a ^ b = a.x * b.y - a.y * b.x.
constexpr double wedge(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }

inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) noexcept { return norm(a - b); }

/// Counterclockwise quarter turn.
constexpr Vec2 perp(Vec2 a) noexcept { return {-a.y, a.x}; }

inline Vec2 normalized(Vec2 a) noexcept {
  const double n = norm(a);
  return n > 0.0 ? a / n : a;
}

inline Vec2 rotated(Vec2 a, double angle) noexcept {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline bool is_finite(Vec2 a) noexcept { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Row-major 2x2 matrix [[xx, xy], [yx, yy]].
struct Mat2 {
  double xx = 0.0, xy = 0.0;
  double yx = 0.0, yy = 0.0;

  constexpr double trace() const noexcept { return xx + yy; }
  constexpr double det() const noexcept { return xx * yy - xy * yx; }
};

constexpr Vec2 operator*(const Mat2& m, Vec2 v) noexcept {
  return {m.xx * v.x + m.xy * v.y, m.yx * v.x + m.yy * v.y};
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr double width() const noexcept { return hi - lo; }
  constexpr bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

}  // namespace fhn
