#pragma once

#include <cmath>

namespace tubeswarm {

/// Planar vector in meters (positions) or m/s (velocities).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) noexcept {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) noexcept {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) noexcept { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) noexcept { return a -= b; }
  friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return a *= s; }
  friend constexpr Vec2 operator-(const Vec2& a) noexcept { return {-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) noexcept { return a.x * b.x + a.y * b.y; }

/// z-component of the 3-D cross product.
constexpr double cross(const Vec2& a, const Vec2& b) noexcept { return a.x * b.y - a.y * b.x; }

inline double norm(const Vec2& v) noexcept { return std::hypot(v.x, v.y); }

constexpr double squared_norm(const Vec2& v) noexcept { return v.x * v.x + v.y * v.y; }

/// Counter-clockwise quarter turn.
constexpr Vec2 perp(const Vec2& v) noexcept { return {-v.y, v.x}; }

inline Vec2 rotate(const Vec2& v, double angle) noexcept {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 normalized(const Vec2& v) noexcept {
  const double n = norm(v);
  return {v.x / n, v.y / n};
}

}  // namespace tubeswarm
