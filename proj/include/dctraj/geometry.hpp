#pragma once

#include <cmath>

namespace dctraj {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// A trajectory point: planar position plus flying altitude.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;

  Vec2 xy() const { return {x, y}; }
};

inline double distance3(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dh = a.h - b.h;
  return std::sqrt(dx * dx + dy * dy + dh * dh);
}

}  // namespace dctraj
