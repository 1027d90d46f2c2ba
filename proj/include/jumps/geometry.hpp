#pragma once

#include <cmath>

namespace jumps {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double squared_distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Vec2& a, const Vec2& b) {
  return std::sqrt(squared_distance(a, b));
}

inline double norm(const Vec2& v) {
  return std::hypot(v.x, v.y);
}

}  // namespace jumps
