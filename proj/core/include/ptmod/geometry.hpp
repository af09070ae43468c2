#pragma once

#include <cmath>

namespace ptmod {

struct Point {
  double x = 0.0;  // km
  double y = 0.0;  // km
};

inline bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }

inline double euclidean_km(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace ptmod
