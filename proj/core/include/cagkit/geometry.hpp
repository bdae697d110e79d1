#pragma once

#include <algorithm>

namespace cagkit {

struct Point {
  double x = 0;
  double y = 0;
  bool operator==(const Point&) const = default;
};

/// Axis-aligned box; (x, y) is the top-left corner.
struct Box {
  double x = 0;
  double y = 0;
  double width = 0;
  double height = 0;

  bool operator==(const Box&) const = default;

  double right() const { return x + width; }
  double bottom() const { return y + height; }
  Point center() const { return {x + width / 2, y + height / 2}; }
  bool degenerate() const { return !(width > 0) || !(height > 0); }

  Box inflated(double d) const { return {x - d, y - d, width + 2 * d, height + 2 * d}; }
  /// Interiors intersect (touching edges do not count).
  bool overlaps(const Box& o) const {
    return x < o.right() && o.x < right() && y < o.bottom() && o.y < bottom();
  }
  bool strictly_contains(const Point& p) const { return p.x > x && p.x < right() && p.y > y && p.y < bottom(); }
  /// `o` lies in this box's open interior.
  bool strictly_contains(const Box& o) const {
    return o.x > x && o.right() < right() && o.y > y && o.bottom() < bottom();
  }
  bool on_boundary(const Point& p) const {
    const bool in_x = p.x >= x && p.x <= right();
    const bool in_y = p.y >= y && p.y <= bottom();
    return ((p.x == x || p.x == right()) && in_y) || ((p.y == y || p.y == bottom()) && in_x);
  }
};

inline Box bounding_union(const Box& a, const Box& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  return {x0, y0, std::max(a.right(), b.right()) - x0, std::max(a.bottom(), b.bottom()) - y0};
}

}  // namespace cagkit
