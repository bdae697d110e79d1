#pragma once

#include "cagkit/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cagkit {

inline constexpr int kDefaultGridStep = 10;
inline constexpr int kTurnPenalty = 2;

enum class Heading : std::uint8_t { East = 0, South = 1, West = 2, North = 3 };

/// Uniform routing grid. Grid points sit at multiples of `step` inside
/// `bounds`; a point is blocked when it lies strictly inside an obstacle
/// inflated by one step.
class RoutingGrid {
 public:
  RoutingGrid(const Box& bounds, int step, std::span<const Box> obstacles);

  int step() const { return step_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  std::size_t size() const { return static_cast<std::size_t>(cols_) * rows_; }

  Point point(int col, int row) const { return {origin_x_ + double(col) * step_, origin_y_ + double(row) * step_}; }
  bool blocked(int col, int row) const { return blocked_[index(col, row)] != 0; }
  bool inside(int col, int row) const { return col >= 0 && row >= 0 && col < cols_ && row < rows_; }
  std::size_t index(int col, int row) const { return static_cast<std::size_t>(row) * cols_ + col; }
  /// Grid coordinates of a point lying exactly on the grid.
  std::optional<std::pair<int, int>> cell_of(const Point& p) const;

 private:
  int step_;
  double origin_x_;
  double origin_y_;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<std::uint8_t> blocked_;
};

/// Grid-aligned bounds covering `boxes` with a three-step margin.
Box routing_bounds(std::span<const Box> boxes, int step);

/// Where a route leaves the source and enters the target.
struct RouteEnds {
  std::vector<Point> start_stub;  // boundary point ... start grid point
  std::vector<Point> end_stub;    // goal grid point ... boundary point
  Point start;
  Point goal;
  Heading start_heading = Heading::East;  // direction of travel on leaving
  Heading goal_heading = Heading::East;   // direction of travel on arrival
};

/// Side selection: left/right when the boxes are horizontally separated,
/// otherwise top/bottom. Ports are the first grid line one step beyond the
/// boundary, level with the box centre.
RouteEnds route_ends(const Box& source, const Box& target, int step);

struct Route {
  std::vector<Point> points;  // corners only
  bool clipped = false;       // no grid path; straight fallback
  std::optional<int> cost;    // steps + turn penalties, when routed
};

/// Reusable A* buffers; one per thread.
class RouteScratch {
 public:
  void prepare(std::size_t states);
  std::vector<std::uint32_t> stamp;
  std::vector<int> g;
  std::vector<std::uint32_t> parent;
  std::vector<std::uint8_t> closed;
  std::uint32_t generation = 0;
};

/// A* over `grid`. Cost is one per step plus kTurnPenalty per heading
/// change, including a final change needed to match the goal heading.
Route route_on_grid(const RoutingGrid& grid, const Box& source, const Box& target, RouteScratch& scratch);

/// Standalone routing of one edge around `obstacles`.
Route route_edge(const Box& source, const Box& target, std::span<const Box> obstacles,
                 int grid_step = kDefaultGridStep);

/// Drops repeated and collinear points.
std::vector<Point> simplify_polyline(std::vector<Point> pts);

}  // namespace cagkit
