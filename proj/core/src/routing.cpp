#include "cagkit/routing.hpp"

#include "cagkit/error.hpp"

#include <cmath>
#include <limits>
#include <queue>

namespace cagkit {

namespace {

constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

double snap_down(double v, int step) { return std::floor(v / step) * step; }
double snap_up(double v, int step) { return std::ceil(v / step) * step; }
double snap_near(double v, int step) { return std::floor(v / step + 0.5) * step; }

}  // namespace

RoutingGrid::RoutingGrid(const Box& bounds, int step, std::span<const Box> obstacles) : step_(step) {
  if (step <= 0) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
  origin_x_ = snap_down(bounds.x, step);
  origin_y_ = snap_down(bounds.y, step);
  cols_ = static_cast<int>(std::floor((bounds.right() - origin_x_) / step)) + 1;
  rows_ = static_cast<int>(std::floor((bounds.bottom() - origin_y_) / step)) + 1;
  blocked_.assign(size(), 0);
  for (const Box& ob : obstacles) {
    const Box b = ob.inflated(step);
    const int c0 = std::max(0, static_cast<int>(std::floor((b.x - origin_x_) / step)) + 1);
    const int c1 = std::min(cols_ - 1, static_cast<int>(std::ceil((b.right() - origin_x_) / step)) - 1);
    const int r0 = std::max(0, static_cast<int>(std::floor((b.y - origin_y_) / step)) + 1);
    const int r1 = std::min(rows_ - 1, static_cast<int>(std::ceil((b.bottom() - origin_y_) / step)) - 1);
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c)
        if (b.strictly_contains(point(c, r))) blocked_[index(c, r)] = 1;
  }
}

std::optional<std::pair<int, int>> RoutingGrid::cell_of(const Point& p) const {
  const double fc = (p.x - origin_x_) / step_;
  const double fr = (p.y - origin_y_) / step_;
  const int c = static_cast<int>(std::lround(fc));
  const int r = static_cast<int>(std::lround(fr));
  if (std::abs(fc - c) > 1e-9 || std::abs(fr - r) > 1e-9 || !inside(c, r)) return std::nullopt;
  return std::pair{c, r};
}

Box routing_bounds(std::span<const Box> boxes, int step) {
  if (boxes.empty()) return {0, 0, 0, 0};
  Box u = boxes.front();
  for (const Box& b : boxes) u = bounding_union(u, b);
  const double margin = 3.0 * step;
  const double x0 = snap_down(u.x - margin, step);
  const double y0 = snap_down(u.y - margin, step);
  return {x0, y0, snap_up(u.right() + margin, step) - x0, snap_up(u.bottom() + margin, step) - y0};
}

RouteEnds route_ends(const Box& s, const Box& t, int step) {
  RouteEnds e;
  const Point sc = s.center();
  const Point tc = t.center();
  const bool vertical = !(s.right() <= t.x || t.right() <= s.x) && (s.bottom() <= t.y || t.bottom() <= s.y);
  if (!vertical) {
    const bool east = !(t.right() <= s.x);
    e.start_heading = e.goal_heading = east ? Heading::East : Heading::West;
    const double sx = east ? s.right() : s.x;
    const double tx = east ? t.x : t.right();
    const double spx = east ? snap_up(sx + step, step) : snap_down(sx - step, step);
    const double tpx = east ? snap_down(tx - step, step) : snap_up(tx + step, step);
    e.start = {spx, snap_near(sc.y, step)};
    e.goal = {tpx, snap_near(tc.y, step)};
    e.start_stub = {{sx, sc.y}, {spx, sc.y}, e.start};
    e.end_stub = {e.goal, {tpx, tc.y}, {tx, tc.y}};
  } else {
    const bool south = s.bottom() <= t.y;
    e.start_heading = e.goal_heading = south ? Heading::South : Heading::North;
    const double sy = south ? s.bottom() : s.y;
    const double ty = south ? t.y : t.bottom();
    const double spy = south ? snap_up(sy + step, step) : snap_down(sy - step, step);
    const double tpy = south ? snap_down(ty - step, step) : snap_up(ty + step, step);
    e.start = {snap_near(sc.x, step), spy};
    e.goal = {snap_near(tc.x, step), tpy};
    e.start_stub = {{sc.x, sy}, {sc.x, spy}, e.start};
    e.end_stub = {e.goal, {tc.x, tpy}, {tc.x, ty}};
  }
  return e;
}

void RouteScratch::prepare(std::size_t states) {
  if (stamp.size() < states) {
    stamp.assign(states, 0);
    g.assign(states, 0);
    parent.assign(states, kNoParent);
    closed.assign(states, 0);
    generation = 0;
  }
  if (++generation == 0) {
    std::fill(stamp.begin(), stamp.end(), 0);
    generation = 1;
  }
}

std::vector<Point> simplify_polyline(std::vector<Point> pts) {
  std::vector<Point> out;
  for (const Point& p : pts) {
    if (!out.empty() && out.back() == p) continue;
    if (out.size() >= 2) {
      const Point& a = out[out.size() - 2];
      const Point& b = out.back();
      const bool collinear = (a.x == b.x && b.x == p.x) || (a.y == b.y && b.y == p.y);
      if (collinear) out.back() = p;
      else out.push_back(p);
    } else {
      out.push_back(p);
    }
  }
  return out;
}

namespace {

Point clip_to_boundary(const Box& b, const Point& from_center, const Point& toward) {
  const double dx = toward.x - from_center.x;
  const double dy = toward.y - from_center.y;
  if (dx == 0 && dy == 0) return from_center;
  double t = std::numeric_limits<double>::infinity();
  if (dx != 0) t = std::min(t, (b.width / 2) / std::abs(dx));
  if (dy != 0) t = std::min(t, (b.height / 2) / std::abs(dy));
  return {from_center.x + dx * t, from_center.y + dy * t};
}

Route straight_fallback(const Box& s, const Box& t) {
  Route r;
  r.clipped = true;
  r.points = {clip_to_boundary(s, s.center(), t.center()), clip_to_boundary(t, t.center(), s.center())};
  return r;
}

struct OpenEntry {
  int f;
  int g;
  std::uint32_t state;
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g < o.g;
    return state > o.state;
  }
};

}  // namespace

Route route_on_grid(const RoutingGrid& grid, const Box& source, const Box& target, RouteScratch& scratch) {
  if (source.degenerate() || target.degenerate())
    throw Error(ErrorCode::DegenerateBoxes, "route endpoints must have positive area");
  if (source == target) throw Error(ErrorCode::InvalidArgument, "source and target boxes coincide");

  const RouteEnds ends = route_ends(source, target, grid.step());
  const auto sc = grid.cell_of(ends.start);
  const auto gc = grid.cell_of(ends.goal);
  if (!sc || !gc || grid.blocked(sc->first, sc->second) || grid.blocked(gc->first, gc->second))
    return straight_fallback(source, target);

  scratch.prepare(grid.size() * 4);
  const std::uint32_t gen = scratch.generation;
  const int goal_h = static_cast<int>(ends.goal_heading);
  auto heuristic = [&](int c, int r) { return std::abs(c - gc->first) + std::abs(r - gc->second); };

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  const auto start_state =
      static_cast<std::uint32_t>(grid.index(sc->first, sc->second) * 4 + static_cast<int>(ends.start_heading));
  scratch.stamp[start_state] = gen;
  scratch.g[start_state] = 0;
  scratch.parent[start_state] = kNoParent;
  scratch.closed[start_state] = 0;
  open.push({heuristic(sc->first, sc->second), 0, start_state});

  int best = std::numeric_limits<int>::max();
  std::uint32_t best_state = kNoParent;
  const auto cols = static_cast<std::uint32_t>(grid.cols());

  while (!open.empty()) {
    const OpenEntry top = open.top();
    if (top.f >= best) break;
    open.pop();
    const std::uint32_t st = top.state;
    if (scratch.closed[st] || top.g != scratch.g[st]) continue;
    scratch.closed[st] = 1;
    const std::uint32_t cell = st / 4;
    const int heading = static_cast<int>(st % 4);
    const int c = static_cast<int>(cell % cols);
    const int r = static_cast<int>(cell / cols);
    if (c == gc->first && r == gc->second) {
      const int total = top.g + (heading == goal_h ? 0 : kTurnPenalty);
      if (total < best) {
        best = total;
        best_state = st;
      }
      continue;
    }
    for (int h = 0; h < 4; ++h) {
      const int nc = c + kDx[h];
      const int nr = r + kDy[h];
      if (!grid.inside(nc, nr) || grid.blocked(nc, nr)) continue;
      const int ng = top.g + 1 + (h == heading ? 0 : kTurnPenalty);
      const auto ns = static_cast<std::uint32_t>(grid.index(nc, nr) * 4 + h);
      if (scratch.stamp[ns] != gen) {
        scratch.stamp[ns] = gen;
        scratch.closed[ns] = 0;
      } else if (scratch.closed[ns] || scratch.g[ns] <= ng) {
        continue;
      }
      scratch.g[ns] = ng;
      scratch.parent[ns] = st;
      open.push({ng + heuristic(nc, nr), ng, ns});
    }
  }

  if (best_state == kNoParent) return straight_fallback(source, target);

  std::vector<Point> cells;
  for (std::uint32_t st = best_state; st != kNoParent; st = scratch.parent[st]) {
    const std::uint32_t cell = st / 4;
    cells.push_back(grid.point(static_cast<int>(cell % cols), static_cast<int>(cell / cols)));
  }
  std::reverse(cells.begin(), cells.end());

  std::vector<Point> pts = ends.start_stub;
  pts.insert(pts.end(), cells.begin(), cells.end());
  pts.insert(pts.end(), ends.end_stub.begin(), ends.end_stub.end());
  Route route;
  route.points = simplify_polyline(std::move(pts));
  route.cost = best;
  return route;
}

Route route_edge(const Box& source, const Box& target, std::span<const Box> obstacles, int grid_step) {
  if (source.degenerate() || target.degenerate())
    throw Error(ErrorCode::DegenerateBoxes, "route endpoints must have positive area");
  std::vector<Box> all(obstacles.begin(), obstacles.end());
  all.push_back(source);
  all.push_back(target);
  RoutingGrid grid(routing_bounds(all, grid_step), grid_step, all);
  RouteScratch scratch;
  return route_on_grid(grid, source, target, scratch);
}

}  // namespace cagkit
