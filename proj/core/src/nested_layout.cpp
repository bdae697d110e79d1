#include "cagkit/nested_layout.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cagkit {

using nlohmann::json;

namespace {

double round_up(double v, int step) { return std::ceil(v / step) * step; }

}  // namespace

double nested_node_side(std::size_t statements, std::size_t max_statements, const NestedLayoutOptions& opt) {
  double side = opt.min_side;
  if (max_statements > 0)
    side = opt.max_side * std::sqrt(static_cast<double>(statements) / static_cast<double>(max_statements));
  return round_up(std::clamp(side, opt.min_side, opt.max_side), opt.grid_step);
}

NestedLayoutResult nested_layout(const NestedProjection& projection, const NestedLayoutOptions& opt) {
  NestedLayoutResult result;
  if (const auto* s = std::get_if<SuppressedEdges>(&projection.edges)) result.suppressed = s->relationship_count;
  if (projection.compartments.empty()) return result;
  const int g = opt.grid_step;

  std::size_t max_count = 0;
  for (const auto& c : projection.compartments)
    for (const auto& m : c.members) max_count = std::max(max_count, m.statements);

  // Member grid per compartment, relative to the compartment origin.
  struct Local {
    Box size;
    std::vector<std::pair<std::string, Box>> members;
  };
  std::vector<Local> locals;
  const double pad = round_up(opt.padding, g);
  const double head = round_up(opt.header, g);
  const double gap = round_up(opt.member_gap, g);
  for (const auto& c : projection.compartments) {
    Local local;
    const std::size_t count = c.members.size();
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(count, 1)))));
    double cell = opt.min_side;
    for (const auto& m : c.members) cell = std::max(cell, nested_node_side(m.statements, max_count, opt));
    cell = round_up(cell, g);
    const std::size_t rows = count == 0 ? 1 : (count + cols - 1) / cols;
    for (std::size_t i = 0; i < count; ++i) {
      const double side = nested_node_side(c.members[i].statements, max_count, opt);
      const double cx = pad + static_cast<double>(i % cols) * (cell + gap);
      const double cy = head + pad + static_cast<double>(i / cols) * (cell + gap);
      const double inset = std::floor((cell - side) / 2 / g) * g;
      local.members.push_back({c.members[i].concept_id, {cx + inset, cy + inset, side, side}});
    }
    const double w = 2 * pad + static_cast<double>(cols) * cell + static_cast<double>(cols - 1) * gap;
    const double h = head + 2 * pad + static_cast<double>(rows) * cell + static_cast<double>(rows - 1) * gap;
    local.size = {0, 0, w, h};
    locals.push_back(std::move(local));
  }

  // Compartment placement over the quotient graph.
  std::map<std::string, std::string> owner;
  for (const auto& c : projection.compartments)
    for (const auto& m : c.members) owner[m.concept_id] = c.parent;
  auto key = [](const std::string& parent) { return parent.empty() ? std::string("(root)") : parent; };

  LayoutGraph quotient;
  for (std::size_t i = 0; i < projection.compartments.size(); ++i)
    quotient.nodes.push_back({key(projection.compartments[i].parent), locals[i].size.width, locals[i].size.height});
  const auto* edges = std::get_if<std::vector<AggregatedEdge>>(&projection.edges);
  if (edges) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : *edges) {
      auto a = owner.find(e.subject);
      auto b = owner.find(e.object);
      if (a == owner.end() || b == owner.end() || a->second == b->second) continue;
      if (seen.insert({a->second, b->second}).second) quotient.edges.push_back({key(a->second), key(b->second)});
    }
  }
  LayoutOptions lopt;
  lopt.policy = AcyclicityPolicy::Relaxed;
  lopt.grid_step = g;
  lopt.route_edges = false;
  const LayoutResult placed = flow_layout(quotient, lopt);

  std::vector<Box> all_nodes;
  std::vector<std::string> all_ids;
  for (std::size_t i = 0; i < projection.compartments.size(); ++i) {
    const auto& parent = projection.compartments[i].parent;
    const Box& cb = placed.node_boxes.at(key(parent));
    result.compartment_boxes.emplace(parent, cb);
    for (const auto& [id, b] : locals[i].members) {
      Box abs{cb.x + b.x, cb.y + b.y, b.width, b.height};
      result.node_boxes.emplace(id, abs);
      result.node_compartment.emplace(id, parent);
      all_nodes.push_back(abs);
      all_ids.push_back(id);
    }
  }
  result.canvas = placed.canvas;

  if (edges && opt.route_edges && !all_nodes.empty()) {
    std::vector<Box> obstacles = all_nodes;
    RoutingGrid grid(routing_bounds(obstacles, g), g, obstacles);
    RouteScratch scratch;
    for (const auto& e : *edges) {
      auto s = result.node_boxes.find(e.subject);
      auto t = result.node_boxes.find(e.object);
      if (s == result.node_boxes.end() || t == result.node_boxes.end()) continue;
      Route r = route_on_grid(grid, s->second, t->second, scratch);
      result.edge_routes.push_back({e.subject, e.object, std::move(r.points), r.clipped, false});
    }
  }
  return result;
}

json to_json(const NestedLayoutResult& r) {
  json comps = json::object();
  for (const auto& [parent, b] : r.compartment_boxes) comps[parent] = to_json(b);
  json nodes = json::object();
  for (const auto& [id, b] : r.node_boxes) {
    json j = to_json(b);
    j["compartment"] = r.node_compartment.at(id);
    nodes[id] = std::move(j);
  }
  json out = {{"compartments", std::move(comps)}, {"nodes", std::move(nodes)}, {"canvas", to_json(r.canvas)}};
  if (r.suppressed) {
    out["edges"] = {{"suppressed", true}, {"relationship_count", *r.suppressed}};
  } else {
    json edges = json::array();
    for (const auto& e : r.edge_routes) {
      json pts = json::array();
      for (const auto& p : e.points) pts.push_back(to_json(p));
      edges.push_back({{"source", e.source}, {"target", e.target}, {"points", std::move(pts)}, {"clipped", e.clipped}});
    }
    out["edges"] = std::move(edges);
  }
  return out;
}

}  // namespace cagkit
