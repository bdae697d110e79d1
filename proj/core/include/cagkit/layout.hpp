#pragma once

#include "cagkit/cag.hpp"
#include "cagkit/geometry.hpp"
#include "cagkit/routing.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cagkit {

struct Spacing {
  double layer_gap = 120;
  double node_gap = 40;
  bool operator==(const Spacing&) const = default;
};

inline constexpr std::size_t kSpacingThreshold = 50;

/// Step function: `base` up to `threshold` nodes, `reduced` beyond.
struct SpacingRule {
  Spacing base{120, 40};
  Spacing reduced{90, 30};
  std::size_t threshold = kSpacingThreshold;
  Spacing at(std::size_t node_count) const { return node_count <= threshold ? base : reduced; }
};

/// (120, 40) up to 50 nodes, (90, 30) beyond.
Spacing adaptive_spacing(std::size_t node_count);

struct LayoutNode {
  std::string id;
  double width = 80;
  double height = 40;
};

struct LayoutEdge {
  std::string source;
  std::string target;
};

struct LayoutGraph {
  std::vector<LayoutNode> nodes;
  std::vector<LayoutEdge> edges;
};

struct LayoutOptions {
  AcyclicityPolicy policy = AcyclicityPolicy::Enforced;
  std::optional<Spacing> spacing;   // fixed gaps; otherwise spacing_rule
  SpacingRule spacing_rule;
  int grid_step = kDefaultGridStep;
  int sweeps = 8;                   // barycenter down+up passes
  double margin = 40;
  bool route_edges = true;
};

struct EdgeRoute {
  std::string source;
  std::string target;
  std::vector<Point> points;
  bool clipped = false;
  bool feedback = false;  // reversed to break a cycle
};

/// Vertex orderings per layer before and after crossing reduction, plus the
/// unit-span segments between consecutive layers. Vertices past the real
/// node count are long-edge dummies.
struct OrderingTrace {
  std::vector<std::vector<std::size_t>> initial;
  std::vector<std::vector<std::size_t>> final_order;
  std::vector<std::pair<std::size_t, std::size_t>> segments;
};

struct LayoutResult {
  std::map<std::string, Box> node_boxes;
  std::map<std::string, std::size_t> layers;
  std::vector<EdgeRoute> edge_routes;
  Box canvas;
  Spacing spacing;
  std::size_t crossings_before = 0;
  std::size_t crossings_after = 0;
  OrderingTrace trace;
};

/// Layered left-to-right layout. An empty graph yields an empty result.
/// Cyclic input throws WouldCreateCycle unless the policy is relaxed.
LayoutResult flow_layout(const LayoutGraph& graph, const LayoutOptions& options = {});

/// Crossings between consecutive layers for the given orderings.
std::size_t count_crossings(const std::vector<std::vector<std::size_t>>& order,
                            const std::vector<std::pair<std::size_t, std::size_t>>& segments);

/// Estimated box for a node label.
LayoutNode label_node(const std::string& id, const std::string& label, int grid_step = kDefaultGridStep);

/// Layout input for a CAG: node boxes sized to their labels.
LayoutGraph layout_graph(const CagModel& model, const Ontology& ontology);

nlohmann::json to_json(const Box& b);
nlohmann::json to_json(const Point& p);
nlohmann::json to_json(const LayoutResult& r);

}  // namespace cagkit
