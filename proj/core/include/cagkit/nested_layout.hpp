#pragma once

#include "cagkit/layout.hpp"
#include "cagkit/search.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cagkit {

struct NestedLayoutOptions {
  int grid_step = kDefaultGridStep;
  double min_side = 24;
  double max_side = 160;
  double padding = 20;   // compartment inner margin
  double header = 20;    // title band above members
  double member_gap = 20;
  bool route_edges = true;
};

/// Side length of a member node: max_side * sqrt(count / max_count), clamped
/// to [min_side, max_side] and rounded up to the grid.
double nested_node_side(std::size_t statements, std::size_t max_statements, const NestedLayoutOptions& opt = {});

struct NestedLayoutResult {
  std::map<std::string, Box> compartment_boxes;  // by ontology parent
  std::map<std::string, Box> node_boxes;
  std::map<std::string, std::string> node_compartment;
  std::vector<EdgeRoute> edge_routes;
  std::optional<std::size_t> suppressed;  // relationship count when edges are hidden
  Box canvas;
};

/// Compartments are placed by a flow layout over the compartment quotient
/// graph; members sit in a grid inside their compartment.
NestedLayoutResult nested_layout(const NestedProjection& projection, const NestedLayoutOptions& opt = {});

nlohmann::json to_json(const NestedLayoutResult& r);

}  // namespace cagkit
