#pragma once

#include "cagkit/cag.hpp"
#include "cagkit/layout.hpp"

#include <map>
#include <string>

namespace cagkit {

/// Stroke for an edge state: blue solid, red solid, gray solid, dotted black.
struct EdgeStyle {
  std::string color;
  std::string dasharray;  // empty for solid
};

EdgeStyle edge_style(AggregatePolarity p);

/// Standalone SVG 1.1 document for a computed layout.
std::string render_svg(const LayoutResult& layout, const std::map<std::string, std::string>& labels,
                       const std::map<ConceptPair, AggregatePolarity>& polarity);

/// Lays out a CAG and renders it.
std::string cag_to_svg(const CagModel& model, const Ontology& ontology, const LayoutOptions& options = {});

}  // namespace cagkit
