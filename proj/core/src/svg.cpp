#include "cagkit/svg.hpp"

#include "cagkit/merge.hpp"

#include <sstream>

namespace cagkit {

EdgeStyle edge_style(AggregatePolarity p) {
  switch (p) {
    case AggregatePolarity::Same: return {"#1f5fbf", ""};
    case AggregatePolarity::Opposite: return {"#c62828", ""};
    case AggregatePolarity::Ambiguous: return {"#8a8a8a", ""};
    case AggregatePolarity::NoEvidence: break;
  }
  return {"#000000", "2,4"};
}

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const LayoutResult& layout, const std::map<std::string, std::string>& labels,
                       const std::map<ConceptPair, AggregatePolarity>& polarity) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << layout.canvas.width << "\" height=\""
    << layout.canvas.height << "\" viewBox=\"0 0 " << layout.canvas.width << ' ' << layout.canvas.height << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (const auto& e : layout.edge_routes) {
    auto it = polarity.find({e.source, e.target});
    const EdgeStyle st = edge_style(it == polarity.end() ? AggregatePolarity::NoEvidence : it->second);
    o << "<polyline fill=\"none\" stroke=\"" << st.color << "\" stroke-width=\"2\"";
    if (!st.dasharray.empty()) o << " stroke-dasharray=\"" << st.dasharray << '"';
    o << " points=\"";
    for (std::size_t i = 0; i < e.points.size(); ++i) o << (i ? " " : "") << e.points[i].x << ',' << e.points[i].y;
    o << "\"><title>" << escape(e.source) << " -&gt; " << escape(e.target) << "</title></polyline>\n";
  }
  for (const auto& [id, b] : layout.node_boxes) {
    auto it = labels.find(id);
    const std::string label = it == labels.end() ? id : it->second;
    o << "<g><rect x=\"" << b.x << "\" y=\"" << b.y << "\" width=\"" << b.width << "\" height=\"" << b.height
      << "\" rx=\"4\" fill=\"#f5f5f5\" stroke=\"#333333\"/>"
      << "<text x=\"" << b.center().x << "\" y=\"" << b.center().y + 4
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << escape(label) << "</text></g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string cag_to_svg(const CagModel& model, const Ontology& ontology, const LayoutOptions& options) {
  LayoutOptions opt = options;
  opt.policy = model.policy;
  const LayoutResult layout = flow_layout(layout_graph(model, ontology), opt);
  std::map<std::string, std::string> labels;
  for (const auto& [id, _] : model.nodes) labels[id] = node_display_name(model, ontology, id);
  std::map<ConceptPair, AggregatePolarity> polarity;
  for (const auto& [pair, e] : model.edges) polarity[pair] = e.aggregate.aggregate_polarity;
  return render_svg(layout, labels, polarity);
}

}  // namespace cagkit
