#include "cagkit/layout.hpp"

#include "cagkit/merge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

namespace cagkit {

using nlohmann::json;

Spacing adaptive_spacing(std::size_t node_count) { return SpacingRule{}.at(node_count); }

namespace {

double round_up(double v, int step) { return std::ceil(v / step) * step; }
double snap_near(double v, int step) { return std::floor(v / step + 0.5) * step; }
double snap_down(double v, int step) { return std::floor(v / step) * step; }

/// Greedy feedback-arc ordering (sinks last, sources first, then the vertex
/// with the largest out-in surplus).
std::vector<std::size_t> eades_order(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<std::size_t>> out(n), in(n);
  for (auto [u, v] : edges) {
    out[u].push_back(v);
    in[v].push_back(u);
  }
  std::vector<int> outdeg(n), indeg(n);
  for (std::size_t v = 0; v < n; ++v) {
    outdeg[v] = static_cast<int>(out[v].size());
    indeg[v] = static_cast<int>(in[v].size());
  }
  std::vector<bool> removed(n, false);
  std::vector<std::size_t> s1, s2;
  std::size_t left = n;
  auto remove = [&](std::size_t v) {
    removed[v] = true;
    --left;
    for (auto w : out[v]) --indeg[w];
    for (auto w : in[v]) --outdeg[w];
  };
  while (left > 0) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t v = 0; v < n; ++v) {
        if (!removed[v] && outdeg[v] == 0) {
          s2.push_back(v);
          remove(v);
          progress = true;
        }
      }
      for (std::size_t v = 0; v < n; ++v) {
        if (!removed[v] && indeg[v] == 0) {
          s1.push_back(v);
          remove(v);
          progress = true;
        }
      }
    }
    if (left == 0) break;
    std::size_t pick = n;
    int best = std::numeric_limits<int>::min();
    for (std::size_t v = 0; v < n; ++v) {
      if (removed[v]) continue;
      if (outdeg[v] - indeg[v] > best) {
        best = outdeg[v] - indeg[v];
        pick = v;
      }
    }
    s1.push_back(pick);
    remove(pick);
  }
  s1.insert(s1.end(), s2.rbegin(), s2.rend());
  return s1;
}

std::optional<std::vector<std::size_t>> find_cycle_indices(std::size_t n,
                                                           const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<int> color(n, 0);
  std::vector<std::size_t> path;
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (color[s]) continue;
    stack = {{s, 0}};
    path = {s};
    color[s] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i == adj[v].size()) {
        color[v] = 2;
        stack.pop_back();
        path.pop_back();
        continue;
      }
      const std::size_t w = adj[v][i++];
      if (color[w] == 1) {
        auto pos = std::find(path.begin(), path.end(), w);
        std::vector<std::size_t> cycle(pos, path.end());
        cycle.push_back(w);
        return cycle;
      }
      if (color[w] == 0) {
        color[w] = 1;
        stack.push_back({w, 0});
        path.push_back(w);
      }
    }
  }
  return std::nullopt;
}

/// Isotonic (non-decreasing) least-squares fit by pool-adjacent-violators.
std::vector<double> isotonic_fit(const std::vector<double>& target) {
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (double t : target) {
    blocks.push_back({t, 1});
    while (blocks.size() >= 2) {
      auto& b = blocks[blocks.size() - 1];
      auto& a = blocks[blocks.size() - 2];
      if (a.sum / a.count <= b.sum / b.count) break;
      a.sum += b.sum;
      a.count += b.count;
      blocks.pop_back();
    }
  }
  std::vector<double> out;
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.sum / b.count);
  return out;
}

}  // namespace

std::size_t count_crossings(const std::vector<std::vector<std::size_t>>& order,
                            const std::vector<std::pair<std::size_t, std::size_t>>& segments) {
  std::size_t vertices = 0;
  for (const auto& layer : order) vertices += layer.size();
  std::vector<std::size_t> layer_of(vertices), pos(vertices);
  for (std::size_t l = 0; l < order.size(); ++l)
    for (std::size_t i = 0; i < order[l].size(); ++i) {
      layer_of[order[l][i]] = l;
      pos[order[l][i]] = i;
    }
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_layer(order.size());
  for (auto [u, v] : segments) by_layer[layer_of[u]].push_back({pos[u], pos[v]});

  std::size_t total = 0;
  std::vector<std::size_t> tree;
  for (std::size_t l = 0; l + 1 < order.size(); ++l) {
    auto& segs = by_layer[l];
    std::sort(segs.begin(), segs.end());
    const std::size_t width = order[l + 1].size();
    tree.assign(width + 1, 0);
    std::size_t seen = 0;
    for (auto [_, pv] : segs) {
      std::size_t le = 0;  // earlier segments ending at or before pv
      for (std::size_t i = pv + 1; i > 0; i -= i & (~i + 1)) le += tree[i];
      total += seen - le;
      for (std::size_t i = pv + 1; i <= width; i += i & (~i + 1)) ++tree[i];
      ++seen;
    }
  }
  return total;
}

LayoutResult flow_layout(const LayoutGraph& graph, const LayoutOptions& opt) {
  LayoutResult result;
  const std::size_t n = graph.nodes.size();
  result.spacing = opt.spacing.value_or(opt.spacing_rule.at(n));
  if (n == 0) return result;
  const int g = opt.grid_step;
  if (g <= 0) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");

  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = graph.nodes[i];
    if (!(node.width > 0) || !(node.height > 0))
      throw Error(ErrorCode::InvalidArgument, "node " + node.id + " needs a positive size");
    if (!index.emplace(node.id, i).second) throw Error(ErrorCode::InvalidArgument, "duplicate node " + node.id);
  }

  // Distinct directed edges, input order.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : graph.edges) {
    auto s = index.find(e.source);
    auto t = index.find(e.target);
    if (s == index.end() || t == index.end())
      throw Error(ErrorCode::UnknownNode, "edge endpoint not in graph", {{"source", e.source}, {"target", e.target}});
    if (s->second == t->second) continue;
    if (seen.insert({s->second, t->second}).second) edges.push_back({s->second, t->second});
  }

  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [u, v] : edges) adj[u].push_back(v);
  std::vector<bool> reversed(edges.size(), false);
  if (auto cycle = find_cycle_indices(n, adj)) {
    if (opt.policy == AcyclicityPolicy::Enforced) {
      std::vector<std::string> ids;
      for (auto v : *cycle) ids.push_back(graph.nodes[v].id);
      throw Error(ErrorCode::WouldCreateCycle, "layout input has a directed cycle", {{"cycle", ids}});
    }
    const auto order = eades_order(n, edges);
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    for (std::size_t i = 0; i < edges.size(); ++i) reversed[i] = rank[edges[i].first] > rank[edges[i].second];
  }

  std::set<std::pair<std::size_t, std::size_t>> dag_set;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v] = edges[i];
    dag_set.insert(reversed[i] ? std::pair{v, u} : std::pair{u, v});
  }
  std::vector<std::pair<std::size_t, std::size_t>> dag(dag_set.begin(), dag_set.end());
  std::vector<std::vector<std::size_t>> succ(n), pred(n);
  for (auto [u, v] : dag) {
    succ[u].push_back(v);
    pred[v].push_back(u);
  }

  // Longest-path layering.
  std::vector<std::size_t> layer(n, 0), indeg(n);
  for (std::size_t v = 0; v < n; ++v) indeg[v] = pred[v].size();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);
  while (!ready.empty()) {
    const std::size_t u = ready.top();
    ready.pop();
    for (auto v : succ[u]) {
      layer[v] = std::max(layer[v], layer[u] + 1);
      if (--indeg[v] == 0) ready.push(v);
    }
  }
  const std::size_t layer_count = *std::max_element(layer.begin(), layer.end()) + 1;

  // Dummy vertices split long edges into unit segments.
  std::vector<std::size_t> vlayer = layer;
  auto& segments = result.trace.segments;
  for (auto [u, v] : dag) {
    std::size_t prev = u;
    for (std::size_t l = layer[u] + 1; l < layer[v]; ++l) {
      const std::size_t d = vlayer.size();
      vlayer.push_back(l);
      segments.push_back({prev, d});
      prev = d;
    }
    segments.push_back({prev, v});
  }
  const std::size_t vcount = vlayer.size();
  std::vector<std::vector<std::size_t>> up(vcount), down(vcount);
  for (auto [a, b] : segments) {
    down[a].push_back(b);
    up[b].push_back(a);
  }

  std::vector<std::vector<std::size_t>> order(layer_count);
  for (std::size_t v = 0; v < vcount; ++v) order[vlayer[v]].push_back(v);
  result.trace.initial = order;

  // Barycenter sweeps, keeping the best ordering seen.
  std::vector<double> pos(vcount);
  auto sync_pos = [&] {
    for (const auto& l : order)
      for (std::size_t i = 0; i < l.size(); ++i) pos[l[i]] = static_cast<double>(i);
  };
  sync_pos();
  auto reorder = [&](std::size_t l, const std::vector<std::vector<std::size_t>>& nbrs) {
    std::vector<std::pair<double, std::size_t>> keyed;
    for (auto v : order[l]) {
      double key = pos[v];
      if (!nbrs[v].empty()) {
        double sum = 0;
        for (auto w : nbrs[v]) sum += pos[w];
        key = sum / static_cast<double>(nbrs[v].size());
      }
      keyed.push_back({key, v});
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < keyed.size(); ++i) {
      order[l][i] = keyed[i].second;
      pos[keyed[i].second] = static_cast<double>(i);
    }
  };
  std::size_t best = count_crossings(order, segments);
  result.crossings_before = best;
  auto best_order = order;
  for (int s = 0; s < opt.sweeps && best > 0; ++s) {
    for (std::size_t l = 1; l < layer_count; ++l) reorder(l, up);
    for (std::size_t l = layer_count - 1; l-- > 0;) reorder(l, down);
    const std::size_t c = count_crossings(order, segments);
    if (c < best) {
      best = c;
      best_order = order;
    }
  }
  order = best_order;
  result.crossings_after = best;
  result.trace.final_order = order;

  // Sizes on the grid; columns per layer.
  std::vector<double> w(n), h(n);
  for (std::size_t v = 0; v < n; ++v) {
    w[v] = round_up(graph.nodes[v].width, g);
    h[v] = round_up(graph.nodes[v].height, g);
  }
  const double layer_gap = round_up(result.spacing.layer_gap, g);
  const double node_gap = round_up(result.spacing.node_gap, g);
  std::vector<double> colw(layer_count, 0), colx(layer_count, 0);
  for (std::size_t v = 0; v < n; ++v) colw[layer[v]] = std::max(colw[layer[v]], w[v]);
  double x = round_up(opt.margin, g);
  for (std::size_t l = 0; l < layer_count; ++l) {
    colx[l] = x;
    x += colw[l] + layer_gap;
  }

  // Real vertices per layer in final order.
  std::vector<std::vector<std::size_t>> rows(layer_count);
  for (std::size_t l = 0; l < layer_count; ++l)
    for (auto v : order[l])
      if (v < n) rows[l].push_back(v);

  std::vector<std::vector<std::size_t>> nbr(n);
  for (auto [u, v] : dag) {
    nbr[u].push_back(v);
    nbr[v].push_back(u);
  }
  std::vector<double> top(n, 0);
  for (const auto& r : rows) {
    double y = 0;
    for (auto v : r) {
      top[v] = y;
      y += h[v] + node_gap;
    }
  }
  auto place_layer = [&](std::size_t l) {
    const auto& r = rows[l];
    std::vector<double> target(r.size()), offset(r.size());
    double off = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const auto v = r[i];
      double desired = top[v] + h[v] / 2;
      if (!nbr[v].empty()) {
        double sum = 0;
        for (auto u : nbr[v]) sum += top[u] + h[u] / 2;
        desired = sum / static_cast<double>(nbr[v].size());
      }
      offset[i] = off;
      target[i] = desired - h[v] / 2 - off;
      off += h[v] + node_gap;
    }
    const auto fit = isotonic_fit(target);
    for (std::size_t i = 0; i < r.size(); ++i) top[r[i]] = snap_near(fit[i], g) + offset[i];
  };
  for (int pass = 0; pass < 4; ++pass) {
    for (std::size_t l = 0; l < layer_count; ++l) place_layer(l);
    for (std::size_t l = layer_count; l-- > 0;) place_layer(l);
  }
  const double min_top = *std::min_element(top.begin(), top.end());
  const double shift = round_up(opt.margin, g) - snap_down(min_top, g);

  std::vector<Box> boxes(n);
  double max_right = 0;
  double max_bottom = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t l = layer[v];
    boxes[v] = {colx[l] + snap_down((colw[l] - w[v]) / 2, g), top[v] + shift, w[v], h[v]};
    max_right = std::max(max_right, boxes[v].right());
    max_bottom = std::max(max_bottom, boxes[v].bottom());
    result.node_boxes.emplace(graph.nodes[v].id, boxes[v]);
    result.layers.emplace(graph.nodes[v].id, l);
  }
  result.canvas = {0, 0, max_right + round_up(opt.margin, g), max_bottom + round_up(opt.margin, g)};

  if (opt.route_edges && !edges.empty()) {
    RoutingGrid grid(routing_bounds(boxes, g), g, boxes);
    RouteScratch scratch;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto [u, v] = edges[i];
      Route r = route_on_grid(grid, boxes[u], boxes[v], scratch);
      result.edge_routes.push_back(
          {graph.nodes[u].id, graph.nodes[v].id, std::move(r.points), r.clipped, static_cast<bool>(reversed[i])});
    }
  }
  return result;
}

LayoutNode label_node(const std::string& id, const std::string& label, int grid_step) {
  const double width = std::clamp(20.0 + 7.0 * static_cast<double>(label.size()), 60.0, 240.0);
  return {id, round_up(width, grid_step), 40};
}

LayoutGraph layout_graph(const CagModel& model, const Ontology& ontology) {
  LayoutGraph g;
  for (const auto& [id, _] : model.nodes) g.nodes.push_back(label_node(id, node_display_name(model, ontology, id)));
  for (const auto& [pair, _] : model.edges) g.edges.push_back({pair.first, pair.second});
  return g;
}

json to_json(const Box& b) { return {{"x", b.x}, {"y", b.y}, {"width", b.width}, {"height", b.height}}; }

json to_json(const Point& p) { return json::array({p.x, p.y}); }

json to_json(const LayoutResult& r) {
  json nodes = json::object();
  for (const auto& [id, b] : r.node_boxes) {
    json j = to_json(b);
    j["layer"] = r.layers.at(id);
    nodes[id] = std::move(j);
  }
  json edges = json::array();
  for (const auto& e : r.edge_routes) {
    json pts = json::array();
    for (const auto& p : e.points) pts.push_back(to_json(p));
    json je = {{"source", e.source}, {"target", e.target}, {"points", std::move(pts)}, {"clipped", e.clipped}};
    if (e.feedback) je["feedback"] = true;
    edges.push_back(std::move(je));
  }
  return {{"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"canvas", to_json(r.canvas)},
          {"spacing", {{"layer_gap", r.spacing.layer_gap}, {"node_gap", r.spacing.node_gap}}}};
}

}  // namespace cagkit
