#include "cagkit/hdbscan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace cagkit {

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 1.0;
  const double sim = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  return std::max(0.0, 1.0 - sim);
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

namespace {

struct MstEdge {
  std::size_t a, b;
  double weight;
};

struct CondensedEntry {
  int parent;         // cluster id
  std::size_t child;  // point index, or cluster id when is_cluster
  bool is_cluster;
  double lambda;
  std::size_t size;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  std::size_t& size(std::size_t root) { return size_[root]; }
  std::vector<std::size_t>& parents() { return parent_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

constexpr double kMinDistance = 1e-12;

double to_lambda(double d) { return 1.0 / std::max(d, kMinDistance); }

}  // namespace

std::vector<int> hdbscan(const std::vector<std::vector<double>>& points, const HdbscanParams& params,
                         const DistanceFn& distance) {
  const std::size_t n = points.size();
  const std::size_t mcs = std::max<std::size_t>(params.min_cluster_size, 2);
  std::vector<int> labels(n, kNoiseCluster);
  if (n < mcs) return labels;

  const std::size_t k = std::min(n, params.min_samples == 0 ? mcs : params.min_samples);

  // Core distances: k-th nearest neighbour, self counted as the first.
  std::vector<double> core(n);
  {
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) row[j] = i == j ? 0.0 : distance(points[i], points[j]);
      std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
      core[i] = row[k - 1];
    }
  }

  // Prim's MST over mutual reachability distances.
  std::vector<MstEdge> mst;
  mst.reserve(n - 1);
  {
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(n, 0);
    std::size_t current = 0;
    in_tree[0] = true;
    for (std::size_t step = 1; step < n; ++step) {
      for (std::size_t j = 0; j < n; ++j) {
        if (in_tree[j]) continue;
        const double mr = std::max({core[current], core[j], distance(points[current], points[j])});
        if (mr < best[j]) {
          best[j] = mr;
          from[j] = current;
        }
      }
      std::size_t next = n;
      for (std::size_t j = 0; j < n; ++j)
        if (!in_tree[j] && (next == n || best[j] < best[next])) next = j;
      in_tree[next] = true;
      mst.push_back({from[next], next, best[next]});
      current = next;
    }
  }
  std::stable_sort(mst.begin(), mst.end(), [](const MstEdge& x, const MstEdge& y) { return x.weight < y.weight; });

  // Single-linkage dendrogram: leaves 0..n-1, internal nodes n..2n-2.
  const std::size_t total_nodes = 2 * n - 1;
  std::vector<std::size_t> left(total_nodes, 0), right(total_nodes, 0), node_size(total_nodes, 1);
  std::vector<double> node_dist(total_nodes, 0.0);
  {
    UnionFind uf(total_nodes);
    std::vector<std::size_t> rep(total_nodes);
    std::iota(rep.begin(), rep.end(), 0);
    std::size_t next = n;
    for (const auto& e : mst) {
      const std::size_t ra = uf.find(e.a), rb = uf.find(e.b);
      left[next] = rep[ra];
      right[next] = rep[rb];
      node_dist[next] = e.weight;
      node_size[next] = node_size[rep[ra]] + node_size[rep[rb]];
      uf.parents()[ra] = next;
      uf.parents()[rb] = next;
      rep[next] = next;
      ++next;
    }
  }

  auto collect_leaves = [&](std::size_t node, std::vector<std::size_t>& out) {
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      if (x < n)
        out.push_back(x);
      else {
        stack.push_back(right[x]);
        stack.push_back(left[x]);
      }
    }
  };

  // Condense the dendrogram.
  std::vector<CondensedEntry> condensed;
  std::vector<int> cluster_parent{-1};
  std::vector<double> cluster_birth{0.0};
  {
    struct Frame {
      std::size_t node;
      int cluster;
    };
    std::vector<Frame> stack{{total_nodes - 1, 0}};
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      if (f.node < n) continue;
      const double lambda = to_lambda(node_dist[f.node]);
      const std::size_t l = left[f.node], r = right[f.node];
      const bool l_big = node_size[l] >= mcs, r_big = node_size[r] >= mcs;
      if (l_big && r_big) {
        for (std::size_t child : {l, r}) {
          const int id = static_cast<int>(cluster_parent.size());
          cluster_parent.push_back(f.cluster);
          cluster_birth.push_back(lambda);
          condensed.push_back({f.cluster, static_cast<std::size_t>(id), true, lambda, node_size[child]});
          stack.push_back({child, id});
        }
      } else {
        for (std::size_t child : {l, r}) {
          if (node_size[child] >= mcs) {
            stack.push_back({child, f.cluster});
          } else {
            std::vector<std::size_t> leaves;
            collect_leaves(child, leaves);
            for (std::size_t p : leaves) condensed.push_back({f.cluster, p, false, lambda, 1});
          }
        }
      }
    }
  }

  const std::size_t clusters = cluster_parent.size();
  std::vector<double> stability(clusters, 0.0);
  std::vector<std::vector<int>> children(clusters);
  for (const auto& e : condensed) {
    stability[e.parent] += (e.lambda - cluster_birth[e.parent]) * static_cast<double>(e.size);
    if (e.is_cluster) children[e.parent].push_back(static_cast<int>(e.child));
  }

  // Excess of mass; children always carry larger ids than their parent.
  std::vector<bool> selected(clusters, false);
  std::vector<double> subtree(clusters, 0.0);
  for (std::size_t c = clusters; c-- > 1;) {
    double child_sum = 0;
    for (int ch : children[c]) child_sum += subtree[ch];
    if (children[c].empty() || stability[c] >= child_sum) {
      selected[c] = true;
      subtree[c] = stability[c];
    } else {
      subtree[c] = child_sum;
    }
  }
  if (children[0].empty()) selected[0] = true;
  // Keep only the top-most selections.
  for (std::size_t c = 1; c < clusters; ++c) {
    for (int a = cluster_parent[c]; a >= 0; a = cluster_parent[a]) {
      if (selected[a]) {
        selected[c] = false;
        break;
      }
    }
  }

  std::vector<int> raw(n, kNoiseCluster);
  for (const auto& e : condensed) {
    if (e.is_cluster) continue;
    for (int a = e.parent; a >= 0; a = cluster_parent[a]) {
      if (selected[a]) {
        raw[e.child] = a;
        break;
      }
    }
  }
  std::map<int, int> remap;
  for (std::size_t p = 0; p < n; ++p) {
    if (raw[p] == kNoiseCluster) continue;
    auto [it, inserted] = remap.emplace(raw[p], static_cast<int>(remap.size()));
    labels[p] = it->second;
  }
  return labels;
}

}  // namespace cagkit
