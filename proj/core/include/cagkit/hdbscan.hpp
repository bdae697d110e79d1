#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cagkit {

inline constexpr int kNoiseCluster = -1;

struct HdbscanParams {
  std::size_t min_cluster_size = 5;
  /// Neighbourhood size for core distances (self included); 0 means min_cluster_size.
  std::size_t min_samples = 0;
};

using DistanceFn = std::function<double(std::span<const double>, std::span<const double>)>;

double cosine_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Density-based hierarchical clustering: mutual-reachability MST, condensed
/// tree with `min_cluster_size`, excess-of-mass selection. The root is only
/// reported as a cluster when it never splits into two admissible clusters.
/// Labels are 0..m-1 ordered by each cluster's smallest member index, or
/// kNoiseCluster.
std::vector<int> hdbscan(const std::vector<std::vector<double>>& points, const HdbscanParams& params,
                         const DistanceFn& distance = cosine_distance);

}  // namespace cagkit
