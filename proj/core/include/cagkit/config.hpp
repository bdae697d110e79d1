#pragma once

#include "cagkit/aggregation.hpp"
#include "cagkit/cag.hpp"
#include "cagkit/hdbscan.hpp"
#include "cagkit/layout.hpp"
#include "cagkit/search.hpp"
#include "cagkit/workspace.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace cagkit {

/// Settings shared by the service and the command line tool. The file format
/// is one `key = value` per line; `#` starts a comment and string values may
/// be double-quoted.
///
///   store, host, port, token, embeddings
///   belief_policy (max|mean), acyclicity (enforced|relaxed)
///   duplicate_threshold, edge_limit, max_hops, min_cluster_size
///   layout.layer_gap, layout.node_gap, layout.reduced_layer_gap,
///   layout.reduced_node_gap, layout.spacing_threshold, layout.grid_step,
///   layout.sweeps
struct Config {
  std::filesystem::path store_dir;
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  std::optional<std::string> token;
  std::optional<std::filesystem::path> embeddings;
  BeliefPolicy belief_policy = BeliefPolicy::Max;
  AcyclicityPolicy acyclicity = AcyclicityPolicy::Enforced;
  double duplicate_threshold = kDefaultDuplicateThreshold;
  std::size_t edge_limit = kDefaultEdgeLimit;
  std::size_t max_hops = 2;
  HdbscanParams hdbscan;
  SpacingRule spacing;
  int grid_step = kDefaultGridStep;
  int sweeps = 8;

  WorkspaceConfig workspace() const;
  LayoutOptions layout(AcyclicityPolicy policy) const;
};

/// Applies `text` on top of `base`. Unknown keys and bad values throw InvalidValue.
Config parse_config(std::string_view text, Config base = {});
Config load_config(const std::filesystem::path& path, Config base = {});

}  // namespace cagkit
