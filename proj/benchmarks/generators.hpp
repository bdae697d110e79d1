#pragma once

#include "cagkit/layout.hpp"
#include "cagkit/types.hpp"

#include <random>
#include <vector>

namespace cagkit::bench {

/// Random grounded statements over `concepts` concepts under wm/concept/gN.
std::vector<CausalStatement> make_statements(std::size_t count, std::size_t concepts, std::uint64_t seed);

/// Random DAG with label-sized boxes.
LayoutGraph make_dag(std::size_t nodes, double avg_out_degree, std::uint64_t seed);

}  // namespace cagkit::bench
