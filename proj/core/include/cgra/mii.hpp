#pragma once

#include <cstdint>
#include <vector>

#include "cgra/arch.hpp"
#include "cgra/dfg.hpp"

namespace cgra {

struct MiiReport {
  int res_mii = 1;
  int rec_mii = 0;
  int mii = 1;
};

// Latency of each node on the fastest FU that supports its opcode.
// Throws MappingFailed when some opcode has no supporting FU.
std::vector<int> node_latencies(const Dfg& dfg, const RoutingGraph& rg);

MiiReport compute_mii(const Dfg& dfg, const RoutingGraph& rg);
MiiReport compute_mii(const Dfg& dfg, const ArchSpec& spec);

inline constexpr std::int64_t kNoPath = INT64_MIN / 4;

// All-pairs longest paths where edge u->v weighs lat[u] - ii * distance.
// Entry [u][v] is kNoPath when v is unreachable from u. With ii < rec_mii the
// result is meaningless (positive cycles).
std::vector<std::vector<std::int64_t>> longest_paths(const Dfg& dfg, const std::vector<int>& lat, int ii);

// Placement order: topological over non-recurrence edges; among ready nodes,
// members of longer recurrence cycles first, then lower asap, then node id.
std::vector<int> order_nodes(const Dfg& dfg, const std::vector<int>& lat);
std::vector<int> order_nodes(const Dfg& dfg);

}  // namespace cgra
