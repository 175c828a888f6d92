#pragma once

#include <random>
#include <vector>

#include "cgra/arch.hpp"
#include "cgra/dfg.hpp"

namespace oracle {

// Resource bound by max-flow: smallest ii at which every node can be assigned
// to a supporting FU with no FU taking more than ii nodes.
int flow_res_mii(const cgra::Dfg& dfg, const cgra::RoutingGraph& rg);

// Recurrence bound by enumerating every simple cycle: max ceil(lat / distance).
// 0 when the graph has no cycle.
int cycle_rec_mii(const cgra::Dfg& dfg, const cgra::RoutingGraph& rg);

struct RandomDfgOptions {
  int min_nodes = 3;
  int max_nodes = 12;
  double recurrence_prob = 0.35;
  int max_distance = 3;
  bool memory = true;
};

// Random acyclic DFG with optional back edges; always passes parse_dfg.
cgra::Dfg random_dfg(std::mt19937_64& rng, const RandomDfgOptions& opts = {});

}  // namespace oracle
