#pragma once

#include <string>
#include <vector>

#include "cgra/arch.hpp"
#include "cgra/dfg.hpp"
#include "cgra/mrrg.hpp"

namespace cgra {

struct Placement {
  int fu = -1;
  int time = -1;      // absolute schedule time of iteration 0
  int mem_port = -1;  // MuPort resource for LOAD/STORE

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct RouteStep {
  int resource = 0;
  int time = 0;
  int hops = 0;  // links crossed so far in this cycle, including this one

  friend bool operator==(const RouteStep&, const RouteStep&) = default;
};

// Placement and routing of one DFG onto one fabric at a fixed II. Each edge's
// route runs from the producer's result port to the consumer's operand port;
// multicast branches repeat the shared prefix.
struct Mapping {
  std::string arch_name;
  std::string dfg_name;
  int ii = 0;
  int hop_limit = 1;
  std::vector<Placement> placement;
  std::vector<std::vector<RouteStep>> routes;
  double cost = 0;
  std::vector<RNode> oversubscribed;

  friend bool operator==(const Mapping&, const Mapping&) = default;
};

// Operand port of `fu` that feeds `slot`.
int operand_port(const FuInfo& fu, OperandSlot slot);
// Latency of `node` when placed on `fu`.
int placed_latency(const Dfg& dfg, const RoutingGraph& rg, const Mapping& m, int node);
// Schedule length of one iteration: max over nodes of time + latency.
int schedule_length(const Dfg& dfg, const RoutingGraph& rg, const Mapping& m);

// Independent legality check. Returns human-readable violations; empty means legal.
std::vector<std::string> check_mapping(const Dfg& dfg, const RoutingGraph& rg, const Mapping& m);

std::string mapping_to_json(const Dfg& dfg, const RoutingGraph& rg, const Mapping& m);
Mapping mapping_from_json(std::string_view text, const Dfg& dfg, const RoutingGraph& rg);

}  // namespace cgra
