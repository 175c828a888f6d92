#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cgra/mapping.hpp"
#include "cgra/mrrg.hpp"

namespace cgra {

struct RouteCosts {
  double fu = 2;
  double link = 1;
  double reg = 1;
  double port = 0;
  double overuse = 4;  // per excess user, scaled by (1 + history)

  friend bool operator==(const RouteCosts&, const RouteCosts&) = default;
};

struct RouteResult {
  int source = -1;               // index into the request's sources
  std::vector<RouteStep> steps;  // after the source, ending at the target
  double cost = 0;
};

// Dijkstra over (resource, absolute time, hops) states. Keeps scratch buffers
// between calls, so one Router should be reused for a whole mapping attempt.
class Router {
 public:
  explicit Router(const Mrrg& mrrg);

  // Routes `value` from any rnode of its existing tree (`sources`) to `target`
  // at exactly `arrival`. Tree rnodes are never re-entered. With
  // `allow_overuse` false, rnodes at capacity are treated as blocked.
  std::optional<RouteResult> route(int value, const std::vector<RouteStep>& sources, int target, long arrival,
                                   const RouteCosts& costs, bool allow_overuse = true);

 private:
  double base_cost(int resource, const RouteCosts& costs) const;

  const Mrrg& mrrg_;
  std::vector<double> dist_;
  std::vector<int> parent_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::int8_t> settled_;
  std::vector<std::uint32_t> settled_stamp_;
  std::uint32_t gen_ = 0;
};

// One-shot convenience wrapper around Router. Throws NoPath when the target
// cannot be reached even with oversubscription.
RouteResult route_edge(const Mrrg& mrrg, int value, const std::vector<RouteStep>& sources, int target, long arrival,
                       const RouteCosts& costs = {});

}  // namespace cgra
