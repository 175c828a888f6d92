#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cgra/arch.hpp"
#include "cgra/dfg.hpp"
#include "cgra/error.hpp"
#include "cgra/mapping.hpp"
#include "cgra/mii.hpp"
#include "cgra/mrrg.hpp"
#include "cgra/router.hpp"

namespace cgra {

enum class Strategy { Adaptive, Sa };

std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);

struct MapperConfig {
  int max_ii = 24;
  Strategy strategy = Strategy::Adaptive;
  std::uint64_t seed = 1;
  // adaptive
  double escalation = 1.5;
  int max_rounds = 30;
  int patience = 3;  // rounds without progress before a node is re-placed
  int restarts = 4;  // fresh attempts per II, each from a reseeded placement
  // simulated annealing
  double sa_t0 = 10;
  double sa_cooling = 0.95;
  int sa_moves = 100;
  double sa_tmin = 0.01;
  RouteCosts costs;
  int slack = 2;                 // time steps scanned beyond one II window
  std::optional<int> hop_limit;  // overrides the fabric's hop limit

  friend bool operator==(const MapperConfig&, const MapperConfig&) = default;
};

// Validates invariants (cooling in (0,1), escalation > 1, ...) and throws SchemaError.
MapperConfig parse_mapper_config(std::string_view text);
std::string serialize_mapper_config(const MapperConfig& cfg);

struct AttemptLog {
  int ii = 0;
  bool success = false;
  int rounds = 0;
  int overuse = 0;
  int unrouted = 0;
  std::string note;
};

struct MapResult {
  Mapping mapping;
  MiiReport mii;
  std::vector<AttemptLog> attempts;
};

// Thrown when every candidate II fails; carries the least-conflicted attempt.
class MappingFailedError : public Error {
 public:
  MappingFailedError(const std::string& what, Mapping best, std::vector<AttemptLog> attempts, MiiReport mii)
      : Error(ErrorCode::MappingFailed, what), best(std::move(best)), attempts(std::move(attempts)), mii(mii) {}
  Mapping best;
  std::vector<AttemptLog> attempts;
  MiiReport mii;
};

// The DFG should already carry bank ids (embed_addresses); memory nodes with
// no bank may use any memory port their FU reaches.
MapResult map(const Dfg& dfg, const RoutingGraph& rg, const MapperConfig& cfg = {});
MapResult map(const Dfg& dfg, const ArchSpec& spec, const MapperConfig& cfg = {});

// Resolution passes over an existing (possibly oversubscribed) mapping. `mrrg`
// must be empty; it is filled with the mapping's claims. Returns true when the
// result is conflict-free and fully routed.
bool resolve_adaptive(const Dfg& dfg, Mrrg& mrrg, Mapping& mapping, const MapperConfig& cfg);
bool resolve_sa(const Dfg& dfg, Mrrg& mrrg, Mapping& mapping, const MapperConfig& cfg);

// Claims every placement and route of `mapping` in `mrrg`.
void load_occupancy(const Dfg& dfg, Mrrg& mrrg, const Mapping& mapping);

std::string map_report_json(const Dfg& dfg, const RoutingGraph& rg, const MapResult& result);

}  // namespace cgra
