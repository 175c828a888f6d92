#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cgra/arch.hpp"

namespace cgra {

// A resource at one modulo time step.
struct RNode {
  int resource = 0;
  int slot = 0;

  friend bool operator==(const RNode&, const RNode&) = default;
};

// Outgoing arc of a resource. `dt` is 0 for same-cycle propagation and 1 for
// register writes, register holds and FU pass-through.
struct MrrgArc {
  int to = 0;
  int dt = 0;
};

class Mrrg {
 public:
  Mrrg(const RoutingGraph& rg, int ii, int hop_limit);

  const RoutingGraph& graph() const { return *rg_; }
  int ii() const { return ii_; }
  int hop_limit() const { return hop_limit_; }
  int resource_count() const { return static_cast<int>(rg_->resources.size()); }
  int size() const { return resource_count() * ii_; }
  int slot_of(long time) const { return static_cast<int>(((time % ii_) + ii_) % ii_); }

  const std::vector<MrrgArc>& arcs(int resource) const { return arcs_[resource]; }
  // FuSlot and MuPort resources are never oversubscribed.
  bool strict(int resource) const;

  // Occupancy is keyed by (value, absolute time): claims of the same value at
  // the same time share one unit of capacity (multicast).
  void claim(int resource, long time, int value);
  void release(int resource, long time, int value);
  // Distinct keys at the rnode other than (value, time).
  int others(int resource, long time, int value) const;
  int users(int resource, int slot) const;
  int overuse(int resource, int slot) const;
  int total_overuse() const;
  std::vector<RNode> oversubscribed() const;
  void clear_occupancy();

  double history(int resource, int slot) const { return history_[index(resource, slot)]; }
  // Raises the history cost of every currently oversubscribed rnode.
  void escalate(double factor);

  // Reachability along routing arcs (modulo time, hop-limited link chains).
  // Routes enter an FU slot only as a pass-through; a slot used as the start
  // also reaches the memory ports its FU can access in that cycle.
  bool reachable(RNode from, RNode to) const;
  // Same, restricted to arcs that stay within the starting time step.
  bool reachable_within_cycle(RNode from, RNode to) const;

  std::string to_dot() const;

 private:
  struct Claim {
    int value;
    long time;
    int refs;
  };
  int index(int resource, int slot) const { return resource * ii_ + slot; }
  bool search(RNode from, RNode to, bool same_cycle) const;

  const RoutingGraph* rg_;
  int ii_;
  int hop_limit_;
  std::vector<std::vector<MrrgArc>> arcs_;
  std::vector<std::vector<Claim>> claims_;
  std::vector<double> history_;
};

}  // namespace cgra
