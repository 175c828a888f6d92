#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cgra/arch.hpp"
#include "cgra/dfg.hpp"
#include "cgra/layout.hpp"
#include "cgra/mapping.hpp"
#include "cgra/memory.hpp"

namespace cgra {

struct OperandCfg {
  bool wired = false;
  int distance = 0;        // recurrence distance; iterations below it read `init`
  std::int64_t init = 0;

  friend bool operator==(const OperandCfg&, const OperandCfg&) = default;
};

struct OpCfg {
  std::string node;  // DFG node id, empty for pass-through
  int fu = -1;
  Opcode opcode = Opcode::NOP;
  std::optional<std::int64_t> constant;
  int stage = 0;  // absolute time / ii
  int bank = -1;
  std::int64_t offset = 0;
  int mem_port = -1;
  std::array<OperandCfg, 3> operands{};  // left, right, pred

  friend bool operator==(const OpCfg&, const OpCfg&) = default;
};

// Crossbar or mux setting: `sink` takes the value of `source` in this cycle.
struct Select {
  int sink = 0;
  int source = 0;

  friend bool operator==(const Select&, const Select&) = default;
};

struct SlotCfg {
  std::vector<OpCfg> ops;
  std::vector<Select> selects;
  std::vector<Select> reg_writes;  // sink is a register, latched at end of cycle

  bool empty() const { return ops.empty() && selects.empty() && reg_writes.empty(); }
  friend bool operator==(const SlotCfg&, const SlotCfg&) = default;
};

struct IdleRange {
  int start = 0;
  int end = -1;  // inclusive; -1 means the PE is idle in every slot

  friend bool operator==(const IdleRange&, const IdleRange&) = default;
};

struct PeConfig {
  std::vector<SlotCfg> slots;  // size ii
  std::vector<IdleRange> idle;

  friend bool operator==(const PeConfig&, const PeConfig&) = default;
};

struct Bitstream {
  std::string arch_name;
  int ii = 1;
  int word_width = 32;
  int schedule_length = 0;  // max over ops of time + latency
  std::vector<PeConfig> pes;

  friend bool operator==(const Bitstream&, const Bitstream&) = default;
};

// Translates a legal mapping into per-PE per-slot configuration. Throws
// ConfigOverflow when II exceeds per-PE configuration memory and XbarConflict
// on a combinational loop. `dfg` must carry embedded addresses.
Bitstream extract_bitstream(const Dfg& dfg, const RoutingGraph& rg, const Mapping& m);

std::string serialize_bitstream(const Bitstream& bs, const RoutingGraph& rg);
Bitstream parse_bitstream(std::string_view text, const RoutingGraph& rg);

bool pe_idle_at(const PeConfig& pe, int slot);

struct SimStats {
  long cycles = 0;
  long pe_cycles = 0;
  long active_pe_cycles = 0;
  long gated_cycles = 0;
  long cm_reads = 0;
  long alu_ops = 0;
  long link_hops = 0;
  long reg_reads = 0;
  long reg_writes = 0;
  long mu_accesses = 0;
  std::vector<long> pe_active;

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

struct SimOptions {
  bool gating = true;
  std::ostream* trace = nullptr;
  // Called for every resource value the simulator evaluates: (cycle, resource, value).
  std::function<void(long, int, const Tagged&)> probe;
};

struct SimResult {
  MemoryImage memory;
  SimStats stats;
};

// Cycles simulated: (iterations - 1) * ii + schedule_length.
SimResult simulate(const RoutingGraph& rg, const Bitstream& bs, const MemoryImage& mem_in, int iterations,
                   const SimOptions& opts = {});

std::string stats_to_json(const SimStats& s);

struct EnergyModel {
  double cm_read = 4;
  double alu_op = 2;
  double link_hop = 1;
  double reg_rw = 1;
  double mu_access = 3;
  double leak_per_gated_cycle = 0.2;
};

struct EnergyReport {
  double total = 0;
  // Categories in fixed order: cm, alu, link, reg, mu, gated_leak.
  std::vector<std::pair<std::string, double>> breakdown;
  std::vector<std::pair<std::string, double>> percent;
};

EnergyModel parse_energy_model(std::string_view text);
EnergyReport estimate_energy(const SimStats& stats, const EnergyModel& model = {});
std::string energy_to_json(const EnergyReport& report);

}  // namespace cgra
