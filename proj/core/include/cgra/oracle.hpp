#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cgra/arch.hpp"
#include "cgra/dfg.hpp"
#include "cgra/layout.hpp"
#include "cgra/mapping.hpp"
#include "cgra/memory.hpp"
#include "cgra/simulator.hpp"

namespace cgra {

struct TestBundle {
  std::string kernel;
  std::string arch;
  std::uint64_t seed = 0;
  int iterations = 0;
  MemoryImage mem_in;
  MemoryImage expected;

  friend bool operator==(const TestBundle&, const TestBundle&) = default;
};

// Live-in variables get words from std::mt19937_64(seed), in layout order,
// masked to the word width; everything else starts at zero.
TestBundle gen_vectors(const Dfg& dfg, const LayoutFile& layout, const MemoryGeometry& geometry, std::uint64_t seed,
                       int iterations);

struct Mismatch {
  int bank = 0;
  Word addr = 0;
  Word got = 0;
  Word want = 0;
};

struct Verdict {
  bool pass = false;
  long mismatch_count = 0;
  std::vector<Mismatch> mismatches;  // first few only
  std::string error;                 // simulator exception, if any
  SimStats stats;
};

// PASS iff the simulated memory equals the bundle's expected image bit for bit.
// Never throws for simulation problems; they become a FAIL verdict.
Verdict validate(const RoutingGraph& rg, const Bitstream& bs, const LayoutFile& layout, const TestBundle& bundle,
                 const SimOptions& opts = {}, int max_report = 16);

std::string verdict_to_json(const Verdict& v, int word_width);

// Bundle on disk: bundle.json plus mem_in_b<N>.hex / expected_b<N>.hex.
void write_bundle(const std::string& dir, const TestBundle& bundle);
TestBundle read_bundle(const std::string& dir);

// ---------------------------------------------------------------------------
// Fault injection
// ---------------------------------------------------------------------------

enum class FaultKind { Opcode, Select, Constant };

struct Fault {
  FaultKind kind = FaultKind::Opcode;
  int pe = 0;
  int slot = 0;
  int index = 0;            // op index, or select index within selects/reg_writes
  bool reg_write = false;   // Select faults: index refers to reg_writes
  Opcode opcode = Opcode::NOP;        // new opcode
  int source = -1;                    // new select source, -1 removes the select
  std::optional<std::int64_t> constant;  // new constant
  std::string description;
};

Fault random_fault(const Bitstream& bs, const RoutingGraph& rg, std::mt19937_64& rng);
Bitstream apply_fault(const Bitstream& bs, const Fault& f);

// Dead-field whitelist. A fault is provably dead when:
//  - it changes the constant of an op that never reads its constant;
//  - it swaps a select source for one carrying the same (value, time);
//  - it swaps an opcode for another that, given the op's constant operand, is
//    also the identity on its left operand (e.g. ADD 0 vs OR 0 vs ROUTE).
// Returns a reason, or an empty string when the field is live.
std::string dead_field_reason(const Bitstream& bs, const Dfg& dfg, const Mapping& m, const Fault& f);

}  // namespace cgra
