#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cgra/opcode.hpp"

namespace cgra {

enum class EdgeKind { Data, Predicate, Recurrence };
enum class OperandSlot { Left = 0, Right = 1, Pred = 2 };

std::string_view edge_kind_name(EdgeKind kind);
std::string_view slot_name(OperandSlot slot);

struct DfgNode {
  std::string id;
  Opcode opcode = Opcode::NOP;
  std::optional<std::int64_t> constant;
  // Memory nodes: address = constant + offset + left operand (when wired).
  std::string variable;
  std::int64_t offset = 0;
  int bank = -1;  // filled in by embed_addresses
  int asap = 0;
  int alap = 0;

  Word constant_word(int width) const { return truncate_signed(constant.value_or(0), width); }
  friend bool operator==(const DfgNode&, const DfgNode&) = default;
};

struct DfgEdge {
  int src = 0;
  int dst = 0;
  EdgeKind kind = EdgeKind::Data;
  OperandSlot slot = OperandSlot::Left;
  int distance = 0;       // iterations; >= 1 only for recurrence edges
  std::int64_t init = 0;  // value seen by the first `distance` iterations

  friend bool operator==(const DfgEdge&, const DfgEdge&) = default;
};

struct Variable {
  std::string name;
  int length = 1;  // words
  bool scalar = false;

  friend bool operator==(const Variable&, const Variable&) = default;
};

class Dfg {
 public:
  std::string name;
  std::vector<std::string> tags;
  std::vector<DfgNode> nodes;
  std::vector<DfgEdge> edges;
  std::vector<Variable> variables;
  std::vector<std::string> live_in;
  std::vector<std::string> live_out;
  std::optional<int> iteration_count_hint;

  int size() const { return static_cast<int>(nodes.size()); }
  int index_of(std::string_view id) const;  // -1 if absent
  const Variable* find_variable(std::string_view name) const;
  // Edge feeding `slot` of `node`, or nullptr when the slot is unwired.
  const DfgEdge* operand(int node, OperandSlot slot) const;
  std::vector<int> in_edges(int node) const;
  std::vector<int> out_edges(int node) const;
  // Nodes in dependence order over data and predicate edges; ties keep file order.
  std::vector<int> topological_order() const;

  friend bool operator==(const Dfg&, const Dfg&) = default;
};

// Parses and validates a DFG document. Rejects non-recurrence cycles
// (CycleError) and recurrence edges with distance < 1 (BadDistance).
Dfg parse_dfg(std::string_view text);
std::string serialize_dfg(const Dfg& dfg);
Dfg load_dfg_file(const std::string& path);
// Accepts "kernel:NAME" for a bundled kernel or a filesystem path.
Dfg resolve_dfg(const std::string& dfg_ref);

std::vector<std::string> kernel_names();
Dfg bundled_kernel(std::string_view name);

// Unit-latency ASAP/ALAP over data and predicate edges.
Dfg compute_asap_alap(const Dfg& dfg);

}  // namespace cgra
