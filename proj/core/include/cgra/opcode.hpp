#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cgra/word.hpp"

namespace cgra {

enum class Opcode {
  ADD,
  SUB,
  MUL,
  AND,
  OR,
  XOR,
  SHL,
  SHR,
  CMP,    // signed left > right
  CMPEQ,
  CMPLT,  // signed left < right
  SELECT,
  LOAD,
  STORE,
  NOP,    // forwards its left operand
  CONST,  // produces the node constant
  ROUTE,  // fabric-only pass-through of the left operand; never appears in a DFG
};

inline constexpr int kOpcodeCount = static_cast<int>(Opcode::ROUTE) + 1;

std::string_view opcode_name(Opcode op);
std::optional<Opcode> parse_opcode(std::string_view name);

inline bool is_memory(Opcode op) { return op == Opcode::LOAD || op == Opcode::STORE; }

// Operand values as an executing node sees them. Unwired data slots carry the
// node constant; an absent predicate means the node is unpredicated.
struct Operands {
  Tagged left;
  Tagged right;
  std::optional<Tagged> pred;
};

bool predicate_allows(const std::optional<Tagged>& pred);

// Non-memory node semantics with validity propagation: strict for every
// opcode except SELECT, which forwards whichever side is valid.
Tagged evaluate(Opcode op, const Operands& in, Word constant, int width);

// Effective address of a LOAD/STORE, or nullopt when the access is squashed
// (false predicate, invalid address operand, or invalid store data).
std::optional<Word> memory_address(Opcode op, const Operands& in, bool left_wired, Word base, int width);

// Pure two-operand ALU semantics. Memory ops, SELECT and predication are handled
// by the interpreters; this covers the arithmetic core shared by both of them.
Word alu_eval(Opcode op, Word left, Word right, Word constant, int width);

}  // namespace cgra
