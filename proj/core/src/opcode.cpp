#include "cgra/opcode.hpp"

#include <array>

namespace cgra {
namespace {

constexpr std::array<std::string_view, kOpcodeCount> kNames = {
    "ADD", "SUB",    "MUL",  "AND",   "OR",  "XOR",   "SHL",  "SHR",  "CMP",
    "CMPEQ", "CMPLT", "SELECT", "LOAD", "STORE", "NOP", "CONST", "ROUTE"};

}  // namespace

std::string_view opcode_name(Opcode op) { return kNames[static_cast<int>(op)]; }

std::optional<Opcode> parse_opcode(std::string_view name) {
  for (int i = 0; i < kOpcodeCount; ++i)
    if (kNames[i] == name) return static_cast<Opcode>(i);
  return std::nullopt;
}

Word alu_eval(Opcode op, Word l, Word r, Word constant, int width) {
  const Word shift = r % static_cast<Word>(width);
  switch (op) {
    case Opcode::ADD: return truncate(l + r, width);
    case Opcode::SUB: return truncate(l - r, width);
    case Opcode::MUL: return truncate(l * r, width);
    case Opcode::AND: return truncate(l & r, width);
    case Opcode::OR: return truncate(l | r, width);
    case Opcode::XOR: return truncate(l ^ r, width);
    case Opcode::SHL: return truncate(l << shift, width);
    case Opcode::SHR: return truncate(l, width) >> shift;
    case Opcode::CMP: return to_signed(l, width) > to_signed(r, width) ? 1 : 0;
    case Opcode::CMPEQ: return truncate(l, width) == truncate(r, width) ? 1 : 0;
    case Opcode::CMPLT: return to_signed(l, width) < to_signed(r, width) ? 1 : 0;
    case Opcode::CONST: return truncate(constant, width);
    case Opcode::NOP:
    case Opcode::ROUTE: return truncate(l, width);
    case Opcode::SELECT:
    case Opcode::LOAD:
    case Opcode::STORE: break;
  }
  return 0;
}

bool predicate_allows(const std::optional<Tagged>& pred) {
  return !pred || (pred->valid && pred->word != 0);
}

Tagged evaluate(Opcode op, const Operands& in, Word constant, int width) {
  if (op == Opcode::SELECT) {
    if (in.left.valid && in.right.valid) {
      if (!in.pred || !in.pred->valid) return {};
      return in.pred->word != 0 ? in.left : in.right;
    }
    if (in.left.valid) return in.left;
    if (in.right.valid) return in.right;
    return {};
  }
  if (!predicate_allows(in.pred)) return {};
  switch (op) {
    case Opcode::CONST: return {truncate(constant, width), true};
    case Opcode::NOP:
    case Opcode::ROUTE:
      if (!in.left.valid) return {};
      return {truncate(in.left.word, width), true};
    default: break;
  }
  if (!in.left.valid || !in.right.valid) return {};
  return {alu_eval(op, in.left.word, in.right.word, constant, width), true};
}

std::optional<Word> memory_address(Opcode op, const Operands& in, bool left_wired, Word base, int width) {
  if (!predicate_allows(in.pred)) return std::nullopt;
  if (left_wired && !in.left.valid) return std::nullopt;
  if (op == Opcode::STORE && !in.right.valid) return std::nullopt;
  return truncate(base + (left_wired ? in.left.word : 0), width);
}

}  // namespace cgra
