#include "cgra/interpreter.hpp"

#include <algorithm>

#include "cgra/error.hpp"

namespace cgra {

Interpreter::Interpreter(const Dfg& dfg, const LayoutFile& layout)
    : dfg_(embed_addresses(dfg, layout)), order_(dfg_.topological_order()) {
  depth_.assign(dfg_.nodes.size(), 1);
  for (const auto& e : dfg_.edges)
    if (e.kind == EdgeKind::Recurrence) depth_[e.src] = std::max(depth_[e.src], e.distance + 1);
  values_.resize(dfg_.nodes.size());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i].assign(depth_[i], Tagged{});
  last_.assign(dfg_.nodes.size(), Tagged{});
}

const std::vector<Tagged>& Interpreter::last_values() const { return last_; }

Tagged Interpreter::history(int node, int distance) const {
  const int k = iteration_ - distance;
  return values_[node][k % depth_[node]];
}

void Interpreter::run(MemoryImage& mem, int iterations) {
  const int width = mem.word_width;
  for (int it = 0; it < iterations; ++it, ++iteration_) {
    for (int n : order_) {
      const DfgNode& node = dfg_.nodes[n];
      const Word constant = node.constant_word(width);
      auto fetch = [&](OperandSlot slot, bool& wired) -> Tagged {
        const DfgEdge* e = dfg_.operand(n, slot);
        wired = e != nullptr;
        if (!e) return {constant, true};
        if (e->kind != EdgeKind::Recurrence) return values_[e->src][iteration_ % depth_[e->src]];
        if (iteration_ < e->distance) return {truncate_signed(e->init, width), true};
        return history(e->src, e->distance);
      };
      bool left_wired = false, right_wired = false, pred_wired = false;
      Operands in;
      in.left = fetch(OperandSlot::Left, left_wired);
      in.right = fetch(OperandSlot::Right, right_wired);
      Tagged pred = fetch(OperandSlot::Pred, pred_wired);
      if (pred_wired) in.pred = pred;

      Tagged result;
      if (is_memory(node.opcode)) {
        const Word base = truncate(constant + static_cast<Word>(node.offset), width);
        auto addr = memory_address(node.opcode, in, left_wired, base, width);
        if (addr) {
          if (node.bank < 0 || node.bank >= static_cast<int>(mem.banks.size()))
            throw Error(ErrorCode::OutOfBoundsAccess, "node '" + node.id + "' targets a missing bank");
          auto& bank = mem.banks[node.bank];
          if (*addr >= bank.size())
            throw Error(ErrorCode::OutOfBoundsAccess,
                        "node '" + node.id + "' accesses address " + std::to_string(*addr) + " in bank " +
                            std::to_string(node.bank));
          if (node.opcode == Opcode::LOAD)
            result = {bank[*addr], true};
          else
            bank[*addr] = truncate(in.right.word, width);
        }
      } else {
        result = evaluate(node.opcode, in, constant, width);
      }
      values_[n][iteration_ % depth_[n]] = result;
      last_[n] = result;
    }
  }
}

MemoryImage reference_execute(const Dfg& dfg, const MemoryImage& mem, const LayoutFile& layout, int iterations) {
  MemoryImage out = mem;
  Interpreter interp(dfg, layout);
  interp.run(out, iterations);
  return out;
}

}  // namespace cgra
