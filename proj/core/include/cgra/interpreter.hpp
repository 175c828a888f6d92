#pragma once

#include <vector>

#include "cgra/dfg.hpp"
#include "cgra/layout.hpp"
#include "cgra/memory.hpp"

namespace cgra {

// Sequential reference semantics of a DFG loop body: iteration k runs to
// completion (in dependence order) before iteration k+1 starts. Recurrence
// state lives in the interpreter, so run(n) followed by run(m) equals run(n+m).
class Interpreter {
 public:
  Interpreter(const Dfg& dfg, const LayoutFile& layout);

  void run(MemoryImage& mem, int iterations);
  int iterations_done() const { return iteration_; }

  // Values produced by the most recent iteration, indexed by node.
  const std::vector<Tagged>& last_values() const;

 private:
  Tagged history(int node, int distance) const;

  Dfg dfg_;
  std::vector<int> order_;
  std::vector<int> depth_;                   // ring size per node
  std::vector<std::vector<Tagged>> values_;  // ring buffers of past results
  std::vector<Tagged> last_;
  int iteration_ = 0;
};

MemoryImage reference_execute(const Dfg& dfg, const MemoryImage& mem, const LayoutFile& layout, int iterations);

}  // namespace cgra
