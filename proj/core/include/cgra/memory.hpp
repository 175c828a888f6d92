#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cgra/word.hpp"

namespace cgra {

class RoutingGraph;

struct MemoryGeometry {
  std::vector<int> bank_depths;
  int word_width = 32;
};

MemoryGeometry memory_geometry(const RoutingGraph& rg);

// Scratchpad contents: one flat word-addressed array per bank.
struct MemoryImage {
  int word_width = 32;
  std::vector<std::vector<Word>> banks;

  static MemoryImage zeros(const MemoryGeometry& geometry);

  friend bool operator==(const MemoryImage&, const MemoryImage&) = default;
};

// One word per line, lowercase hex, zero-padded to the word width.
std::string bank_to_hex(const std::vector<Word>& bank, int word_width);
std::vector<Word> bank_from_hex(std::string_view text, int word_width);

}  // namespace cgra
