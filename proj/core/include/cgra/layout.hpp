#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cgra/dfg.hpp"
#include "cgra/memory.hpp"

namespace cgra {

struct ArchSpec;

struct LayoutEntry {
  std::string var;
  int bank = 0;
  int base = 0;
  int length = 1;

  friend bool operator==(const LayoutEntry&, const LayoutEntry&) = default;
};

struct LayoutFile {
  std::vector<LayoutEntry> entries;

  const LayoutEntry* find(std::string_view var) const;

  friend bool operator==(const LayoutFile&, const LayoutFile&) = default;
};

// Round-robin bank assignment keyed on first use in the node list. Arrays pack
// upward from address 0; scalars take fixed words from the top of the bank down.
LayoutFile assign_layout(const Dfg& dfg, const MemoryGeometry& geometry,
                         const std::map<std::string, int>& sizes);
LayoutFile assign_layout(const Dfg& dfg, const MemoryGeometry& geometry);
LayoutFile assign_layout(const Dfg& dfg, const ArchSpec& spec, const std::map<std::string, int>& sizes);

// Writes each memory node's base address into its constant and records its bank.
Dfg embed_addresses(const Dfg& dfg, const LayoutFile& layout);

LayoutFile parse_layout(std::string_view text);
std::string serialize_layout(const LayoutFile& layout);

}  // namespace cgra
