#pragma once

#include <string>
#include <vector>

#include "cgra/arch.hpp"
#include "cgra/dfg.hpp"
#include "cgra/interpreter.hpp"
#include "cgra/layout.hpp"
#include "cgra/memory.hpp"
#include "json.hpp"

namespace support {

using json = nlohmann::ordered_json;

inline cgra::RoutingGraph fabric(const std::string& name) { return cgra::elaborate(cgra::preset(name)); }

inline json preset_json(const std::string& name) { return json::parse(cgra::preset_document(name)); }

inline int fu_index(const cgra::RoutingGraph& rg, const std::string& name) {
  for (int f = 0; f < static_cast<int>(rg.fus.size()); ++f)
    if (rg.fus[f].name == name) return f;
  return -1;
}

// Writes `values` into variable `var` of a memory image laid out by `layout`.
inline void poke(cgra::MemoryImage& mem, const cgra::LayoutFile& layout, const std::string& var,
                 const std::vector<long long>& values) {
  const auto* e = layout.find(var);
  for (std::size_t i = 0; i < values.size(); ++i)
    mem.banks[e->bank][e->base + i] = cgra::truncate_signed(values[i], mem.word_width);
}

inline std::vector<long long> peek(const cgra::MemoryImage& mem, const cgra::LayoutFile& layout,
                                   const std::string& var) {
  const auto* e = layout.find(var);
  std::vector<long long> out;
  for (int i = 0; i < e->length; ++i) {
    auto w = mem.banks[e->bank][e->base + i];
    out.push_back(cgra::to_signed(w, mem.word_width));
  }
  return out;
}

// Uniform banks for layout and interpreter tests.
inline cgra::MemoryGeometry geometry(int banks = 2, int depth = 64) {
  cgra::MemoryGeometry g;
  g.bank_depths.assign(banks, depth);
  return g;
}

}  // namespace support

namespace support {

// Builds and validates a DFG from inline JSON fragments.
inline cgra::Dfg make_dfg(const json& nodes, const json& edges, const json& variables = json::array()) {
  json doc{{"name", "t"}, {"variables", variables}, {"nodes", nodes}, {"edges", edges}};
  return cgra::parse_dfg(doc.dump());
}

inline json edge(const std::string& src, const std::string& dst, const std::string& slot = "left") {
  return {{"src", src}, {"dst", dst}, {"kind", "data"}, {"slot", slot}};
}

inline json back_edge(const std::string& src, const std::string& dst, int distance, const std::string& slot = "right") {
  return {{"src", src}, {"dst", dst}, {"kind", "recurrence"}, {"slot", slot}, {"distance", distance}};
}

}  // namespace support

namespace support {

// Kernel with its layout and embedded addresses for `rg`.
struct Prepared {
  cgra::Dfg dfg;
  cgra::LayoutFile layout;
};

inline Prepared prepare(const cgra::Dfg& dfg, const cgra::RoutingGraph& rg) {
  Prepared p;
  p.layout = cgra::assign_layout(dfg, cgra::memory_geometry(rg));
  p.dfg = cgra::embed_addresses(dfg, p.layout);
  return p;
}

inline Prepared prepare(const std::string& kernel, const cgra::RoutingGraph& rg) {
  return prepare(cgra::bundled_kernel(kernel), rg);
}

}  // namespace support
