#include "cgra/layout.hpp"

#include <algorithm>

#include "cgra/arch.hpp"
#include "cgra/error.hpp"
#include "json_util.hpp"

namespace cgra {

using detail::check_fields;
using detail::get_field;
using detail::json;

const LayoutEntry* LayoutFile::find(std::string_view var) const {
  for (const auto& e : entries)
    if (e.var == var) return &e;
  return nullptr;
}

LayoutFile assign_layout(const Dfg& dfg, const MemoryGeometry& geometry, const std::map<std::string, int>& sizes) {
  // First-use order over the node list, then any declared-but-unused variables.
  std::vector<std::string> order;
  auto note = [&](const std::string& v) {
    if (!v.empty() && std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
  };
  for (const auto& n : dfg.nodes) note(n.variable);
  for (const auto& v : dfg.variables) note(v.name);

  const int banks = static_cast<int>(geometry.bank_depths.size());
  std::vector<int> low(banks, 0);
  std::vector<int> high = geometry.bank_depths;  // scalars grow down from here
  LayoutFile layout;
  int next = 0;
  for (const auto& var : order) {
    auto it = sizes.find(var);
    if (it == sizes.end()) throw Error(ErrorCode::MissingVariable, "no size given for '" + var + "'");
    const int length = it->second;
    const Variable* decl = dfg.find_variable(var);
    const bool scalar = decl && decl->scalar;
    int chosen = -1;
    for (int probe = 0; probe < banks && chosen < 0; ++probe) {
      int b = (next + probe) % banks;
      if (high[b] - low[b] >= length) chosen = b;
    }
    if (chosen < 0) throw Error(ErrorCode::BankOverflow, "'" + var + "' does not fit in any bank");
    if (scalar) {
      high[chosen] -= length;
      layout.entries.push_back({var, chosen, high[chosen], length});
    } else {
      layout.entries.push_back({var, chosen, low[chosen], length});
      low[chosen] += length;
    }
    next = (chosen + 1) % banks;
  }
  return layout;
}

LayoutFile assign_layout(const Dfg& dfg, const MemoryGeometry& geometry) {
  std::map<std::string, int> sizes;
  for (const auto& v : dfg.variables) sizes[v.name] = v.length;
  return assign_layout(dfg, geometry, sizes);
}

LayoutFile assign_layout(const Dfg& dfg, const ArchSpec& spec, const std::map<std::string, int>& sizes) {
  return assign_layout(dfg, memory_geometry(elaborate(spec)), sizes);
}

Dfg embed_addresses(const Dfg& dfg, const LayoutFile& layout) {
  Dfg out = dfg;
  for (auto& n : out.nodes) {
    if (!is_memory(n.opcode)) continue;
    const LayoutEntry* e = layout.find(n.variable);
    if (!e) throw Error(ErrorCode::MissingVariable, "layout has no entry for '" + n.variable + "'");
    n.constant = e->base;
    n.bank = e->bank;
  }
  return out;
}

LayoutFile parse_layout(std::string_view text) {
  json j = detail::parse_json(text, "layout file");
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, "layout file must be an array");
  LayoutFile layout;
  for (const auto& ej : j) {
    check_fields(ej, {"var", "bank", "base", "len"}, "layout entry");
    layout.entries.push_back({get_field<std::string>(ej, "var", "layout"), get_field<int>(ej, "bank", "layout"),
                              get_field<int>(ej, "base", "layout"), get_field<int>(ej, "len", "layout")});
  }
  return layout;
}

std::string serialize_layout(const LayoutFile& layout) {
  json arr = json::array();
  for (const auto& e : layout.entries)
    arr.push_back({{"var", e.var}, {"bank", e.bank}, {"base", e.base}, {"len", e.length}});
  return arr.dump(1) + "\n";
}

}  // namespace cgra
