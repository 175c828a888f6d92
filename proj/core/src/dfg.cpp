#include "cgra/dfg.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "cgra/error.hpp"
#include "embedded.hpp"
#include "json_util.hpp"

namespace cgra {

using detail::check_fields;
using detail::get_field;
using detail::get_or;
using detail::json;

std::string_view edge_kind_name(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Data: return "data";
    case EdgeKind::Predicate: return "predicate";
    case EdgeKind::Recurrence: return "recurrence";
  }
  return "?";
}

std::string_view slot_name(OperandSlot slot) {
  switch (slot) {
    case OperandSlot::Left: return "left";
    case OperandSlot::Right: return "right";
    case OperandSlot::Pred: return "pred";
  }
  return "?";
}

int Dfg::index_of(std::string_view id) const {
  for (int i = 0; i < size(); ++i)
    if (nodes[i].id == id) return i;
  return -1;
}

const Variable* Dfg::find_variable(std::string_view var) const {
  for (const auto& v : variables)
    if (v.name == var) return &v;
  return nullptr;
}

const DfgEdge* Dfg::operand(int node, OperandSlot slot) const {
  for (const auto& e : edges)
    if (e.dst == node && e.slot == slot) return &e;
  return nullptr;
}

std::vector<int> Dfg::in_edges(int node) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(edges.size()); ++i)
    if (edges[i].dst == node) out.push_back(i);
  return out;
}

std::vector<int> Dfg::out_edges(int node) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(edges.size()); ++i)
    if (edges[i].src == node) out.push_back(i);
  return out;
}

std::vector<int> Dfg::topological_order() const {
  std::vector<int> indegree(nodes.size(), 0);
  for (const auto& e : edges)
    if (e.kind != EdgeKind::Recurrence) ++indegree[e.dst];
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int i = 0; i < size(); ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<int> order;
  while (!ready.empty()) {
    int n = ready.top();
    ready.pop();
    order.push_back(n);
    for (const auto& e : edges)
      if (e.src == n && e.kind != EdgeKind::Recurrence && --indegree[e.dst] == 0) ready.push(e.dst);
  }
  return order;
}

namespace {

EdgeKind parse_edge_kind(const std::string& s) {
  for (auto k : {EdgeKind::Data, EdgeKind::Predicate, EdgeKind::Recurrence})
    if (edge_kind_name(k) == s) return k;
  throw Error(ErrorCode::SchemaError, "unknown edge kind '" + s + "'");
}

OperandSlot parse_slot(const std::string& s) {
  for (auto k : {OperandSlot::Left, OperandSlot::Right, OperandSlot::Pred})
    if (slot_name(k) == s) return k;
  throw Error(ErrorCode::SchemaError, "unknown operand slot '" + s + "'");
}

void validate(const Dfg& dfg) {
  std::set<std::string> ids;
  for (const auto& n : dfg.nodes) {
    if (!ids.insert(n.id).second) throw Error(ErrorCode::SchemaError, "duplicate node id '" + n.id + "'");
    if (n.opcode == Opcode::ROUTE) throw Error(ErrorCode::SchemaError, "ROUTE is not a DFG opcode");
    if (is_memory(n.opcode)) {
      if (n.variable.empty())
        throw Error(ErrorCode::SchemaError, "memory node '" + n.id + "' names no variable");
      if (!dfg.find_variable(n.variable))
        throw Error(ErrorCode::SchemaError, "node '" + n.id + "' uses undeclared variable '" + n.variable + "'");
    } else if (!n.variable.empty()) {
      throw Error(ErrorCode::SchemaError, "only LOAD/STORE nodes may name a variable");
    }
  }
  std::set<std::string> vars;
  for (const auto& v : dfg.variables) {
    if (!vars.insert(v.name).second) throw Error(ErrorCode::SchemaError, "duplicate variable '" + v.name + "'");
    if (v.length < 1) throw Error(ErrorCode::SchemaError, "variable '" + v.name + "' has length < 1");
    if (v.scalar && v.length != 1) throw Error(ErrorCode::SchemaError, "scalar '" + v.name + "' must have length 1");
  }
  for (const auto& list : {dfg.live_in, dfg.live_out})
    for (const auto& v : list)
      if (!vars.count(v)) throw Error(ErrorCode::SchemaError, "live variable '" + v + "' is not declared");

  std::set<std::pair<int, int>> slots;
  for (const auto& e : dfg.edges) {
    const std::string ctx = dfg.nodes[e.src].id + " -> " + dfg.nodes[e.dst].id;
    if (e.kind == EdgeKind::Recurrence) {
      if (e.distance < 1) throw Error(ErrorCode::BadDistance, ctx + ": recurrence distance must be >= 1");
    } else if (e.distance != 0) {
      throw Error(ErrorCode::BadDistance, ctx + ": only recurrence edges carry a distance");
    }
    if (e.kind == EdgeKind::Predicate && e.slot != OperandSlot::Pred)
      throw Error(ErrorCode::SchemaError, ctx + ": predicate edges must feed the pred slot");
    if (e.kind == EdgeKind::Data && e.slot == OperandSlot::Pred)
      throw Error(ErrorCode::SchemaError, ctx + ": data edges cannot feed the pred slot");
    if (dfg.nodes[e.src].opcode == Opcode::STORE)
      throw Error(ErrorCode::SchemaError, ctx + ": STORE produces no value");
    if (!slots.insert({e.dst, static_cast<int>(e.slot)}).second)
      throw Error(ErrorCode::SchemaError, ctx + ": operand slot driven twice");
  }
  for (int i = 0; i < dfg.size(); ++i) {
    const auto& n = dfg.nodes[i];
    if (n.opcode == Opcode::SELECT &&
        (!dfg.operand(i, OperandSlot::Left) || !dfg.operand(i, OperandSlot::Right) ||
         !dfg.operand(i, OperandSlot::Pred)))
      throw Error(ErrorCode::SchemaError, "SELECT '" + n.id + "' needs two data parents and a predicate");
    if (n.opcode == Opcode::STORE && !dfg.operand(i, OperandSlot::Right))
      throw Error(ErrorCode::SchemaError, "STORE '" + n.id + "' needs a data operand on the right slot");
  }
  if (static_cast<int>(dfg.topological_order().size()) != dfg.size())
    throw Error(ErrorCode::CycleError, "cycle through non-recurrence edges");
}

}  // namespace

Dfg parse_dfg(std::string_view text) {
  json j = detail::parse_json(text, "DFG document");
  check_fields(j, {"name", "tags", "iterations", "variables", "live_in", "live_out", "nodes", "edges"}, "dfg");
  Dfg dfg;
  dfg.name = get_or<std::string>(j, "name", "", "dfg");
  dfg.tags = get_or<std::vector<std::string>>(j, "tags", {}, "dfg");
  if (j.contains("iterations")) dfg.iteration_count_hint = get_field<int>(j, "iterations", "dfg");
  if (j.contains("variables")) {
    for (const auto& vj : j["variables"]) {
      check_fields(vj, {"name", "length", "scalar"}, "variable");
      Variable v;
      v.name = get_field<std::string>(vj, "name", "variable");
      v.scalar = get_or<bool>(vj, "scalar", false, "variable");
      v.length = get_or<int>(vj, "length", 1, "variable");
      dfg.variables.push_back(v);
    }
  }
  dfg.live_in = get_or<std::vector<std::string>>(j, "live_in", {}, "dfg");
  dfg.live_out = get_or<std::vector<std::string>>(j, "live_out", {}, "dfg");
  const auto& nodes = j.at("nodes");
  if (!nodes.is_array()) throw Error(ErrorCode::SchemaError, "nodes must be an array");
  for (const auto& nj : nodes) {
    check_fields(nj, {"id", "opcode", "constant", "variable", "offset", "bank"}, "node");
    DfgNode n;
    n.id = get_field<std::string>(nj, "id", "node");
    auto op = parse_opcode(get_field<std::string>(nj, "opcode", "node"));
    if (!op) throw Error(ErrorCode::SchemaError, "node '" + n.id + "': unknown opcode");
    n.opcode = *op;
    if (nj.contains("constant")) n.constant = get_field<std::int64_t>(nj, "constant", "node");
    n.variable = get_or<std::string>(nj, "variable", "", "node");
    n.offset = get_or<std::int64_t>(nj, "offset", 0, "node");
    n.bank = get_or<int>(nj, "bank", -1, "node");
    dfg.nodes.push_back(std::move(n));
  }
  if (j.contains("edges")) {
    for (const auto& ej : j["edges"]) {
      check_fields(ej, {"src", "dst", "kind", "slot", "distance", "init"}, "edge");
      DfgEdge e;
      auto src = get_field<std::string>(ej, "src", "edge");
      auto dst = get_field<std::string>(ej, "dst", "edge");
      e.src = dfg.index_of(src);
      e.dst = dfg.index_of(dst);
      if (e.src < 0 || e.dst < 0) throw Error(ErrorCode::SchemaError, "edge " + src + " -> " + dst + ": unknown node");
      e.kind = parse_edge_kind(get_or<std::string>(ej, "kind", "data", "edge"));
      e.slot = parse_slot(get_or<std::string>(
          ej, "slot", e.kind == EdgeKind::Predicate ? "pred" : "left", "edge"));
      e.distance = get_or<int>(ej, "distance", 0, "edge");
      e.init = get_or<std::int64_t>(ej, "init", 0, "edge");
      dfg.edges.push_back(e);
    }
  }
  validate(dfg);
  return dfg;
}

std::string serialize_dfg(const Dfg& dfg) {
  json j;
  if (!dfg.name.empty()) j["name"] = dfg.name;
  if (!dfg.tags.empty()) j["tags"] = dfg.tags;
  if (dfg.iteration_count_hint) j["iterations"] = *dfg.iteration_count_hint;
  json vars = json::array();
  for (const auto& v : dfg.variables) {
    json vj{{"name", v.name}, {"length", v.length}};
    if (v.scalar) vj["scalar"] = true;
    vars.push_back(vj);
  }
  j["variables"] = vars;
  j["live_in"] = dfg.live_in;
  j["live_out"] = dfg.live_out;
  json nodes = json::array();
  for (const auto& n : dfg.nodes) {
    json nj{{"id", n.id}, {"opcode", opcode_name(n.opcode)}};
    if (n.constant) nj["constant"] = *n.constant;
    if (!n.variable.empty()) nj["variable"] = n.variable;
    if (n.offset) nj["offset"] = n.offset;
    if (n.bank >= 0) nj["bank"] = n.bank;
    nodes.push_back(nj);
  }
  j["nodes"] = nodes;
  json edges = json::array();
  for (const auto& e : dfg.edges) {
    json ej{{"src", dfg.nodes[e.src].id},
            {"dst", dfg.nodes[e.dst].id},
            {"kind", edge_kind_name(e.kind)},
            {"slot", slot_name(e.slot)}};
    if (e.kind == EdgeKind::Recurrence) ej["distance"] = e.distance;
    if (e.init) ej["init"] = e.init;
    edges.push_back(ej);
  }
  j["edges"] = edges;
  return j.dump(1) + "\n";
}

Dfg load_dfg_file(const std::string& path) { return parse_dfg(detail::read_file(path)); }

Dfg resolve_dfg(const std::string& dfg_ref) {
  constexpr std::string_view kPrefix = "kernel:";
  if (dfg_ref.rfind(kPrefix, 0) == 0) return bundled_kernel(std::string_view(dfg_ref).substr(kPrefix.size()));
  return load_dfg_file(dfg_ref);
}

std::vector<std::string> kernel_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : embedded::kernels()) names.emplace_back(name);
  return names;
}

Dfg bundled_kernel(std::string_view name) {
  for (const auto& [n, text] : embedded::kernels())
    if (n == name) return parse_dfg(text);
  throw Error(ErrorCode::IoError, "no bundled kernel named '" + std::string(name) + "'");
}

Dfg compute_asap_alap(const Dfg& dfg) {
  Dfg out = dfg;
  const auto order = dfg.topological_order();
  for (auto& n : out.nodes) n.asap = 0;
  for (int n : order)
    for (const auto& e : dfg.edges)
      if (e.src == n && e.kind != EdgeKind::Recurrence)
        out.nodes[e.dst].asap = std::max(out.nodes[e.dst].asap, out.nodes[n].asap + 1);
  int critical = 0;
  for (const auto& n : out.nodes) critical = std::max(critical, n.asap);
  std::vector<int> to_sink(dfg.nodes.size(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (const auto& e : dfg.edges)
      if (e.src == *it && e.kind != EdgeKind::Recurrence)
        to_sink[*it] = std::max(to_sink[*it], to_sink[e.dst] + 1);
  for (int i = 0; i < out.size(); ++i) out.nodes[i].alap = critical - to_sink[i];
  return out;
}

}  // namespace cgra
