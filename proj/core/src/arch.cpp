#include "cgra/arch.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>

#include "cgra/error.hpp"
#include "embedded.hpp"
#include "json_util.hpp"

namespace cgra {

using detail::check_fields;
using detail::get_field;
using detail::get_or;
using detail::json;

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << contents;
}

}  // namespace detail

namespace {

std::string_view kind_name(ModuleKind k) {
  switch (k) {
    case ModuleKind::Composite: return "Composite";
    case ModuleKind::FU: return "FU";
    case ModuleKind::RF: return "RF";
    case ModuleKind::MU: return "MU";
  }
  return "?";
}

std::string_view role_name(PortRole r) {
  switch (r) {
    case PortRole::Auto: return "auto";
    case PortRole::Left: return "left";
    case PortRole::Right: return "right";
    case PortRole::Pred: return "pred";
    case PortRole::Result: return "result";
    case PortRole::Mem: return "mem";
  }
  return "?";
}

ModuleKind parse_kind(const std::string& s, std::string_view ctx) {
  for (auto k : {ModuleKind::Composite, ModuleKind::FU, ModuleKind::RF, ModuleKind::MU})
    if (kind_name(k) == s) return k;
  throw Error(ErrorCode::SchemaError, std::string(ctx) + ": unknown module kind '" + s + "'");
}

PortRole parse_role(const std::string& s, std::string_view ctx) {
  for (auto r : {PortRole::Auto, PortRole::Left, PortRole::Right, PortRole::Pred, PortRole::Result,
                 PortRole::Mem})
    if (role_name(r) == s) return r;
  throw Error(ErrorCode::SchemaError, std::string(ctx) + ": unknown port role '" + s + "'");
}

std::vector<InstanceDecl> parse_instances(const json& arr, const std::string& ctx) {
  if (!arr.is_array()) throw Error(ErrorCode::SchemaError, ctx + ": instances must be an array");
  std::vector<InstanceDecl> out;
  for (const auto& j : arr) {
    check_fields(j, {"name", "module"}, ctx + ".instances[]");
    out.push_back({get_field<std::string>(j, "name", ctx), get_field<std::string>(j, "module", ctx)});
  }
  return out;
}

std::vector<Connection> parse_connections(const json& arr, const std::string& ctx) {
  if (!arr.is_array()) throw Error(ErrorCode::SchemaError, ctx + ": connections must be an array");
  std::vector<Connection> out;
  for (const auto& j : arr) {
    check_fields(j, {"from", "to"}, ctx + ".connections[]");
    out.push_back({get_field<std::string>(j, "from", ctx), get_field<std::string>(j, "to", ctx)});
  }
  return out;
}

ModuleDecl parse_module(const json& j) {
  check_fields(j,
               {"name", "kind", "ports", "opcodes", "registers", "read_ports", "write_ports", "banks",
                "bank_depth", "bank_width", "instances", "connections"},
               "module");
  ModuleDecl m;
  m.name = get_field<std::string>(j, "name", "module");
  const std::string ctx = "module '" + m.name + "'";
  m.kind = parse_kind(get_field<std::string>(j, "kind", ctx), ctx);

  auto only_for = [&](std::initializer_list<std::string_view> keys, ModuleKind kind) {
    for (auto k : keys)
      if (j.contains(k) && m.kind != kind)
        throw Error(ErrorCode::SchemaError,
                    ctx + ": field '" + std::string(k) + "' not valid for kind " + std::string(kind_name(m.kind)));
  };
  only_for({"opcodes"}, ModuleKind::FU);
  only_for({"registers", "read_ports", "write_ports"}, ModuleKind::RF);
  only_for({"banks", "bank_depth", "bank_width"}, ModuleKind::MU);
  only_for({"instances", "connections"}, ModuleKind::Composite);

  if (j.contains("ports")) {
    if (!j["ports"].is_array()) throw Error(ErrorCode::SchemaError, ctx + ": ports must be an array");
    for (const auto& pj : j["ports"]) {
      check_fields(pj, {"name", "dir", "width", "role"}, ctx + ".ports[]");
      PortDecl p;
      p.name = get_field<std::string>(pj, "name", ctx);
      auto dir = get_field<std::string>(pj, "dir", ctx);
      if (dir == "in")
        p.dir = PortDir::In;
      else if (dir == "out")
        p.dir = PortDir::Out;
      else
        throw Error(ErrorCode::SchemaError, ctx + ": port direction must be 'in' or 'out'");
      p.width = get_or<int>(pj, "width", 0, ctx);
      p.role = parse_role(get_or<std::string>(pj, "role", "auto", ctx), ctx);
      m.ports.push_back(std::move(p));
    }
  }
  if (j.contains("opcodes")) {
    const auto& oj = j["opcodes"];
    if (!oj.is_object()) throw Error(ErrorCode::SchemaError, ctx + ": opcodes must be an object");
    for (const auto& [name, lat] : oj.items()) {
      auto op = parse_opcode(name);
      if (!op || *op == Opcode::ROUTE)
        throw Error(ErrorCode::SchemaError, ctx + ": unknown opcode '" + name + "'");
      if (!lat.is_number_integer()) throw Error(ErrorCode::SchemaError, ctx + ": latency must be an integer");
      m.opcodes[*op] = lat.get<int>();
    }
  }
  m.registers = get_or<int>(j, "registers", 0, ctx);
  m.read_ports = get_or<int>(j, "read_ports", 1, ctx);
  m.write_ports = get_or<int>(j, "write_ports", 1, ctx);
  m.banks = get_or<int>(j, "banks", 0, ctx);
  m.bank_depth = get_or<int>(j, "bank_depth", 0, ctx);
  m.bank_width = get_or<int>(j, "bank_width", 0, ctx);
  if (j.contains("instances")) m.instances = parse_instances(j["instances"], ctx);
  if (j.contains("connections")) m.connections = parse_connections(j["connections"], ctx);
  return m;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Endpoint {
  const PortDecl* port = nullptr;
  bool own = false;  // port of the enclosing composite rather than of a child
};

Endpoint resolve_endpoint(const ArchSpec& spec, const ModuleDecl* parent,
                          const std::vector<InstanceDecl>& children, const std::string& ref,
                          const std::string& ctx) {
  auto dot = ref.find('.');
  if (dot == std::string::npos) {
    if (!parent) throw Error(ErrorCode::DanglingPort, ctx + ": top-level endpoint '" + ref + "' needs instance.port");
    const PortDecl* p = parent->find_port(ref);
    if (!p) throw Error(ErrorCode::DanglingPort, ctx + ": no port '" + ref + "'");
    return {p, true};
  }
  auto inst = ref.substr(0, dot);
  auto port = ref.substr(dot + 1);
  auto it = std::find_if(children.begin(), children.end(), [&](const auto& c) { return c.name == inst; });
  if (it == children.end()) throw Error(ErrorCode::DanglingPort, ctx + ": no instance '" + inst + "'");
  const ModuleDecl* m = spec.find_module(it->module);
  const PortDecl* p = m ? m->find_port(port) : nullptr;
  if (!p) throw Error(ErrorCode::DanglingPort, ctx + ": no port '" + ref + "'");
  return {p, false};
}

void validate_connections(const ArchSpec& spec, const ModuleDecl* parent,
                          const std::vector<InstanceDecl>& children,
                          const std::vector<Connection>& conns, const std::string& ctx) {
  for (const auto& c : conns) {
    auto from = resolve_endpoint(spec, parent, children, c.from, ctx);
    auto to = resolve_endpoint(spec, parent, children, c.to, ctx);
    // A driver is a child output or our own input; a sink is a child input or our own output.
    bool from_ok = from.own ? from.port->dir == PortDir::In : from.port->dir == PortDir::Out;
    bool to_ok = to.own ? to.port->dir == PortDir::Out : to.port->dir == PortDir::In;
    if (!from_ok || !to_ok)
      throw Error(ErrorCode::DirectionMismatch, ctx + ": " + c.from + " -> " + c.to);
  }
}

void validate_instances(const ArchSpec& spec, const std::vector<InstanceDecl>& insts, const std::string& ctx) {
  std::set<std::string> seen;
  for (const auto& i : insts) {
    if (!seen.insert(i.name).second)
      throw Error(ErrorCode::SchemaError, ctx + ": duplicate instance name '" + i.name + "'");
    if (i.name.find('.') != std::string::npos || i.name.find('>') != std::string::npos)
      throw Error(ErrorCode::SchemaError, ctx + ": instance names may not contain '.' or '>'");
    if (!spec.find_module(i.module))
      throw Error(ErrorCode::SchemaError, ctx + ": unknown module '" + i.module + "'");
  }
}

void validate(const ArchSpec& spec) {
  if (spec.hop_limit < 1) throw Error(ErrorCode::SchemaError, "hop_limit must be >= 1");
  if (spec.word_width < 1 || spec.word_width > 64)
    throw Error(ErrorCode::SchemaError, "word_width must be in [1, 64]");
  if (spec.config_bytes_per_pe < 0 || spec.instruction_bytes < 1)
    throw Error(ErrorCode::SchemaError, "bad configuration memory geometry");
  std::set<std::string> names;
  for (const auto& m : spec.modules) {
    const std::string ctx = "module '" + m.name + "'";
    if (!names.insert(m.name).second) throw Error(ErrorCode::SchemaError, "duplicate module '" + m.name + "'");
    std::set<std::string> ports;
    for (const auto& p : m.ports)
      if (!ports.insert(p.name).second) throw Error(ErrorCode::SchemaError, ctx + ": duplicate port '" + p.name + "'");
    switch (m.kind) {
      case ModuleKind::FU:
        if (m.opcodes.empty()) throw Error(ErrorCode::SchemaError, ctx + ": FU needs at least one opcode");
        for (auto [op, lat] : m.opcodes)
          if (lat < 0) throw Error(ErrorCode::SchemaError, ctx + ": negative latency");
        break;
      case ModuleKind::RF:
        if (m.registers < 1) throw Error(ErrorCode::SchemaError, ctx + ": RF needs >= 1 register");
        if (m.read_ports < 1 || m.write_ports < 1)
          throw Error(ErrorCode::SchemaError, ctx + ": RF needs read and write ports");
        break;
      case ModuleKind::MU:
        if (m.banks < 1) throw Error(ErrorCode::SchemaError, ctx + ": MU needs >= 1 bank");
        if (m.bank_depth < 1) throw Error(ErrorCode::SchemaError, ctx + ": MU bank depth must be >= 1");
        break;
      case ModuleKind::Composite: break;
    }
  }
  // Composite instantiation must be a DAG.
  std::map<std::string, int> state;
  std::function<void(const ModuleDecl&)> visit = [&](const ModuleDecl& m) {
    state[m.name] = 1;
    for (const auto& i : m.instances) {
      const ModuleDecl* child = spec.find_module(i.module);
      if (!child) throw Error(ErrorCode::SchemaError, "module '" + m.name + "': unknown module '" + i.module + "'");
      if (state[child->name] == 1) throw Error(ErrorCode::SchemaError, "recursive instantiation of '" + child->name + "'");
      if (state[child->name] == 0) visit(*child);
    }
    state[m.name] = 2;
  };
  for (const auto& m : spec.modules)
    if (state[m.name] == 0) visit(m);

  for (const auto& m : spec.modules) {
    if (m.kind != ModuleKind::Composite) continue;
    const std::string ctx = "module '" + m.name + "'";
    validate_instances(spec, m.instances, ctx);
    validate_connections(spec, &m, m.instances, m.connections, ctx);
  }
  validate_instances(spec, spec.instances, "top");
  validate_connections(spec, nullptr, spec.instances, spec.connections, "top");
}

json port_to_json(const PortDecl& p) {
  json j;
  j["name"] = p.name;
  j["dir"] = p.dir == PortDir::In ? "in" : "out";
  if (p.width) j["width"] = p.width;
  if (p.role != PortRole::Auto) j["role"] = role_name(p.role);
  return j;
}

json instances_to_json(const std::vector<InstanceDecl>& insts) {
  json arr = json::array();
  for (const auto& i : insts) arr.push_back({{"name", i.name}, {"module", i.module}});
  return arr;
}

json connections_to_json(const std::vector<Connection>& conns) {
  json arr = json::array();
  for (const auto& c : conns) arr.push_back({{"from", c.from}, {"to", c.to}});
  return arr;
}

}  // namespace

const PortDecl* ModuleDecl::find_port(std::string_view port) const {
  for (const auto& p : ports)
    if (p.name == port) return &p;
  return nullptr;
}

const ModuleDecl* ArchSpec::find_module(std::string_view module) const {
  for (const auto& m : modules)
    if (m.name == module) return &m;
  return nullptr;
}

int ArchSpec::max_config_ii() const {
  return config_bytes_per_pe == 0 ? 0 : config_bytes_per_pe / instruction_bytes;
}

ArchSpec parse_arch(std::string_view text) {
  json j = detail::parse_json(text, "architecture document");
  check_fields(j,
               {"name", "word_width", "hop_limit", "config_bytes_per_pe", "instruction_bytes", "modules",
                "instances", "connections"},
               "architecture");
  ArchSpec spec;
  spec.name = get_field<std::string>(j, "name", "architecture");
  spec.word_width = get_field<int>(j, "word_width", "architecture");
  spec.hop_limit = get_field<int>(j, "hop_limit", "architecture");
  spec.config_bytes_per_pe = get_or<int>(j, "config_bytes_per_pe", 0, "architecture");
  spec.instruction_bytes = get_or<int>(j, "instruction_bytes", 8, "architecture");
  const auto& mods = j.at("modules");
  if (!mods.is_array()) throw Error(ErrorCode::SchemaError, "modules must be an array");
  for (const auto& mj : mods) spec.modules.push_back(parse_module(mj));
  if (j.contains("instances")) spec.instances = parse_instances(j["instances"], "top");
  if (j.contains("connections")) spec.connections = parse_connections(j["connections"], "top");
  validate(spec);
  return spec;
}

std::string serialize_arch(const ArchSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["word_width"] = spec.word_width;
  j["hop_limit"] = spec.hop_limit;
  if (spec.config_bytes_per_pe) j["config_bytes_per_pe"] = spec.config_bytes_per_pe;
  j["instruction_bytes"] = spec.instruction_bytes;
  json mods = json::array();
  for (const auto& m : spec.modules) {
    json mj;
    mj["name"] = m.name;
    mj["kind"] = kind_name(m.kind);
    json ports = json::array();
    for (const auto& p : m.ports) ports.push_back(port_to_json(p));
    mj["ports"] = ports;
    switch (m.kind) {
      case ModuleKind::FU: {
        json ops = json::object();
        for (auto [op, lat] : m.opcodes) ops[std::string(opcode_name(op))] = lat;
        mj["opcodes"] = ops;
        break;
      }
      case ModuleKind::RF:
        mj["registers"] = m.registers;
        mj["read_ports"] = m.read_ports;
        mj["write_ports"] = m.write_ports;
        break;
      case ModuleKind::MU:
        mj["banks"] = m.banks;
        mj["bank_depth"] = m.bank_depth;
        if (m.bank_width) mj["bank_width"] = m.bank_width;
        break;
      case ModuleKind::Composite:
        mj["instances"] = instances_to_json(m.instances);
        mj["connections"] = connections_to_json(m.connections);
        break;
    }
    mods.push_back(mj);
  }
  j["modules"] = mods;
  j["instances"] = instances_to_json(spec.instances);
  j["connections"] = connections_to_json(spec.connections);
  return j.dump(1) + "\n";
}

ArchSpec load_arch_file(const std::string& path) { return parse_arch(detail::read_file(path)); }

ArchSpec resolve_arch(const std::string& arch_ref) {
  constexpr std::string_view kPrefix = "preset:";
  if (arch_ref.rfind(kPrefix, 0) == 0) return preset(std::string_view(arch_ref).substr(kPrefix.size()));
  return load_arch_file(arch_ref);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : embedded::presets()) names.emplace_back(name);
  return names;
}

std::string preset_document(std::string_view name) {
  for (const auto& [n, text] : embedded::presets())
    if (n == name) return std::string(text);
  throw Error(ErrorCode::UnknownPreset, "no preset named '" + std::string(name) + "'");
}

ArchSpec preset(std::string_view name) { return parse_arch(preset_document(name)); }

// ---------------------------------------------------------------------------
// Elaboration
// ---------------------------------------------------------------------------

std::string_view resource_kind_name(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::FuSlot: return "FuSlot";
    case ResourceKind::InPort: return "InPort";
    case ResourceKind::OutPort: return "OutPort";
    case ResourceKind::Link: return "Link";
    case ResourceKind::Reg: return "Reg";
    case ResourceKind::MuPort: return "MuPort";
  }
  return "?";
}

int FuInfo::latency_of(Opcode op) const {
  if (op == Opcode::ROUTE) return 1;
  auto it = latency.find(op);
  return it == latency.end() ? 1 : std::max(1, it->second);
}

int RoutingGraph::find(std::string_view name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

int RoutingGraph::total_banks() const {
  int n = 0;
  for (const auto& m : mus) n += m.banks;
  return n;
}

int RoutingGraph::mu_of_bank(int bank) const {
  for (int i = 0; i < static_cast<int>(mus.size()); ++i)
    if (bank >= mus[i].first_bank && bank < mus[i].first_bank + mus[i].banks) return i;
  return -1;
}

int RoutingGraph::bank_depth(int bank) const {
  int m = mu_of_bank(bank);
  return m < 0 ? 0 : mus[m].bank_depth;
}

std::vector<int> RoutingGraph::muxes() const {
  std::vector<int> out;
  for (const auto& r : resources)
    if ((r.kind == ResourceKind::InPort || r.kind == ResourceKind::OutPort) && fanin[r.id].size() >= 2)
      out.push_back(r.id);
  return out;
}

std::vector<int> RoutingGraph::fus_supporting(Opcode op) const {
  std::vector<int> out;
  for (int f = 0; f < static_cast<int>(fus.size()); ++f)
    if (fus[f].supports(op)) out.push_back(f);
  return out;
}

namespace detail {

class Elaborator {
 public:
  Elaborator(const ArchSpec& spec, RoutingGraph& g) : spec_(spec), g_(g) {}

  void run() {
    for (const auto& inst : spec_.instances) {
      const ModuleDecl& m = *spec_.find_module(inst.module);
      current_pe_ = contains_fu(m) ? static_cast<int>(g_.pes.size()) : -1;
      if (current_pe_ >= 0) g_.pes.push_back({inst.name, {}, {}});
      instantiate(m, inst.name);
    }
    connect("", spec_.connections);
  }

 private:
  struct PortResources {
    std::vector<int> as_source;
    std::vector<int> as_sink;
    bool composite = false;
  };

  bool contains_fu(const ModuleDecl& m) const {
    if (m.kind == ModuleKind::FU) return true;
    for (const auto& i : m.instances)
      if (contains_fu(*spec_.find_module(i.module))) return true;
    return false;
  }

  int add(ResourceKind kind, std::string name, int capacity = 1, int fu = -1) {
    int id = static_cast<int>(g_.resources.size());
    g_.resources.push_back({id, kind, name, capacity, current_pe_, fu});
    g_.fanout.emplace_back();
    g_.fanin.emplace_back();
    if (!g_.by_name_.emplace(name, id).second)
      throw Error(ErrorCode::SchemaError, "duplicate elaborated resource '" + name + "'");
    if (current_pe_ >= 0) g_.pes[current_pe_].resources.push_back(id);
    return id;
  }

  void arc(int from, int to) {
    auto& out = g_.fanout[from];
    if (std::find(out.begin(), out.end(), to) != out.end()) return;
    out.push_back(to);
    g_.fanin[to].push_back(from);
  }

  void instantiate(const ModuleDecl& m, const std::string& path) {
    auto top = path.substr(0, path.find('.'));
    pe_of_top_[top] = current_pe_;
    switch (m.kind) {
      case ModuleKind::Composite: {
        for (const auto& p : m.ports) {
          int id = add(p.dir == PortDir::In ? ResourceKind::InPort : ResourceKind::OutPort, path + "." + p.name);
          ports_[path + "." + p.name] = {{id}, {id}, true};
        }
        for (const auto& i : m.instances) instantiate(*spec_.find_module(i.module), path + "." + i.name);
        connect(path, m.connections);
        break;
      }
      case ModuleKind::FU: {
        int fu = static_cast<int>(g_.fus.size());
        FuInfo info;
        info.name = path;
        info.pe = current_pe_;
        info.latency = m.opcodes;
        info.slot = add(ResourceKind::FuSlot, path, 1, fu);
        int in_index = 0;
        bool have_result = false;
        for (const auto& p : m.ports) {
          PortRole role = p.role;
          if (role == PortRole::Auto) {
            if (p.dir == PortDir::In) {
              role = in_index == 0 ? PortRole::Left : in_index == 1 ? PortRole::Right : PortRole::Pred;
              ++in_index;
            } else {
              role = p.name == "mem" || have_result ? PortRole::Mem : PortRole::Result;
            }
          }
          const std::string name = path + "." + p.name;
          int id = add(p.dir == PortDir::In ? ResourceKind::InPort : ResourceKind::OutPort, name, 1, fu);
          ports_[name] = {{id}, {id}, false};
          switch (role) {
            case PortRole::Left: info.left = id; break;
            case PortRole::Right: info.right = id; break;
            case PortRole::Pred: info.pred = id; break;
            case PortRole::Result: info.result = id; have_result = true; break;
            case PortRole::Mem: info.mem = id; break;
            case PortRole::Auto: break;
          }
        }
        if (info.left < 0 || info.result < 0)
          throw Error(ErrorCode::SchemaError, "FU '" + path + "' needs a left operand and a result port");
        // Canonical internal wiring: only the left operand may pass through the FU.
        arc(info.left, info.slot);
        arc(info.slot, info.result);
        g_.fus.push_back(std::move(info));
        break;
      }
      case ModuleKind::RF: {
        std::vector<int> regs;
        for (int r = 0; r < m.registers; ++r)
          regs.push_back(add(ResourceKind::Reg, m.registers == 1 ? path : path + ".r" + std::to_string(r)));
        for (const auto& p : m.ports) ports_[path + "." + p.name] = {regs, regs, false};
        break;
      }
      case ModuleKind::MU: {
        MuInfo mu;
        mu.name = path;
        mu.banks = m.banks;
        mu.bank_depth = m.bank_depth;
        mu.first_bank = g_.total_banks();
        for (const auto& p : m.ports) {
          int id = add(ResourceKind::MuPort, path + "." + p.name);
          ports_[path + "." + p.name] = {{id}, {id}, false};
          mu.ports.push_back(id);
        }
        g_.mus.push_back(std::move(mu));
        break;
      }
    }
  }

  void connect(const std::string& path, const std::vector<Connection>& conns) {
    for (const auto& c : conns) {
      auto full = [&](const std::string& ref) { return path.empty() ? ref : path + "." + ref; };
      const auto& from = ports_.at(full(c.from));
      const auto& to = ports_.at(full(c.to));
      bool child_from = c.from.find('.') != std::string::npos;
      bool child_to = c.to.find('.') != std::string::npos;
      if (child_from && child_to && from.composite && to.composite) {
        // Wire between two sibling blocks: a schedulable link segment.
        std::string top = full(c.from);
        top = top.substr(0, top.find('.'));
        int saved = current_pe_;
        current_pe_ = pe_of_top_[top];
        int link = add(ResourceKind::Link, full(c.from) + ">" + full(c.to));
        current_pe_ = saved;
        arc(from.as_source.front(), link);
        arc(link, to.as_sink.front());
      } else {
        for (int s : from.as_source)
          for (int d : to.as_sink) arc(s, d);
      }
    }
  }

  const ArchSpec& spec_;
  RoutingGraph& g_;
  int current_pe_ = -1;
  std::map<std::string, PortResources> ports_;
  std::map<std::string, int> pe_of_top_;
};

}  // namespace detail

RoutingGraph elaborate(const ArchSpec& spec) {
  validate(spec);
  RoutingGraph g;
  g.arch_name = spec.name;
  g.word_width = spec.word_width;
  g.hop_limit = spec.hop_limit;
  g.config_bytes_per_pe = spec.config_bytes_per_pe;
  g.instruction_bytes = spec.instruction_bytes;
  detail::Elaborator(spec, g).run();

  for (auto& adj : g.fanout) std::sort(adj.begin(), adj.end());
  for (auto& adj : g.fanin) std::sort(adj.begin(), adj.end());

  for (auto& fu : g.fus) {
    if (fu.mem < 0) continue;
    std::vector<char> seen(g.resources.size(), 0);
    std::deque<int> queue{fu.mem};
    seen[fu.mem] = 1;
    while (!queue.empty()) {
      int r = queue.front();
      queue.pop_front();
      if (g.resources[r].kind == ResourceKind::MuPort) {
        fu.mu_ports.push_back(r);
        continue;
      }
      for (int n : g.fanout[r])
        if (!seen[n]) {
          seen[n] = 1;
          queue.push_back(n);
        }
    }
    std::sort(fu.mu_ports.begin(), fu.mu_ports.end());
    for (int port : fu.mu_ports)
      for (const auto& mu : g.mus)
        if (std::find(mu.ports.begin(), mu.ports.end(), port) != mu.ports.end())
          for (int b = 0; b < mu.banks; ++b) fu.banks.insert(mu.first_bank + b);
  }
  for (const auto& fu : g.fus)
    if ((fu.supports(Opcode::LOAD) || fu.supports(Opcode::STORE)) && fu.banks.empty())
      throw Error(ErrorCode::UnreachableMemory, "FU '" + fu.name + "' has memory opcodes but no path to a memory unit");
  return g;
}

}  // namespace cgra
