#include <algorithm>
#include <functional>

#include "cgra/error.hpp"
#include "cgra/simulator.hpp"
#include "json_util.hpp"

namespace cgra {

using detail::json;

namespace {

void add_select(std::vector<Select>& list, Select s, const RoutingGraph& rg, int slot) {
  for (const auto& x : list) {
    if (x.sink != s.sink) continue;
    if (x.source == s.source) return;
    throw Error(ErrorCode::XbarConflict, rg.resources[s.sink].name + " driven by two sources in slot " +
                                             std::to_string(slot));
  }
  list.push_back(s);
}

bool combinational(const RoutingGraph& rg, int r) {
  const auto& res = rg.resources[r];
  if (res.kind == ResourceKind::Reg) return false;
  if (res.fu >= 0 && rg.fus[res.fu].result == r) return false;
  return true;
}

void check_loops(const RoutingGraph& rg, const Bitstream& bs) {
  const int n = static_cast<int>(rg.resources.size());
  for (int s = 0; s < bs.ii; ++s) {
    std::vector<int> src(n, -1);
    for (const auto& pe : bs.pes)
      for (const auto& sel : pe.slots[s].selects) src[sel.sink] = sel.source;
    std::vector<char> state(n, 0);
    for (int r = 0; r < n; ++r) {
      int cur = r;
      std::vector<int> chain;
      while (cur >= 0 && state[cur] == 0) {
        state[cur] = 1;
        chain.push_back(cur);
        cur = combinational(rg, cur) ? src[cur] : -1;
      }
      if (cur >= 0 && state[cur] == 1)
        throw Error(ErrorCode::XbarConflict, "combinational loop through " + rg.resources[cur].name);
      for (int c : chain) state[c] = 2;
    }
  }
}

}  // namespace

bool pe_idle_at(const PeConfig& pe, int slot) {
  for (const auto& r : pe.idle)
    if (r.end < 0 || (slot >= r.start && slot <= r.end)) return true;
  return false;
}

Bitstream extract_bitstream(const Dfg& dfg, const RoutingGraph& rg, const Mapping& m) {
  const int ii = m.ii;
  if (rg.config_bytes_per_pe > 0 && static_cast<long>(ii) * rg.instruction_bytes > rg.config_bytes_per_pe)
    throw Error(ErrorCode::ConfigOverflow, "II " + std::to_string(ii) + " needs " +
                                               std::to_string(static_cast<long>(ii) * rg.instruction_bytes) +
                                               " configuration bytes per PE, only " +
                                               std::to_string(rg.config_bytes_per_pe) + " available");
  Bitstream bs;
  bs.arch_name = rg.arch_name;
  bs.ii = ii;
  bs.word_width = rg.word_width;
  bs.schedule_length = schedule_length(dfg, rg, m);
  bs.pes.assign(rg.pes.size(), PeConfig{std::vector<SlotCfg>(ii), {}});
  auto slot_of = [ii](long t) { return static_cast<int>(((t % ii) + ii) % ii); };

  for (int v = 0; v < dfg.size(); ++v) {
    const auto& n = dfg.nodes[v];
    const auto& p = m.placement[v];
    const auto& fu = rg.fus[p.fu];
    OpCfg op;
    op.node = n.id;
    op.fu = p.fu;
    op.opcode = n.opcode;
    op.constant = n.constant;
    op.stage = p.time / ii;
    op.bank = is_memory(n.opcode) ? n.bank : -1;
    op.offset = n.offset;
    op.mem_port = p.mem_port;
    for (int s = 0; s < 3; ++s)
      if (const DfgEdge* e = dfg.operand(v, static_cast<OperandSlot>(s)))
        op.operands[s] = {true, e->distance, e->init};
    bs.pes[fu.pe].slots[slot_of(p.time)].ops.push_back(op);
  }

  for (const auto& route : m.routes)
    for (std::size_t i = 1; i < route.size(); ++i) {
      const auto& prev = route[i - 1];
      const auto& cur = route[i];
      const auto& res = rg.resources[cur.resource];
      if (res.kind == ResourceKind::Reg) {
        if (prev.resource == cur.resource) continue;  // hold: write enable stays low
        add_select(bs.pes[res.pe].slots[slot_of(prev.time)].reg_writes, {cur.resource, prev.resource}, rg,
                   slot_of(prev.time));
      } else if (res.kind == ResourceKind::FuSlot) {
        auto& ops = bs.pes[res.pe].slots[slot_of(cur.time)].ops;
        bool have = std::any_of(ops.begin(), ops.end(), [&](const OpCfg& o) { return o.fu == res.fu; });
        if (!have) {
          OpCfg op;
          op.fu = res.fu;
          op.opcode = Opcode::ROUTE;
          op.stage = cur.time / ii;
          op.operands[0].wired = true;
          ops.push_back(op);
        }
      } else if (res.fu >= 0 && rg.fus[res.fu].result == cur.resource) {
        continue;  // driven by the FU itself
      } else {
        add_select(bs.pes[res.pe].slots[slot_of(cur.time)].selects, {cur.resource, prev.resource}, rg,
                   slot_of(cur.time));
      }
    }

  for (auto& pe : bs.pes) {
    for (auto& slot : pe.slots) {
      std::sort(slot.ops.begin(), slot.ops.end(), [](const OpCfg& a, const OpCfg& b) { return a.fu < b.fu; });
      auto by_sink = [](const Select& a, const Select& b) { return a.sink < b.sink; };
      std::sort(slot.selects.begin(), slot.selects.end(), by_sink);
      std::sort(slot.reg_writes.begin(), slot.reg_writes.end(), by_sink);
    }
    bool any = false;
    for (int s = 0; s < ii; ++s) {
      if (!pe.slots[s].empty()) {
        any = true;
        continue;
      }
      if (!pe.idle.empty() && pe.idle.back().end == s - 1)
        pe.idle.back().end = s;
      else
        pe.idle.push_back({s, s});
    }
    if (!any) pe.idle = {{0, -1}};
  }
  check_loops(rg, bs);
  return bs;
}

std::string serialize_bitstream(const Bitstream& bs, const RoutingGraph& rg) {
  json j;
  j["arch"] = bs.arch_name;
  j["ii"] = bs.ii;
  j["word_width"] = bs.word_width;
  j["schedule_length"] = bs.schedule_length;
  json pes = json::array();
  for (std::size_t p = 0; p < bs.pes.size(); ++p) {
    const auto& pe = bs.pes[p];
    json pj;
    pj["pe"] = rg.pes[p].name;
    json idle = json::array();
    for (const auto& r : pe.idle) idle.push_back({r.start, r.end});
    pj["idle"] = idle;
    json slots = json::array();
    for (const auto& sc : pe.slots) {
      json sj;
      json ops = json::array();
      for (const auto& op : sc.ops) {
        json oj;
        if (!op.node.empty()) oj["node"] = op.node;
        oj["fu"] = rg.fus[op.fu].name;
        oj["opcode"] = opcode_name(op.opcode);
        if (op.constant) oj["constant"] = *op.constant;
        oj["stage"] = op.stage;
        if (op.bank >= 0) oj["bank"] = op.bank;
        if (op.offset) oj["offset"] = op.offset;
        if (op.mem_port >= 0) oj["mem_port"] = rg.resources[op.mem_port].name;
        json operands = json::array();
        for (const auto& o : op.operands) {
          json x{{"wired", o.wired}};
          if (o.distance) x["distance"] = o.distance;
          if (o.init) x["init"] = o.init;
          operands.push_back(x);
        }
        oj["operands"] = operands;
        ops.push_back(oj);
      }
      sj["ops"] = ops;
      json sel = json::array();
      for (const auto& s : sc.selects) sel.push_back({rg.resources[s.sink].name, rg.resources[s.source].name});
      sj["selects"] = sel;
      json rw = json::array();
      for (const auto& s : sc.reg_writes) rw.push_back({rg.resources[s.sink].name, rg.resources[s.source].name});
      sj["reg_writes"] = rw;
      slots.push_back(sj);
    }
    pj["slots"] = slots;
    pes.push_back(pj);
  }
  j["pes"] = pes;
  return j.dump(1) + "\n";
}

Bitstream parse_bitstream(std::string_view text, const RoutingGraph& rg) {
  json j = detail::parse_json(text, "bitstream");
  detail::check_fields(j, {"arch", "ii", "word_width", "schedule_length", "pes"}, "bitstream");
  Bitstream bs;
  bs.arch_name = detail::get_or<std::string>(j, "arch", "", "bitstream");
  bs.ii = detail::get_field<int>(j, "ii", "bitstream");
  if (bs.ii < 1) throw Error(ErrorCode::SchemaError, "bitstream: ii must be >= 1");
  bs.word_width = detail::get_or<int>(j, "word_width", rg.word_width, "bitstream");
  bs.schedule_length = detail::get_field<int>(j, "schedule_length", "bitstream");
  auto resource = [&](const json& v) {
    if (!v.is_string()) throw Error(ErrorCode::SchemaError, "bitstream: resource names must be strings");
    int r = rg.find(v.get<std::string>());
    if (r < 0) throw Error(ErrorCode::XbarConflict, "bitstream names unknown resource '" + v.get<std::string>() + "'");
    return r;
  };
  auto fu_index = [&](const std::string& name) {
    for (std::size_t f = 0; f < rg.fus.size(); ++f)
      if (rg.fus[f].name == name) return static_cast<int>(f);
    throw Error(ErrorCode::SchemaError, "bitstream names unknown FU '" + name + "'");
  };
  const auto& pes = j.at("pes");
  if (!pes.is_array() || pes.size() != rg.pes.size())
    throw Error(ErrorCode::SchemaError, "bitstream: PE count does not match the fabric");
  for (std::size_t p = 0; p < pes.size(); ++p) {
    const auto& pj = pes[p];
    detail::check_fields(pj, {"pe", "idle", "slots"}, "bitstream pe");
    if (detail::get_field<std::string>(pj, "pe", "bitstream pe") != rg.pes[p].name)
      throw Error(ErrorCode::SchemaError, "bitstream: PE order does not match the fabric");
    PeConfig pe;
    for (const auto& r : pj.at("idle")) pe.idle.push_back({r.at(0).get<int>(), r.at(1).get<int>()});
    const auto& slots = pj.at("slots");
    if (static_cast<int>(slots.size()) != bs.ii)
      throw Error(ErrorCode::SchemaError, "bitstream: PE " + rg.pes[p].name + " needs one slot per cycle of II");
    for (const auto& sj : slots) {
      detail::check_fields(sj, {"ops", "selects", "reg_writes"}, "bitstream slot");
      SlotCfg sc;
      for (const auto& oj : sj.at("ops")) {
        detail::check_fields(oj, {"node", "fu", "opcode", "constant", "stage", "bank", "offset", "mem_port", "operands"},
                             "bitstream op");
        OpCfg op;
        op.node = detail::get_or<std::string>(oj, "node", "", "op");
        op.fu = fu_index(detail::get_field<std::string>(oj, "fu", "op"));
        auto code = parse_opcode(detail::get_field<std::string>(oj, "opcode", "op"));
        if (!code) throw Error(ErrorCode::SchemaError, "bitstream: unknown opcode");
        op.opcode = *code;
        if (oj.contains("constant")) op.constant = detail::get_field<std::int64_t>(oj, "constant", "op");
        op.stage = detail::get_field<int>(oj, "stage", "op");
        op.bank = detail::get_or<int>(oj, "bank", -1, "op");
        op.offset = detail::get_or<std::int64_t>(oj, "offset", 0, "op");
        if (oj.contains("mem_port")) op.mem_port = resource(oj["mem_port"]);
        const auto& ops = oj.at("operands");
        if (!ops.is_array() || ops.size() != 3) throw Error(ErrorCode::SchemaError, "bitstream: op needs 3 operands");
        for (int i = 0; i < 3; ++i) {
          op.operands[i].wired = detail::get_field<bool>(ops[i], "wired", "operand");
          op.operands[i].distance = detail::get_or<int>(ops[i], "distance", 0, "operand");
          op.operands[i].init = detail::get_or<std::int64_t>(ops[i], "init", 0, "operand");
        }
        sc.ops.push_back(op);
      }
      for (const auto& s : sj.at("selects")) sc.selects.push_back({resource(s.at(0)), resource(s.at(1))});
      for (const auto& s : sj.at("reg_writes")) sc.reg_writes.push_back({resource(s.at(0)), resource(s.at(1))});
      pe.slots.push_back(std::move(sc));
    }
    bs.pes.push_back(std::move(pe));
  }
  return bs;
}

}  // namespace cgra
