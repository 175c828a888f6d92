#include "cgra/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "cgra/error.hpp"
#include "json_util.hpp"

namespace cgra {

using detail::json;

namespace {

class Machine {
 public:
  Machine(const RoutingGraph& rg, const Bitstream& bs, const SimOptions& opts)
      : rg_(rg), bs_(bs), opts_(opts), n_(static_cast<int>(rg.resources.size())) {
    if (bs.pes.size() != rg.pes.size()) throw Error(ErrorCode::SchemaError, "bitstream does not match the fabric");
    src_.assign(bs.ii, std::vector<int>(n_, -1));
    for (std::size_t p = 0; p < bs.pes.size(); ++p) {
      const auto& pe = bs.pes[p];
      if (static_cast<int>(pe.slots.size()) != bs.ii) throw Error(ErrorCode::SchemaError, "bitstream slot count");
      for (int s = 0; s < bs.ii; ++s) {
        for (const auto& sel : pe.slots[s].selects) {
          check_arc(sel, s);
          if (rg.resources[sel.sink].kind == ResourceKind::Reg)
            throw Error(ErrorCode::XbarConflict, "register " + rg.resources[sel.sink].name + " selected combinationally");
          if (src_[s][sel.sink] >= 0 && src_[s][sel.sink] != sel.source)
            throw Error(ErrorCode::XbarConflict, rg.resources[sel.sink].name + " driven twice in slot " + std::to_string(s));
          src_[s][sel.sink] = sel.source;
        }
        for (const auto& w : pe.slots[s].reg_writes) {
          check_arc(w, s);
          if (rg.resources[w.sink].kind != ResourceKind::Reg)
            throw Error(ErrorCode::XbarConflict, rg.resources[w.sink].name + " is not a register");
        }
        std::vector<int> fus;
        for (const auto& op : pe.slots[s].ops) {
          if (op.fu < 0 || op.fu >= static_cast<int>(rg.fus.size()) || rg.fus[op.fu].pe != static_cast<int>(p))
            throw Error(ErrorCode::XbarConflict, "op placed on an FU outside its PE");
          if (std::count(fus.begin(), fus.end(), op.fu))
            throw Error(ErrorCode::XbarConflict, rg.fus[op.fu].name + " configured twice in slot " + std::to_string(s));
          if (!rg.fus[op.fu].supports(op.opcode))
            throw Error(ErrorCode::XbarConflict, rg.fus[op.fu].name + " cannot execute " + std::string(opcode_name(op.opcode)));
          fus.push_back(op.fu);
        }
      }
    }
    regs_.assign(n_, Tagged{});
    pending_.resize(rg.fus.size());
    val_.resize(n_);
    mark_.assign(n_, 0);
  }

  SimResult run(const MemoryImage& mem_in, int iterations) {
    SimResult out;
    out.memory = mem_in;
    mem_ = &out.memory;
    auto& st = out.stats;
    const int ii = bs_.ii;
    st.cycles = iterations > 0 ? static_cast<long>(iterations - 1) * ii + bs_.schedule_length : 0;
    st.pe_active.assign(rg_.pes.size(), 0);
    iterations_ = iterations;
    for (long c = 0; c < st.cycles; ++c) {
      cycle_ = c;
      const int s = static_cast<int>(c % ii);
      ++stamp_;
      std::vector<std::pair<int, Tagged>> reg_next;
      std::vector<std::tuple<int, Word, Word>> stores;
      for (std::size_t p = 0; p < bs_.pes.size(); ++p) {
        const auto& pe = bs_.pes[p];
        ++st.pe_cycles;
        if (opts_.gating && pe_idle_at(pe, s)) {
          ++st.gated_cycles;
          continue;
        }
        ++st.cm_reads;
        ++st.active_pe_cycles;
        ++st.pe_active[p];
        const auto& cfg = pe.slots[s];
        for (const auto& sel : cfg.selects) {
          Tagged v = eval(sel.sink);
          if (rg_.resources[sel.sink].kind == ResourceKind::Link && v.valid) ++st.link_hops;
          if (rg_.resources[sel.source].kind == ResourceKind::Reg) ++st.reg_reads;
        }
        for (const auto& w : cfg.reg_writes) {
          reg_next.emplace_back(w.sink, eval(w.source));
          ++st.reg_writes;
          if (rg_.resources[w.source].kind == ResourceKind::Reg) ++st.reg_reads;
        }
        for (const auto& op : cfg.ops) execute(op, st, stores);
      }
      for (const auto& [bank, addr, word] : stores) mem_->banks[bank][addr] = word;
      for (const auto& [r, v] : reg_next) regs_[r] = v;
      for (auto& q : pending_) q.erase(c);
    }
    return out;
  }

 private:
  void check_arc(const Select& sel, int slot) const {
    if (sel.sink < 0 || sel.sink >= n_ || sel.source < 0 || sel.source >= n_)
      throw Error(ErrorCode::XbarConflict, "select references a missing resource");
    const auto& fin = rg_.fanin[sel.sink];
    if (!std::binary_search(fin.begin(), fin.end(), sel.source))
      throw Error(ErrorCode::XbarConflict, rg_.resources[sel.sink].name + " cannot select " +
                                               rg_.resources[sel.source].name + " (slot " + std::to_string(slot) + ")");
  }

  Tagged eval(int r) {
    if (mark_[r] == stamp_) return val_[r];
    if (mark_[r] == -stamp_) throw Error(ErrorCode::XbarConflict, "combinational loop through " + rg_.resources[r].name);
    mark_[r] = -stamp_;
    const auto& res = rg_.resources[r];
    Tagged v;
    if (res.kind == ResourceKind::Reg) {
      v = regs_[r];
    } else if (res.fu >= 0 && rg_.fus[res.fu].result == r) {
      auto it = pending_[res.fu].find(cycle_);
      if (it != pending_[res.fu].end()) v = it->second;
    } else {
      const int s = static_cast<int>(cycle_ % bs_.ii);
      int src = src_[s][r];
      if (src >= 0 && !(opts_.gating && res.pe >= 0 && pe_idle_at(bs_.pes[res.pe], s))) v = eval(src);
    }
    val_[r] = v;
    mark_[r] = stamp_;
    if (opts_.probe) opts_.probe(cycle_, r, v);
    return v;
  }

  void execute(const OpCfg& op, SimStats& st, std::vector<std::tuple<int, Word, Word>>& stores) {
    const auto& fu = rg_.fus[op.fu];
    const int width = bs_.word_width;
    if (op.opcode == Opcode::ROUTE) {
      ++st.alu_ops;
      pending_[op.fu][cycle_ + fu.latency_of(Opcode::ROUTE)] = eval(fu.left);
      return;
    }
    const long k = cycle_ / bs_.ii - op.stage;
    if (k < 0 || k >= iterations_) return;
    const Word constant = truncate_signed(op.constant.value_or(0), width);
    Tagged in[3];
    std::optional<Tagged> pred;
    const int ports[3] = {fu.left, fu.right, fu.pred};
    for (int i = 0; i < 3; ++i) {
      const auto& o = op.operands[i];
      if (!o.wired)
        in[i] = {constant, true};
      else if (k < o.distance)
        in[i] = {truncate_signed(o.init, width), true};
      else
        in[i] = eval(ports[i]);
    }
    if (op.operands[2].wired) pred = in[2];
    Operands operands{in[0], in[1], pred};
    Tagged result;
    if (is_memory(op.opcode)) {
      const Word base = truncate(constant + static_cast<Word>(op.offset), width);
      auto addr = memory_address(op.opcode, operands, op.operands[0].wired, base, width);
      if (addr) {
        ++st.mu_accesses;
        if (op.bank < 0 || op.bank >= static_cast<int>(mem_->banks.size()))
          throw Error(ErrorCode::OutOfBoundsAccess, "op " + op.node + " targets a missing bank");
        const auto& bank = mem_->banks[op.bank];
        if (*addr >= bank.size())
          throw Error(ErrorCode::OutOfBoundsAccess, "op " + op.node + " accesses address " + std::to_string(*addr) +
                                                        " in bank " + std::to_string(op.bank));
        if (op.opcode == Opcode::LOAD)
          result = {bank[*addr], true};
        else
          stores.emplace_back(op.bank, *addr, truncate(in[1].word, width));
      }
    } else {
      ++st.alu_ops;
      result = evaluate(op.opcode, operands, constant, width);
    }
    if (op.opcode != Opcode::STORE) pending_[op.fu][cycle_ + fu.latency_of(op.opcode)] = result;
    if (opts_.trace) {
      char buf[64];
      Tagged shown = op.opcode == Opcode::STORE ? in[1] : result;
      if (shown.valid)
        std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(truncate(shown.word, width)));
      else
        std::snprintf(buf, sizeof buf, "x");
      *opts_.trace << cycle_ << ' ' << rg_.fus[op.fu].name << ' ' << op.node << ' ' << opcode_name(op.opcode)
                   << " iter=" << k << " value=" << buf << '\n';
    }
  }

  const RoutingGraph& rg_;
  const Bitstream& bs_;
  const SimOptions& opts_;
  int n_;
  std::vector<std::vector<int>> src_;  // slot -> sink -> source
  std::vector<Tagged> regs_;
  std::vector<std::map<long, Tagged>> pending_;  // FU -> cycle -> result
  std::vector<Tagged> val_;
  std::vector<long> mark_;
  long stamp_ = 0;
  long cycle_ = 0;
  int iterations_ = 0;
  MemoryImage* mem_ = nullptr;
};

}  // namespace

SimResult simulate(const RoutingGraph& rg, const Bitstream& bs, const MemoryImage& mem_in, int iterations,
                   const SimOptions& opts) {
  Machine machine(rg, bs, opts);
  return machine.run(mem_in, iterations);
}

std::string stats_to_json(const SimStats& s) {
  json j{{"cycles", s.cycles},
         {"pe_cycles", s.pe_cycles},
         {"active_pe_cycles", s.active_pe_cycles},
         {"gated_cycles", s.gated_cycles},
         {"cm_reads", s.cm_reads},
         {"alu_ops", s.alu_ops},
         {"link_hops", s.link_hops},
         {"reg_reads", s.reg_reads},
         {"reg_writes", s.reg_writes},
         {"mu_accesses", s.mu_accesses},
         {"pe_active", s.pe_active}};
  return j.dump(1) + "\n";
}

EnergyModel parse_energy_model(std::string_view text) {
  json j = detail::parse_json(text, "energy model");
  detail::check_fields(j, {"cm_read", "alu_op", "link_hop", "reg_rw", "mu_access", "leak_per_gated_cycle"},
                       "energy model");
  EnergyModel m;
  const char* ctx = "energy model";
  m.cm_read = detail::get_or<double>(j, "cm_read", m.cm_read, ctx);
  m.alu_op = detail::get_or<double>(j, "alu_op", m.alu_op, ctx);
  m.link_hop = detail::get_or<double>(j, "link_hop", m.link_hop, ctx);
  m.reg_rw = detail::get_or<double>(j, "reg_rw", m.reg_rw, ctx);
  m.mu_access = detail::get_or<double>(j, "mu_access", m.mu_access, ctx);
  m.leak_per_gated_cycle = detail::get_or<double>(j, "leak_per_gated_cycle", m.leak_per_gated_cycle, ctx);
  for (double v : {m.cm_read, m.alu_op, m.link_hop, m.reg_rw, m.mu_access, m.leak_per_gated_cycle})
    if (v < 0) throw Error(ErrorCode::SchemaError, "energy costs must be >= 0");
  return m;
}

EnergyReport estimate_energy(const SimStats& s, const EnergyModel& m) {
  EnergyReport r;
  r.breakdown = {{"cm", m.cm_read * static_cast<double>(s.cm_reads)},
                 {"alu", m.alu_op * static_cast<double>(s.alu_ops)},
                 {"link", m.link_hop * static_cast<double>(s.link_hops)},
                 {"reg", m.reg_rw * static_cast<double>(s.reg_reads + s.reg_writes)},
                 {"mu", m.mu_access * static_cast<double>(s.mu_accesses)},
                 {"gated_leak", m.leak_per_gated_cycle * static_cast<double>(s.gated_cycles)}};
  for (const auto& [_, v] : r.breakdown) r.total += v;
  for (const auto& [k, v] : r.breakdown) r.percent.push_back({k, r.total > 0 ? 100.0 * v / r.total : 0.0});
  return r;
}

std::string energy_to_json(const EnergyReport& r) {
  json j;
  j["total"] = r.total;
  json b = json::object(), p = json::object();
  for (const auto& [k, v] : r.breakdown) b[k] = v;
  for (const auto& [k, v] : r.percent) p[k] = v;
  j["breakdown"] = b;
  j["percent"] = p;
  return j.dump(1) + "\n";
}

}  // namespace cgra
