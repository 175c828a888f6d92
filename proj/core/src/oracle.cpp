#include "cgra/oracle.hpp"

#include <filesystem>
#include <map>

#include "cgra/error.hpp"
#include "cgra/interpreter.hpp"
#include "json_util.hpp"

namespace cgra {

using detail::json;

TestBundle gen_vectors(const Dfg& dfg, const LayoutFile& layout, const MemoryGeometry& geometry, std::uint64_t seed,
                       int iterations) {
  TestBundle b;
  b.kernel = dfg.name;
  b.seed = seed;
  b.iterations = iterations;
  b.mem_in = MemoryImage::zeros(geometry);
  std::mt19937_64 rng(seed);
  for (const auto& e : layout.entries) {
    if (std::find(dfg.live_in.begin(), dfg.live_in.end(), e.var) == dfg.live_in.end()) continue;
    if (e.bank < 0 || e.bank >= static_cast<int>(b.mem_in.banks.size()) ||
        e.base + e.length > static_cast<int>(b.mem_in.banks[e.bank].size()))
      throw Error(ErrorCode::OutOfBoundsAccess, "layout entry '" + e.var + "' lies outside memory");
    for (int i = 0; i < e.length; ++i) b.mem_in.banks[e.bank][e.base + i] = truncate(rng(), geometry.word_width);
  }
  b.expected = reference_execute(dfg, b.mem_in, layout, iterations);
  return b;
}

Verdict validate(const RoutingGraph& rg, const Bitstream& bs, const LayoutFile& layout, const TestBundle& bundle,
                 const SimOptions& opts, int max_report) {
  Verdict v;
  try {
    for (const auto& e : layout.entries)
      if (e.bank < 0 || e.bank >= static_cast<int>(bundle.mem_in.banks.size()))
        throw Error(ErrorCode::SchemaError, "layout bank out of range for '" + e.var + "'");
    auto r = simulate(rg, bs, bundle.mem_in, bundle.iterations, opts);
    v.stats = r.stats;
    if (r.memory.banks.size() != bundle.expected.banks.size())
      throw Error(ErrorCode::SchemaError, "memory geometry differs from the bundle");
    for (std::size_t b = 0; b < r.memory.banks.size(); ++b) {
      const auto& got = r.memory.banks[b];
      const auto& want = bundle.expected.banks[b];
      if (got.size() != want.size()) throw Error(ErrorCode::SchemaError, "bank depth differs from the bundle");
      for (std::size_t a = 0; a < got.size(); ++a)
        if (got[a] != want[a]) {
          if (static_cast<int>(v.mismatches.size()) < max_report)
            v.mismatches.push_back({static_cast<int>(b), a, got[a], want[a]});
          ++v.mismatch_count;
        }
    }
    v.pass = v.mismatch_count == 0;
  } catch (const std::exception& e) {
    v.pass = false;
    v.error = e.what();
  }
  return v;
}

std::string verdict_to_json(const Verdict& v, int word_width) {
  json j;
  j["verdict"] = v.pass ? "PASS" : "FAIL";
  j["mismatch_count"] = v.mismatch_count;
  json mm = json::array();
  auto hex = [word_width](Word w) {
    std::string s = bank_to_hex({w}, word_width);
    s.pop_back();
    return s;
  };
  for (const auto& m : v.mismatches)
    mm.push_back({{"bank", m.bank}, {"addr", m.addr}, {"got", hex(m.got)}, {"want", hex(m.want)}});
  j["mismatches"] = mm;
  if (!v.error.empty()) j["error"] = v.error;
  j["stats"] = json::parse(stats_to_json(v.stats));
  return j.dump(1) + "\n";
}

void write_bundle(const std::string& dir, const TestBundle& b) {
  std::filesystem::create_directories(dir);
  json j;
  j["kernel"] = b.kernel;
  j["arch"] = b.arch;
  j["seed"] = b.seed;
  j["iterations"] = b.iterations;
  j["word_width"] = b.mem_in.word_width;
  json banks = json::array();
  for (std::size_t i = 0; i < b.mem_in.banks.size(); ++i) {
    std::string in = "mem_in_b" + std::to_string(i) + ".hex";
    std::string ex = "expected_b" + std::to_string(i) + ".hex";
    detail::write_file(dir + "/" + in, bank_to_hex(b.mem_in.banks[i], b.mem_in.word_width));
    detail::write_file(dir + "/" + ex, bank_to_hex(b.expected.banks[i], b.expected.word_width));
    banks.push_back({{"mem_in", in}, {"expected", ex}});
  }
  j["banks"] = banks;
  detail::write_file(dir + "/bundle.json", j.dump(1) + "\n");
}

TestBundle read_bundle(const std::string& dir) {
  json j = detail::parse_json(detail::read_file(dir + "/bundle.json"), "bundle");
  detail::check_fields(j, {"kernel", "arch", "seed", "iterations", "word_width", "banks"}, "bundle");
  TestBundle b;
  b.kernel = detail::get_or<std::string>(j, "kernel", "", "bundle");
  b.arch = detail::get_or<std::string>(j, "arch", "", "bundle");
  b.seed = detail::get_field<std::uint64_t>(j, "seed", "bundle");
  b.iterations = detail::get_field<int>(j, "iterations", "bundle");
  const int width = detail::get_field<int>(j, "word_width", "bundle");
  b.mem_in.word_width = b.expected.word_width = width;
  for (const auto& bj : j.at("banks")) {
    b.mem_in.banks.push_back(
        bank_from_hex(detail::read_file(dir + "/" + detail::get_field<std::string>(bj, "mem_in", "bank")), width));
    b.expected.banks.push_back(
        bank_from_hex(detail::read_file(dir + "/" + detail::get_field<std::string>(bj, "expected", "bank")), width));
  }
  return b;
}

// ---------------------------------------------------------------------------

namespace {

struct FieldRef {
  FaultKind kind;
  int pe, slot, index;
  bool reg_write;
};

std::vector<FieldRef> fields(const Bitstream& bs) {
  std::vector<FieldRef> out;
  for (int p = 0; p < static_cast<int>(bs.pes.size()); ++p)
    for (int s = 0; s < bs.ii; ++s) {
      const auto& sc = bs.pes[p].slots[s];
      for (int i = 0; i < static_cast<int>(sc.ops.size()); ++i) {
        out.push_back({FaultKind::Opcode, p, s, i, false});
        out.push_back({FaultKind::Constant, p, s, i, false});
      }
      for (int i = 0; i < static_cast<int>(sc.selects.size()); ++i) out.push_back({FaultKind::Select, p, s, i, false});
      for (int i = 0; i < static_cast<int>(sc.reg_writes.size()); ++i)
        out.push_back({FaultKind::Select, p, s, i, true});
    }
  return out;
}

bool binary(Opcode op) {
  switch (op) {
    case Opcode::NOP:
    case Opcode::CONST:
    case Opcode::ROUTE:
    case Opcode::LOAD: return false;
    default: return true;
  }
}

// Whether the op would consume its constant when executing.
bool reads_constant(const OpCfg& op) {
  if (op.opcode == Opcode::ROUTE) return false;
  if (op.opcode == Opcode::CONST || is_memory(op.opcode)) return true;
  if (!op.operands[0].wired) return true;
  return binary(op.opcode) && !op.operands[1].wired;
}

// Identity on the left operand given the op's constant right operand.
bool identity(Opcode op, const OpCfg& cfg, int width) {
  if (op == Opcode::ROUTE || op == Opcode::NOP) return true;
  if (cfg.operands[1].wired || !cfg.operands[0].wired) return false;
  const Word c = truncate_signed(cfg.constant.value_or(0), width);
  switch (op) {
    case Opcode::ADD:
    case Opcode::SUB:
    case Opcode::OR:
    case Opcode::XOR:
    case Opcode::SHL:
    case Opcode::SHR: return c == 0;
    case Opcode::MUL: return c == 1;
    case Opcode::AND: return c == word_mask(width);
    default: return false;
  }
}

}  // namespace

Fault random_fault(const Bitstream& bs, const RoutingGraph& rg, std::mt19937_64& rng) {
  auto all = fields(bs);
  if (all.empty()) throw Error(ErrorCode::SchemaError, "bitstream has no configurable fields");
  const auto ref = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
  Fault f;
  f.kind = ref.kind;
  f.pe = ref.pe;
  f.slot = ref.slot;
  f.index = ref.index;
  f.reg_write = ref.reg_write;
  const auto& sc = bs.pes[ref.pe].slots[ref.slot];
  const std::string where = rg.pes[ref.pe].name + " slot " + std::to_string(ref.slot);
  if (ref.kind == FaultKind::Opcode) {
    const auto& op = sc.ops[ref.index];
    std::vector<Opcode> choices;
    for (int o = 0; o < kOpcodeCount; ++o) {
      auto code = static_cast<Opcode>(o);
      if (code != op.opcode && rg.fus[op.fu].supports(code)) choices.push_back(code);
    }
    f.opcode = choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)];
    f.description = where + ": opcode " + std::string(opcode_name(op.opcode)) + " -> " +
                    std::string(opcode_name(f.opcode));
  } else if (ref.kind == FaultKind::Constant) {
    const auto& op = sc.ops[ref.index];
    const int bit = std::uniform_int_distribution<int>(0, bs.word_width - 1)(rng);
    const std::int64_t old = op.constant.value_or(0);
    f.constant = static_cast<std::int64_t>(static_cast<std::uint64_t>(old) ^ (std::uint64_t{1} << bit));
    f.description = where + ": constant " + std::to_string(old) + " -> " + std::to_string(*f.constant);
  } else {
    const auto& sel = ref.reg_write ? sc.reg_writes[ref.index] : sc.selects[ref.index];
    std::vector<int> choices;
    for (int s : rg.fanin[sel.sink])
      if (s != sel.source) choices.push_back(s);
    f.source = choices.empty() ? -1 : choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)];
    f.description = where + ": " + rg.resources[sel.sink].name + " source " + rg.resources[sel.source].name + " -> " +
                    (f.source < 0 ? std::string("none") : rg.resources[f.source].name);
  }
  return f;
}

Bitstream apply_fault(const Bitstream& bs, const Fault& f) {
  Bitstream out = bs;
  auto& sc = out.pes[f.pe].slots[f.slot];
  switch (f.kind) {
    case FaultKind::Opcode: sc.ops[f.index].opcode = f.opcode; break;
    case FaultKind::Constant: sc.ops[f.index].constant = f.constant; break;
    case FaultKind::Select: {
      auto& list = f.reg_write ? sc.reg_writes : sc.selects;
      if (f.source < 0)
        list.erase(list.begin() + f.index);
      else
        list[f.index].source = f.source;
      break;
    }
  }
  return out;
}

std::string dead_field_reason(const Bitstream& bs, const Dfg& dfg, const Mapping& m, const Fault& f) {
  const auto& sc = bs.pes[f.pe].slots[f.slot];
  if (f.kind == FaultKind::Constant) {
    if (!reads_constant(sc.ops[f.index])) return "constant is never read by this op";
    return "";
  }
  if (f.kind == FaultKind::Opcode) {
    const auto& op = sc.ops[f.index];
    if (identity(op.opcode, op, bs.word_width) && identity(f.opcode, op, bs.word_width))
      return "both opcodes are the identity on the left operand";
    return "";
  }
  if (f.source < 0) return "";
  // Which (value, time) each rnode carries under the mapping.
  std::map<std::pair<int, int>, std::pair<int, long>> carried;
  const int ii = m.ii;
  for (std::size_t e = 0; e < m.routes.size() && e < dfg.edges.size(); ++e)
    for (const auto& st : m.routes[e])
      carried[{st.resource, static_cast<int>(((st.time % ii) + ii) % ii)}] = {dfg.edges[e].src, st.time};
  const auto& sel = f.reg_write ? sc.reg_writes[f.index] : sc.selects[f.index];
  // Register writes latch the source in this cycle; selects forward it in this cycle.
  auto a = carried.find({sel.source, f.slot});
  auto b = carried.find({f.source, f.slot});
  if (a != carried.end() && b != carried.end() && a->second == b->second)
    return "replacement source carries the same value at the same time";
  return "";
}

}  // namespace cgra
