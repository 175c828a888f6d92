#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "cgra/mapper.hpp"
#include "cgra/oracle.hpp"
#include "cgra/simulator.hpp"
#include "support.hpp"

using namespace cgra;
using support::edge;
using support::json;

namespace {

struct Pipeline {
  RoutingGraph rg;
  support::Prepared p;
  Mapping mapping;
  Bitstream bs;
};

Pipeline build(const std::string& kernel, const std::string& arch) {
  Pipeline out;
  out.rg = support::fabric(arch);
  out.p = support::prepare(kernel, out.rg);
  out.mapping = map(out.p.dfg, out.rg).mapping;
  out.bs = extract_bitstream(out.p.dfg, out.rg, out.mapping);
  return out;
}

// A CONST on pe_0_0 feeding an ADD three hops east in the same cycle.
struct HopInstance {
  RoutingGraph rg;
  Dfg dfg;
  Mapping m;
};

HopInstance three_hops(const std::string& arch, int ii) {
  HopInstance h;
  h.rg = support::fabric(arch);
  h.dfg = support::make_dfg(json::array({{{"id", "a"}, {"opcode", "CONST"}, {"constant", 5}},
                                         {{"id", "b"}, {"opcode", "ADD"}, {"constant", 1}}}),
                            json::array({edge("a", "b")}));
  h.m.arch_name = h.rg.arch_name;
  h.m.ii = ii;
  h.m.hop_limit = h.rg.hop_limit;
  h.m.placement = {{support::fu_index(h.rg, "pe_0_0.fu"), 0, -1}, {support::fu_index(h.rg, "pe_0_3.fu"), 1, -1}};
  Mrrg mrrg(h.rg, ii, h.rg.hop_limit);
  std::vector<RouteStep> route{{h.rg.find("pe_0_0.fu.out"), 1, 0}};
  const auto r = route_edge(mrrg, 0, route, h.rg.find("pe_0_3.fu.a"), 1);
  route.insert(route.end(), r.steps.begin(), r.steps.end());
  h.m.routes = {route};
  return h;
}

}  // namespace

TEST(Bitstream, UnusedPesAreIdleThroughout) {
  const auto pl = build("vecadd", "hycube_4x4");
  ASSERT_EQ(pl.mapping.ii, 1);
  std::set<int> used;
  for (const auto& p : pl.mapping.placement) used.insert(pl.rg.fus[p.fu].pe);
  for (const auto& route : pl.mapping.routes)
    for (const auto& s : route)
      if (pl.rg.resources[s.resource].pe >= 0) used.insert(pl.rg.resources[s.resource].pe);
  ASSERT_EQ(pl.bs.pes.size(), pl.rg.pes.size());
  int idle = 0;
  for (std::size_t pe = 0; pe < pl.bs.pes.size(); ++pe) {
    if (used.count(static_cast<int>(pe))) continue;
    ++idle;
    EXPECT_EQ(pl.bs.pes[pe].idle, (std::vector<IdleRange>{{0, -1}})) << pl.rg.pes[pe].name;
    EXPECT_TRUE(pe_idle_at(pl.bs.pes[pe], 0));
  }
  EXPECT_GT(idle, 0);
}

TEST(Bitstream, Fig5HycubeMulticast) {
  const auto pl = build("fig5", "hycube_2x2");
  ASSERT_EQ(pl.mapping.ii, 2);
  const int n1 = pl.p.dfg.index_of("n1");
  const auto& fu = pl.rg.fus[pl.mapping.placement[n1].fu];
  const int slot = (pl.mapping.placement[n1].time + fu.latency_of(Opcode::ADD)) % 2;
  int fanout = 0;
  for (const auto& s : pl.bs.pes[fu.pe].slots[slot].selects) fanout += s.source == fu.result;
  EXPECT_GE(fanout, 2) << "n1's result should leave on several crossbar outputs";
}

TEST(Bitstream, ConfigOverflowOnPace) {
  auto h = three_hops("pace_8x8", 33);
  EXPECT_TRUE(check_mapping(h.dfg, h.rg, h.m).empty());
  try {
    extract_bitstream(h.dfg, h.rg, h.m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigOverflow);
  }
  h = three_hops("pace_8x8", 32);
  EXPECT_NO_THROW(extract_bitstream(h.dfg, h.rg, h.m));
}

TEST(Bitstream, RoundTrip) {
  for (const char* arch : {"n2n_4x4", "hycube_4x4", "pace_8x8"})
    for (const char* k : {"fir", "predicated-select", "accumulate"}) {
      const auto pl = build(k, arch);
      const auto text = serialize_bitstream(pl.bs, pl.rg);
      EXPECT_EQ(parse_bitstream(text, pl.rg), pl.bs) << k << " on " << arch;
      EXPECT_EQ(serialize_bitstream(parse_bitstream(text, pl.rg), pl.rg), text);
    }
}

TEST(Simulator, MatchesReferenceOnVecadd) {
  const auto pl = build("vecadd", "hycube_4x4");
  const auto bundle = gen_vectors(pl.p.dfg, pl.p.layout, memory_geometry(pl.rg), 3, 8);
  const auto sim = simulate(pl.rg, pl.bs, bundle.mem_in, 8);
  EXPECT_EQ(sim.memory, bundle.expected);
  EXPECT_EQ(sim.memory, reference_execute(pl.p.dfg, bundle.mem_in, pl.p.layout, 8));
}

TEST(Simulator, CycleCountFormula) {
  for (const char* arch : {"n2n_4x4", "hycube_4x4"}) {
    const auto rg = support::fabric(arch);
    const Dfg g = bundled_kernel("accumulate");
    support::Prepared p;
    p.layout = assign_layout(g, memory_geometry(rg), {{"x", 100}, {"out", 1}});
    p.dfg = embed_addresses(g, p.layout);
    const auto r = map(p.dfg, rg);
    EXPECT_EQ(r.mapping.ii, std::max(r.mii.rec_mii, r.mii.res_mii)) << arch;
    const auto bs = extract_bitstream(p.dfg, rg, r.mapping);
    EXPECT_EQ(bs.schedule_length, schedule_length(p.dfg, rg, r.mapping));
    const auto bundle = gen_vectors(p.dfg, p.layout, memory_geometry(rg), 5, 100);
    const auto sim = simulate(rg, bs, bundle.mem_in, 100);
    const long fill = bs.schedule_length - bs.ii;
    EXPECT_EQ(sim.stats.cycles, fill + 100L * bs.ii);
    EXPECT_EQ(sim.memory, bundle.expected);
  }
}

TEST(Simulator, GatingIsSound) {
  for (const char* arch : {"n2n_4x4", "hycube_4x4", "pace_8x8"})
    for (const auto& k : kernel_names()) {
      const auto pl = build(k, arch);
      const auto bundle = gen_vectors(pl.p.dfg, pl.p.layout, memory_geometry(pl.rg), 11, 12);
      SimOptions on, off;
      off.gating = false;
      const auto a = simulate(pl.rg, pl.bs, bundle.mem_in, 12, on);
      const auto b = simulate(pl.rg, pl.bs, bundle.mem_in, 12, off);
      EXPECT_EQ(a.memory, b.memory);
      EXPECT_EQ(a.stats.cycles, b.stats.cycles);
      bool any_idle = false;
      for (const auto& pe : pl.bs.pes) any_idle |= !pe.idle.empty();
      if (any_idle)
        EXPECT_LT(a.stats.cm_reads, b.stats.cm_reads) << k << " on " << arch;
      else
        EXPECT_EQ(a.stats.cm_reads, b.stats.cm_reads);
      for (const auto& s : {a.stats, b.stats}) {
        EXPECT_EQ(s.active_pe_cycles + s.gated_cycles, s.pe_cycles);
        EXPECT_LE(s.cm_reads, s.pe_cycles);
        EXPECT_EQ(s.pe_cycles, s.cycles * static_cast<long>(pl.rg.pes.size()));
      }
      EXPECT_EQ(b.stats.gated_cycles, 0);
    }
}

TEST(Simulator, MultiHopValueArrivesSameCycle) {
  auto h = three_hops("hycube_4x4", 2);
  ASSERT_TRUE(check_mapping(h.dfg, h.rg, h.m).empty());
  int links = 0;
  for (const auto& s : h.m.routes[0]) links += h.rg.resources[s.resource].kind == ResourceKind::Link;
  EXPECT_EQ(links, 3);
  const auto bs = extract_bitstream(h.dfg, h.rg, h.m);
  std::map<int, std::vector<std::pair<long, Tagged>>> seen;
  SimOptions opts;
  opts.probe = [&](long cycle, int r, const Tagged& v) { seen[r].push_back({cycle, v}); };
  auto mem = MemoryImage::zeros(memory_geometry(h.rg));
  simulate(h.rg, bs, mem, 1, opts);
  auto value_at = [&](int r, long cycle) -> std::optional<Tagged> {
    for (const auto& [c, v] : seen[r])
      if (c == cycle) return v;
    return std::nullopt;
  };
  const auto produced = value_at(h.rg.find("pe_0_0.fu.out"), 1);
  const auto consumed = value_at(h.rg.find("pe_0_3.fu.a"), 1);
  ASSERT_TRUE(produced && consumed);
  EXPECT_EQ(*produced, (Tagged{5, true}));
  EXPECT_EQ(*consumed, (Tagged{5, true}));
  for (const auto& s : h.m.routes[0]) EXPECT_EQ(value_at(s.resource, 1), (Tagged{5, true}));
}

TEST(Simulator, TraceFormat) {
  const auto pl = build("predicated-select", "hycube_4x4");
  const auto bundle = gen_vectors(pl.p.dfg, pl.p.layout, memory_geometry(pl.rg), 1, 4);
  std::ostringstream trace;
  SimOptions opts;
  opts.trace = &trace;
  simulate(pl.rg, pl.bs, bundle.mem_in, 4, opts);
  const std::regex line(R"(\d+ pe_\d+_\d+\.fu [a-z0-9_]+ [A-Z]+ iter=\d+ value=([0-9a-f]+|x))");
  std::istringstream in(trace.str());
  std::string l;
  int lines = 0;
  while (std::getline(in, l)) {
    EXPECT_TRUE(std::regex_match(l, line)) << l;
    ++lines;
  }
  EXPECT_EQ(lines, 4 * pl.p.dfg.size());
}

TEST(Energy, ZeroModel) {
  const auto pl = build("fir", "hycube_4x4");
  const auto sim = simulate(pl.rg, pl.bs, MemoryImage::zeros(memory_geometry(pl.rg)), 8);
  EnergyModel zero{0, 0, 0, 0, 0, 0};
  EXPECT_EQ(estimate_energy(sim.stats, zero).total, 0);
}

TEST(Energy, LinearInCosts) {
  const auto pl = build("fir", "hycube_4x4");
  const auto sim = simulate(pl.rg, pl.bs, MemoryImage::zeros(memory_geometry(pl.rg)), 8);
  EnergyModel base, doubled;
  doubled.cm_read *= 2;
  const auto a = estimate_energy(sim.stats, base), b = estimate_energy(sim.stats, doubled);
  ASSERT_EQ(a.breakdown.front().first, "cm");
  EXPECT_DOUBLE_EQ(b.breakdown.front().second, 2 * a.breakdown.front().second);
  for (std::size_t i = 1; i < a.breakdown.size(); ++i) EXPECT_DOUBLE_EQ(a.breakdown[i].second, b.breakdown[i].second);
  double pct = 0;
  for (const auto& [name, p] : a.percent) pct += p;
  EXPECT_NEAR(pct, 100.0, 1e-9);
  EXPECT_DOUBLE_EQ(a.breakdown.front().second, base.cm_read * sim.stats.cm_reads);
}

TEST(Energy, ConfigMemoryDominatesDenseKernels) {
  for (const char* k : {"gemm-tile", "fir", "stencil-3pt"}) {
    const auto pl = build(k, "hycube_4x4");
    const auto bundle = gen_vectors(pl.p.dfg, pl.p.layout, memory_geometry(pl.rg), 2, 8);
    const auto e = estimate_energy(simulate(pl.rg, pl.bs, bundle.mem_in, 8).stats);
    for (std::size_t i = 1; i < e.breakdown.size(); ++i)
      EXPECT_GT(e.breakdown[0].second, e.breakdown[i].second) << k << " vs " << e.breakdown[i].first;
  }
}

TEST(Energy, ModelParsing) {
  const auto m = parse_energy_model(R"({"cm_read": 1, "alu_op": 0.5})");
  EXPECT_EQ(m.cm_read, 1);
  EXPECT_EQ(m.alu_op, 0.5);
  EXPECT_EQ(m.mu_access, EnergyModel{}.mu_access);
  EXPECT_THROW(parse_energy_model(R"({"cm_read": -1})"), Error);
  EXPECT_THROW(parse_energy_model(R"({"dram": 1})"), Error);
}
