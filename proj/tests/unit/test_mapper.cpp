#include <gtest/gtest.h>

#include "cgra/mapper.hpp"
#include "exhaustive.hpp"
#include "support.hpp"

using namespace cgra;
using support::edge;
using support::json;

namespace {

std::vector<RouteStep> routed(const Mrrg& m, int value, RouteStep from, int to, long arrival) {
  std::vector<RouteStep> steps{from};
  const auto r = route_edge(m, value, steps, to, arrival);
  steps.insert(steps.end(), r.steps.begin(), r.steps.end());
  return steps;
}

struct Instance {
  Dfg dfg;
  RoutingGraph rg;
  Mapping mapping;
};

// a on pe_0_0 and b on pe_0_1 both feed c on pe_0_2. Each edge alone takes
// the eastward links, so b's route collides with a's on pe_0_1.out_e. b has
// a free detour through row 1.
Instance shared_port() {
  Instance in;
  in.rg = support::fabric("hycube_4x4");
  in.dfg = support::make_dfg(json::array({{{"id", "a"}, {"opcode", "ADD"}},
                                          {{"id", "b"}, {"opcode", "ADD"}},
                                          {{"id", "c"}, {"opcode", "ADD"}}}),
                             {edge("a", "c"), edge("b", "c", "right")});
  const auto& rg = in.rg;
  auto fu = [&](const char* n) { return support::fu_index(rg, n); };
  Mapping& m = in.mapping;
  m.arch_name = rg.arch_name;
  m.ii = 2;
  m.hop_limit = 4;
  m.placement = {{fu("pe_0_0.fu"), 0, -1}, {fu("pe_0_1.fu"), 0, -1}, {fu("pe_0_2.fu"), 1, -1}};
  Mrrg empty(rg, m.ii, m.hop_limit);
  m.routes = {routed(empty, 0, {rg.find("pe_0_0.fu.out"), 1, 0}, rg.find("pe_0_2.fu.a"), 1),
              routed(empty, 1, {rg.find("pe_0_1.fu.out"), 1, 0}, rg.find("pe_0_2.fu.b"), 1)};
  return in;
}

// A SELECT whose three operands come from three other PEs of a 2x2 mesh at
// II=1. Every PE has exactly two input ports and each carries one value per
// cycle, so three distinct values can never reach one FU.
Instance three_into_two() {
  Instance in;
  in.rg = support::fabric("n2n_2x2");
  in.dfg = support::make_dfg(
      json::array({{{"id", "p1"}, {"opcode", "ADD"}}, {{"id", "p2"}, {"opcode", "ADD"}},
                   {{"id", "p3"}, {"opcode", "CMP"}}, {{"id", "s"}, {"opcode", "SELECT"}}}),
      {edge("p1", "s"), edge("p2", "s", "right"),
       {{"src", "p3"}, {"dst", "s"}, {"kind", "predicate"}, {"slot", "pred"}}});
  const auto& rg = in.rg;
  auto fu = [&](const char* n) { return support::fu_index(rg, n); };
  Mapping& m = in.mapping;
  m.arch_name = rg.arch_name;
  m.ii = 1;
  m.hop_limit = 1;
  m.placement = {{fu("pe_0_1.fu"), 0, -1}, {fu("pe_1_0.fu"), 0, -1}, {fu("pe_1_1.fu"), 0, -1}, {fu("pe_0_0.fu"), 3, -1}};
  Mrrg empty(rg, 1, 1);
  m.routes = {routed(empty, 0, {rg.find("pe_0_1.fu.out"), 1, 0}, rg.find("pe_0_0.fu.a"), 3),
              routed(empty, 1, {rg.find("pe_1_0.fu.out"), 1, 0}, rg.find("pe_0_0.fu.b"), 3),
              routed(empty, 2, {rg.find("pe_1_1.fu.out"), 1, 0}, rg.find("pe_0_0.fu.p"), 3)};
  return in;
}

bool legal(const Instance& in, const Mapping& m) {
  const auto bad = check_mapping(in.dfg, in.rg, m);
  for (const auto& b : bad) ADD_FAILURE() << b;
  return bad.empty();
}

int ii_of(const std::string& kernel, const std::string& arch, MapperConfig cfg = {}) {
  const auto rg = support::fabric(arch);
  const auto p = support::prepare(kernel, rg);
  const auto r = map(p.dfg, rg, cfg);
  EXPECT_TRUE(check_mapping(p.dfg, rg, r.mapping).empty()) << kernel << " on " << arch;
  EXPECT_GE(r.mapping.ii, r.mii.mii);
  return r.mapping.ii;
}

}  // namespace

TEST(Mapper, Fig5OnN2nNeedsThreeCycles) { EXPECT_EQ(ii_of("fig5", "n2n_2x2"), 3); }

TEST(Mapper, Fig5OnHycubeNeedsTwo) { EXPECT_EQ(ii_of("fig5", "hycube_2x2"), 2); }

TEST(Mapper, VecaddOnHycube4x4) {
  EXPECT_EQ(ii_of("vecadd", "hycube_4x4"), 1);
  const auto rg = support::fabric("hycube_4x4");
  const auto p = support::prepare("vecadd", rg);
  const auto ex = oracle::exhaustive_map(p.dfg, rg, 1, rg.hop_limit);
  EXPECT_TRUE(ex.found);
  EXPECT_TRUE(check_mapping(p.dfg, rg, ex.mapping).empty());
}

TEST(Mapper, AttemptsStartAtMii) {
  const auto rg = support::fabric("n2n_2x2");
  const auto p = support::prepare("fig5", rg);
  const auto r = map(p.dfg, rg);
  ASSERT_FALSE(r.attempts.empty());
  EXPECT_EQ(r.attempts.front().ii, r.mii.mii);
  EXPECT_TRUE(r.attempts.back().success);
  EXPECT_EQ(r.attempts.back().ii, r.mapping.ii);
  EXPECT_TRUE(r.mapping.oversubscribed.empty());
}

TEST(Mapper, FailureCarriesBestAttempt) {
  const auto rg = support::fabric("n2n_2x2");
  const auto p = support::prepare("fig5", rg);
  MapperConfig cfg;
  cfg.max_ii = 2;
  try {
    map(p.dfg, rg, cfg);
    FAIL();
  } catch (const MappingFailedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::MappingFailed);
    EXPECT_FALSE(e.attempts.empty());
    EXPECT_EQ(e.mii.mii, 2);
  }
}

TEST(Mapper, Deterministic) {
  const auto rg = support::fabric("hycube_4x4");
  for (const char* k : {"fir", "gemm-tile", "hub-6"}) {
    const auto p = support::prepare(k, rg);
    for (Strategy s : {Strategy::Adaptive, Strategy::Sa}) {
      MapperConfig cfg;
      cfg.strategy = s;
      cfg.seed = 42;
      EXPECT_EQ(map(p.dfg, rg, cfg).mapping, map(p.dfg, rg, cfg).mapping) << k;
    }
  }
}

TEST(Mapper, EveryKernelEveryPresetIsLegal) {
  for (const auto& arch : preset_names()) {
    const auto rg = support::fabric(arch);
    for (const auto& k : kernel_names()) {
      const auto p = support::prepare(k, rg);
      const auto r = map(p.dfg, rg);
      const auto bad = check_mapping(p.dfg, rg, r.mapping);
      EXPECT_TRUE(bad.empty()) << k << " on " << arch << ": " << (bad.empty() ? "" : bad.front());
      EXPECT_GE(r.mapping.ii, r.mii.mii);
      EXPECT_EQ(mapping_from_json(mapping_to_json(p.dfg, rg, r.mapping), p.dfg, rg), r.mapping);
    }
  }
}

TEST(Mapper, PaceConfigMemoryCapsIi) {
  const auto spec = preset("pace_8x8");
  EXPECT_EQ(spec.max_config_ii(), spec.config_bytes_per_pe / spec.instruction_bytes);
  EXPECT_EQ(preset("hycube_4x4").max_config_ii(), 0);
}

// Small kernels on 2x2 fabrics: the mapper must reach the exhaustive minimum.
TEST(Mapper, MatchesExhaustiveOnSmallInstances) {
  for (const char* arch : {"n2n_2x2", "hycube_2x2"}) {
    const auto rg = support::fabric(arch);
    for (const auto& k : kernel_names()) {
      const auto p = support::prepare(k, rg);
      if (p.dfg.size() > 8) continue;
      const auto ex = oracle::exhaustive_min_ii(p.dfg, rg, 3, rg.hop_limit);
      ASSERT_TRUE(ex.complete) << k << " on " << arch;
      int got = 0;
      try {
        MapperConfig cfg;
        cfg.max_ii = 3;
        got = map(p.dfg, rg, cfg).mapping.ii;
      } catch (const MappingFailedError&) {
        got = 0;
      }
      if (ex.ii) {
        EXPECT_EQ(got, *ex.ii) << k << " on " << arch;
      } else {
        EXPECT_EQ(got, 0) << k << " on " << arch << " mapped below the exhaustive bound";
      }
    }
  }
}

TEST(Resolve, AdaptiveMigratesOneEdge) {
  auto in = shared_port();
  Mrrg m(in.rg, in.mapping.ii, in.mapping.hop_limit);
  load_occupancy(in.dfg, m, in.mapping);
  EXPECT_GT(m.total_overuse(), 0);

  Mrrg fresh(in.rg, in.mapping.ii, in.mapping.hop_limit);
  Mapping out = in.mapping;
  ASSERT_TRUE(resolve_adaptive(in.dfg, fresh, out, MapperConfig{}));
  EXPECT_TRUE(legal(in, out));
  EXPECT_EQ(out.placement, in.mapping.placement);
  EXPECT_TRUE(out.routes[0] == in.mapping.routes[0] || out.routes[1] == in.mapping.routes[1]);
  EXPECT_EQ(fresh.total_overuse(), 0);
}

TEST(Resolve, AdaptiveFixpoint) {
  const auto rg = support::fabric("hycube_4x4");
  const auto p = support::prepare("fir", rg);
  const auto mapped = map(p.dfg, rg).mapping;
  Mapping again = mapped;
  Mrrg m(rg, mapped.ii, mapped.hop_limit);
  EXPECT_TRUE(resolve_adaptive(p.dfg, m, again, MapperConfig{}));
  EXPECT_EQ(again.placement, mapped.placement);
  EXPECT_EQ(again.routes, mapped.routes);
}

TEST(Resolve, AdaptiveReportsImpossibleCut) {
  auto in = three_into_two();
  for (const auto& pe : in.rg.pes) {
    int inputs = 0;
    for (int r : pe.resources) {
      const auto& res = in.rg.resources[r];
      inputs += res.kind == ResourceKind::InPort && res.fu < 0 && !in.rg.fanin[r].empty();
    }
    EXPECT_EQ(inputs, 2) << pe.name;
  }
  Mrrg m(in.rg, 1, 1);
  Mapping out = in.mapping;
  EXPECT_FALSE(resolve_adaptive(in.dfg, m, out, MapperConfig{}));
  EXPECT_FALSE(check_mapping(in.dfg, in.rg, out).empty());
}

TEST(Resolve, SaDeterministicForSeed) {
  auto in = shared_port();
  MapperConfig cfg;
  cfg.seed = 17;
  Mapping a = in.mapping, b = in.mapping;
  Mrrg ma(in.rg, 2, 4), mb(in.rg, 2, 4);
  const bool ra = resolve_sa(in.dfg, ma, a, cfg);
  const bool rb = resolve_sa(in.dfg, mb, b, cfg);
  EXPECT_EQ(ra, rb);
  EXPECT_EQ(a, b);
}

TEST(Resolve, SaClearsSharedPort) {
  auto in = shared_port();
  Mrrg m(in.rg, 2, 4);
  Mapping out = in.mapping;
  ASSERT_TRUE(resolve_sa(in.dfg, m, out, MapperConfig{}));
  EXPECT_TRUE(legal(in, out));
}

TEST(Resolve, SaGivesUpBelowMinTemperature) {
  auto in = three_into_two();
  MapperConfig cfg;
  cfg.sa_t0 = 0.001;
  cfg.sa_tmin = 0.01;
  Mrrg m(in.rg, 1, 1);
  Mapping out = in.mapping;
  EXPECT_FALSE(resolve_sa(in.dfg, m, out, cfg));
  EXPECT_FALSE(out.oversubscribed.empty());
}

TEST(MapperConfig, RoundTripAndValidation) {
  MapperConfig cfg;
  cfg.strategy = Strategy::Sa;
  cfg.seed = 99;
  cfg.hop_limit = 2;
  EXPECT_EQ(parse_mapper_config(serialize_mapper_config(cfg)), cfg);
  for (const char* bad : {R"({"sa_cooling": 1.5})", R"({"escalation": 1.0})",
                          R"({"restarts": 0})", R"({"unknown": 1})", R"({"strategy": "greedy"})"}) {
    try {
      parse_mapper_config(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::SchemaError) << bad;
    }
  }
}
