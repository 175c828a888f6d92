#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "cgra/mapper.hpp"
#include "cgra/oracle.hpp"
#include "support.hpp"

using namespace cgra;

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

}  // namespace

TEST(GenVectors, DeterministicPerSeed) {
  const auto rg = support::fabric("n2n_4x4");
  for (const auto& k : kernel_names()) {
    const auto p = support::prepare(k, rg);
    const auto a = gen_vectors(p.dfg, p.layout, memory_geometry(rg), 1, 8);
    EXPECT_EQ(a, gen_vectors(p.dfg, p.layout, memory_geometry(rg), 1, 8)) << k;
    if (!p.dfg.live_in.empty())
      EXPECT_NE(a.mem_in, gen_vectors(p.dfg, p.layout, memory_geometry(rg), 2, 8).mem_in) << k;
    EXPECT_EQ(a.expected, reference_execute(p.dfg, a.mem_in, p.layout, 8));
  }
}

TEST(GenVectors, OnlyLiveInsAreRandom) {
  const auto rg = support::fabric("n2n_4x4");
  const auto p = support::prepare("vecadd", rg);
  const auto b = gen_vectors(p.dfg, p.layout, memory_geometry(rg), 9, 4);
  const auto c = support::peek(b.mem_in, p.layout, "c");
  EXPECT_TRUE(std::all_of(c.begin(), c.end(), [](long long v) { return v == 0; }));
  int nonzero = 0;
  for (long long v : support::peek(b.mem_in, p.layout, "a")) nonzero += v != 0;
  EXPECT_GT(nonzero, 0);
}

TEST(GenVectors, ZeroIterationsIsIdentity) {
  const auto rg = support::fabric("pace_8x8");
  for (const auto& k : kernel_names()) {
    const auto p = support::prepare(k, rg);
    const auto b = gen_vectors(p.dfg, p.layout, memory_geometry(rg), 4, 0);
    EXPECT_EQ(b.expected, b.mem_in) << k;
    for (const auto& bank : b.mem_in.banks)
      for (Word w : bank) EXPECT_EQ(w, truncate(w, 16));
  }
}

TEST(Validate, VecaddPasses) {
  const auto pl = build("vecadd", "hycube_4x4");
  const auto bundle = gen_vectors(pl.p.dfg, pl.p.layout, memory_geometry(pl.rg), 1, 16);
  const auto v = validate(pl.rg, pl.bs, pl.p.layout, bundle);
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.mismatch_count, 0);
  EXPECT_TRUE(v.error.empty());
}

TEST(Validate, CorruptedOpcodeFails) {
  const auto pl = build("vecadd", "hycube_4x4");
  const auto bundle = gen_vectors(pl.p.dfg, pl.p.layout, memory_geometry(pl.rg), 1, 16);
  Fault f;
  f.kind = FaultKind::Opcode;
  f.opcode = Opcode::SUB;
  bool found = false;
  for (std::size_t pe = 0; pe < pl.bs.pes.size() && !found; ++pe)
    for (std::size_t s = 0; s < pl.bs.pes[pe].slots.size() && !found; ++s)
      for (std::size_t i = 0; i < pl.bs.pes[pe].slots[s].ops.size(); ++i)
        if (pl.bs.pes[pe].slots[s].ops[i].node == "add") {
          f.pe = static_cast<int>(pe), f.slot = static_cast<int>(s), f.index = static_cast<int>(i);
          found = true;
        }
  ASSERT_TRUE(found);
  EXPECT_TRUE(dead_field_reason(pl.bs, pl.p.dfg, pl.mapping, f).empty());
  const auto v = validate(pl.rg, apply_fault(pl.bs, f), pl.p.layout, bundle);
  EXPECT_FALSE(v.pass);
  EXPECT_GE(v.mismatch_count, 1);
  ASSERT_FALSE(v.mismatches.empty());
  EXPECT_NE(v.mismatches[0].got, v.mismatches[0].want);
}

TEST(Validate, GatingDoesNotChangeVerdicts) {
  for (const char* k : {"fir", "predicated-select", "mix-5"}) {
    const auto pl = build(k, "pace_8x8");
    const auto bundle = gen_vectors(pl.p.dfg, pl.p.layout, memory_geometry(pl.rg), 6, 10);
    SimOptions off;
    off.gating = false;
    const auto a = validate(pl.rg, pl.bs, pl.p.layout, bundle);
    const auto b = validate(pl.rg, pl.bs, pl.p.layout, bundle, off);
    EXPECT_TRUE(a.pass) << k;
    EXPECT_EQ(a.pass, b.pass);
    EXPECT_EQ(a.mismatch_count, b.mismatch_count);
  }
}

TEST(Validate, SimulatorErrorsBecomeFailVerdicts) {
  const auto pl = build("vecadd", "hycube_4x4");
  // 400 iterations run the index past the end of the bank.
  const auto bundle = gen_vectors(pl.p.dfg, pl.p.layout, memory_geometry(pl.rg), 1, 16);
  TestBundle longer = bundle;
  longer.iterations = 400;
  const auto v = validate(pl.rg, pl.bs, pl.p.layout, longer);
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(v.error.empty());
  EXPECT_NE(verdict_to_json(v, 32).find("\"FAIL\""), std::string::npos);
}

TEST(Bundle, DiskRoundTrip) {
  const auto rg = support::fabric("hycube_4x4");
  const auto p = support::prepare("fir", rg);
  auto b = gen_vectors(p.dfg, p.layout, memory_geometry(rg), 77, 12);
  b.kernel = "fir";
  b.arch = "hycube_4x4";
  const auto dir = std::filesystem::temp_directory_path() / "cgra_bundle_test";
  std::filesystem::remove_all(dir);
  write_bundle(dir.string(), b);
  EXPECT_TRUE(std::filesystem::exists(dir / "bundle.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "mem_in_b0.hex"));
  EXPECT_EQ(read_bundle(dir.string()), b);
  std::filesystem::remove_all(dir);
}

TEST(Faults, EveryLiveCorruptionIsCaught) {
  const auto pl = build("vecadd", "hycube_4x4");
  const auto bundle = gen_vectors(pl.p.dfg, pl.p.layout, memory_geometry(pl.rg), 1, 16);
  std::mt19937_64 rng(123);
  int failed = 0, dead = 0;
  for (int i = 0; i < 40; ++i) {
    const Fault f = random_fault(pl.bs, pl.rg, rng);
    const auto v = validate(pl.rg, apply_fault(pl.bs, f), pl.p.layout, bundle);
    if (v.pass) {
      EXPECT_FALSE(dead_field_reason(pl.bs, pl.p.dfg, pl.mapping, f).empty()) << f.description;
      ++dead;
    } else {
      ++failed;
    }
  }
  EXPECT_GT(failed, 0);
  EXPECT_EQ(failed + dead, 40);
}

TEST(Faults, ApplyLeavesOriginalUntouched) {
  const auto pl = build("fir", "n2n_4x4");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const Fault f = random_fault(pl.bs, pl.rg, rng);
    const Bitstream copy = pl.bs;
    EXPECT_NE(apply_fault(pl.bs, f), pl.bs) << f.description;
    EXPECT_EQ(pl.bs, copy);
  }
}
