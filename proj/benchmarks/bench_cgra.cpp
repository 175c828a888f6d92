#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "cgra/arch.hpp"
#include "cgra/dfg.hpp"
#include "cgra/layout.hpp"
#include "cgra/mapper.hpp"
#include "cgra/memory.hpp"
#include "cgra/mii.hpp"
#include "cgra/oracle.hpp"
#include "cgra/router.hpp"
#include "cgra/simulator.hpp"

using namespace cgra;

namespace {

const char* const kPresets[] = {"n2n_4x4", "hycube_4x4", "pace_8x8"};
const char* const kKernels[] = {"vecadd", "fir", "gemm-tile"};

struct Case {
  RoutingGraph rg;
  LayoutFile layout;
  Dfg dfg;
};

Case prepare(const char* arch, const char* kernel, const std::map<std::string, int>& sizes = {}) {
  Case c{elaborate(preset(arch)), {}, bundled_kernel(kernel)};
  const auto geometry = memory_geometry(c.rg);
  c.layout = sizes.empty() ? assign_layout(c.dfg, geometry) : assign_layout(c.dfg, geometry, sizes);
  c.dfg = embed_addresses(c.dfg, c.layout);
  return c;
}

void BM_Mii(benchmark::State& state) {
  const auto c = prepare(kPresets[state.range(0)], kKernels[state.range(1)]);
  for (auto _ : state) benchmark::DoNotOptimize(compute_mii(c.dfg, c.rg));
}
BENCHMARK(BM_Mii)->ArgsProduct({{0, 1, 2}, {0, 1, 2}});

void BM_Map(benchmark::State& state) {
  const auto c = prepare(kPresets[state.range(0)], kKernels[state.range(1)]);
  int ii = 0;
  for (auto _ : state) ii = map(c.dfg, c.rg).mapping.ii;
  state.counters["ii"] = ii;
}
BENCHMARK(BM_Map)->ArgsProduct({{0, 1, 2}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

// One corner-to-corner route on an empty MRRG.
void BM_RouteCorner(benchmark::State& state) {
  const auto rg = elaborate(preset("hycube_4x4"));
  const Mrrg m(rg, static_cast<int>(state.range(0)), 4);
  Router router(m);
  const int from = rg.find("pe_0_0.fu.out"), to = rg.find("pe_3_3.fu.a");
  for (auto _ : state) benchmark::DoNotOptimize(router.route(0, {{from, 1, 0}}, to, 3, {}));
}
BENCHMARK(BM_RouteCorner)->Arg(1)->Arg(4)->Arg(16);

void BM_Simulate(benchmark::State& state) {
  const int iterations = static_cast<int>(state.range(1));
  const auto c = prepare(kPresets[state.range(0)], "fir", {{"x", iterations + 2}, {"y", iterations}});
  const auto bs = extract_bitstream(c.dfg, c.rg, map(c.dfg, c.rg).mapping);
  const auto bundle = gen_vectors(c.dfg, c.layout, memory_geometry(c.rg), 1, iterations);
  SimOptions opts;
  opts.gating = state.range(2) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(c.rg, bs, bundle.mem_in, iterations, opts));
  state.SetItemsProcessed(state.iterations() * iterations);
}
BENCHMARK(BM_Simulate)->ArgsProduct({{0, 1, 2}, {16, 64}, {0, 1}});

}  // namespace

// The packaged benchmark_main archive carries LTO bytecode from another compiler build.
BENCHMARK_MAIN();
