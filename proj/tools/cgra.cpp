#include <iostream>

#include "CLI11.hpp"
#include "cgra/cli.hpp"

namespace {

struct Options {
  cgra::RunManifest manifest;
  std::string strategy;
  std::vector<int> hops{1, 2, 3, 4};
};

void common(CLI::App* cmd, Options& o, bool single_dfg) {
  cmd->add_option("--arch", o.manifest.arch, "Architecture file or preset:NAME")->required();
  auto* dfg = cmd->add_option("--dfg", o.manifest.dfgs, "DFG file or kernel:NAME");
  if (single_dfg) dfg->required()->expected(1);
  cmd->add_option("--config", o.manifest.config, "Mapper configuration JSON")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.manifest.seed, "Mapper and test-vector seed");
  cmd->add_option("--strategy", o.strategy, "Oversubscription resolution")->check(CLI::IsMember({"adaptive", "sa"}));
  cmd->add_option("--max-ii", o.manifest.max_ii, "Largest II to try");
  cmd->add_option("--out", o.manifest.out_dir, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Architecture-adaptive CGRA mapper, simulator and validator"};
  app.require_subcommand(1);
  Options o;

  auto* map = app.add_subcommand("map", "Map a DFG and write mapping, bitstream and report");
  common(map, o, true);
  map->add_option("--hops", o.manifest.hop_limit, "Hop limit override");

  auto* val = app.add_subcommand("validate", "Map, simulate and compare against the reference interpreter");
  common(val, o, true);
  val->add_option("--hops", o.manifest.hop_limit, "Hop limit override");
  val->add_option("--bitstream", o.manifest.bitstream, "Validate this bitstream instead of mapping")
      ->check(CLI::ExistingFile);
  val->add_option("--iterations", o.manifest.iterations, "Loop iterations (default: kernel hint or 16)");
  val->add_option("--energy", o.manifest.energy_model, "Energy cost table JSON")->check(CLI::ExistingFile);
  val->add_flag("--trace", o.manifest.trace, "Write a per-cycle trace");

  auto* sweep = app.add_subcommand("sweep-hops", "II per kernel across hop limits");
  common(sweep, o, false);
  sweep->add_option("--hops", o.hops, "Hop limits")->delimiter(',')->capture_default_str();

  auto* quad = app.add_subcommand("compare-quadrants", "II with and without time multiplexing");
  common(quad, o, false);
  quad->add_option("--spatial-arch", o.manifest.spatial_arch, "Fabric for the spatial column (default: --arch)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cgra::kExitUsage;
  }
  if (!o.strategy.empty()) o.manifest.strategy = cgra::parse_strategy(o.strategy);

  if (*map) return cgra::cmd_map(o.manifest, std::cout, std::cerr);
  if (*val) return cgra::cmd_validate(o.manifest, std::cout, std::cerr);
  if (*sweep) return cgra::cmd_sweep_hops(o.manifest, o.hops, std::cout, std::cerr);
  return cgra::cmd_compare_quadrants(o.manifest, std::cout, std::cerr);
}
