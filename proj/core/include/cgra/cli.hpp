#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cgra/mapper.hpp"

namespace cgra {

struct RunManifest {
  std::string arch;               // path or preset:NAME
  std::vector<std::string> dfgs;  // paths or kernel:NAME; sweeps fall back to bundled kernels
  std::string config;             // mapper config path, optional
  std::optional<std::uint64_t> seed;
  std::optional<Strategy> strategy;
  std::optional<int> max_ii;
  std::optional<int> hop_limit;
  std::string out_dir = ".";
  bool trace = false;
  int iterations = 0;         // 0: kernel hint, else 16
  std::string bitstream;      // validate an existing bitstream instead of mapping
  std::string spatial_arch;   // compare-quadrants; defaults to arch
  std::string energy_model;   // energy cost table, optional
};

// Exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMappingFailed = 2;
inline constexpr int kExitValidationFailed = 3;

// Mapper configuration after applying the manifest's overrides.
MapperConfig manifest_config(const RunManifest& m);

struct HopSweep {
  struct Row {
    std::string kernel;
    std::vector<std::optional<int>> ii;  // one per hop limit; nullopt = no mapping
    std::vector<Mapping> mappings;       // successful mappings, in hop order
    bool monotone = true;                // II never rises as the hop limit grows
  };
  std::string arch;
  std::vector<int> hops;
  std::vector<Row> rows;

  std::string to_csv() const;
  std::string to_markdown() const;
  std::string to_json() const;
};

struct QuadrantComparison {
  struct Row {
    std::string kernel;
    std::optional<int> spatial;
    std::optional<int> temporal;
    std::vector<Mapping> mappings;
  };
  std::string spatial_arch;
  std::string temporal_arch;
  std::vector<Row> rows;

  std::string to_csv() const;
  std::string to_markdown() const;
  std::string to_json() const;
};

// Kernels named by the manifest, or the bundled ones (optionally only those tagged `tag`).
std::vector<std::string> manifest_kernels(const RunManifest& m, const std::string& tag = "");

HopSweep sweep_hops(const RunManifest& m, const std::vector<int>& hops);
// Spatial column: the spatial fabric with max_ii forced to 1.
QuadrantComparison compare_quadrants(const RunManifest& m);

// Commands write artifacts under m.out_dir, print a short summary to `out`,
// and report errors as JSON on `err`. They return the exit code.
int cmd_map(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_validate(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_sweep_hops(const RunManifest& m, const std::vector<int>& hops, std::ostream& out, std::ostream& err);
int cmd_compare_quadrants(const RunManifest& m, std::ostream& out, std::ostream& err);

std::string error_report_json(const std::exception& e);

}  // namespace cgra
