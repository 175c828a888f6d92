#include "cgra/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cgra/layout.hpp"
#include "cgra/memory.hpp"
#include "cgra/oracle.hpp"
#include "cgra/simulator.hpp"
#include "json_util.hpp"

namespace cgra {

using detail::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Prepared {
  ArchSpec spec;
  RoutingGraph rg;
  Dfg dfg;       // as written
  Dfg embedded;  // with layout addresses
  LayoutFile layout;
};

Prepared prepare(const std::string& arch_ref, const std::string& dfg_ref) {
  Prepared p;
  p.spec = resolve_arch(arch_ref);
  p.rg = elaborate(p.spec);
  p.dfg = resolve_dfg(dfg_ref);
  p.layout = assign_layout(p.dfg, memory_geometry(p.rg));
  p.embedded = embed_addresses(p.dfg, p.layout);
  return p;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create output directory '" + dir + "'");
  const auto probe = fs::path(dir) / ".cgra_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw Error(ErrorCode::IoError, "output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

std::string path_in(const RunManifest& m, const std::string& file) { return (fs::path(m.out_dir) / file).string(); }

const std::string& single_dfg(const RunManifest& m) {
  if (m.dfgs.size() != 1) throw Error(ErrorCode::SchemaError, "expected exactly one --dfg");
  return m.dfgs.front();
}

json attempts_json(const std::vector<AttemptLog>& attempts) {
  json out = json::array();
  for (const auto& a : attempts) {
    json aj{{"ii", a.ii}, {"success", a.success}, {"rounds", a.rounds}, {"overuse", a.overuse}, {"unrouted", a.unrouted}};
    if (!a.note.empty()) aj["note"] = a.note;
    out.push_back(aj);
  }
  return out;
}

std::string with_wall_time(const std::string& doc, double wall) {
  json j = json::parse(doc);
  j["wall_time_s"] = wall;
  return j.dump(1) + "\n";
}

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::MappingFailed || e.code() == ErrorCode::ConfigOverflow ? kExitMappingFailed
                                                                                       : kExitUsage;
}

// Runs a command body, turning exceptions into the exit-code contract.
template <class Body>
int guarded(const RunManifest& m, std::ostream& err, Clock::time_point t0, Body&& body) {
  try {
    return body();
  } catch (const MappingFailedError& e) {
    json j;
    j["status"] = "failed";
    j["code"] = error_code_name(e.code());
    j["message"] = e.what();
    j["mii"] = {{"res", e.mii.res_mii}, {"rec", e.mii.rec_mii}, {"mii", e.mii.mii}};
    j["attempts"] = attempts_json(e.attempts);
    j["wall_time_s"] = seconds_since(t0);
    try {
      detail::write_file(path_in(m, "report.json"), j.dump(1) + "\n");
    } catch (const Error&) {
    }
    err << error_report_json(e);
    return kExitMappingFailed;
  } catch (const Error& e) {
    try {
      if (fs::is_directory(m.out_dir)) detail::write_file(path_in(m, "error.json"), error_report_json(e));
    } catch (const Error&) {
    }
    err << error_report_json(e);
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << error_report_json(e);
    return kExitUsage;
  }
}

std::string csv_cell(const std::optional<int>& ii) { return ii ? std::to_string(*ii) : "-"; }

// Maps one prepared kernel and writes the mapping artifacts.
Bitstream map_and_write(const RunManifest& m, const Prepared& p, Clock::time_point t0, std::ostream& out) {
  const auto cfg = manifest_config(m);
  const MapResult r = map(p.embedded, p.rg, cfg);
  const Bitstream bs = extract_bitstream(p.embedded, p.rg, r.mapping);
  detail::write_file(path_in(m, "mapping.json"), mapping_to_json(p.embedded, p.rg, r.mapping));
  detail::write_file(path_in(m, "bitstream.json"), serialize_bitstream(bs, p.rg));
  detail::write_file(path_in(m, "report.json"), with_wall_time(map_report_json(p.embedded, p.rg, r), seconds_since(t0)));
  std::ostringstream csv;
  csv << "kernel,arch,ii,mii,res_mii,rec_mii,schedule_length\n"
      << p.dfg.name << ',' << p.spec.name << ',' << r.mapping.ii << ',' << r.mii.mii << ',' << r.mii.res_mii << ','
      << r.mii.rec_mii << ',' << schedule_length(p.embedded, p.rg, r.mapping) << '\n';
  detail::write_file(path_in(m, "report.csv"), csv.str());
  out << p.dfg.name << " on " << p.spec.name << ": II " << r.mapping.ii << " (MII " << r.mii.mii << ")\n";
  return bs;
}

std::optional<Mapping> try_map(const Dfg& dfg, const RoutingGraph& rg, const MapperConfig& cfg) {
  try {
    return map(dfg, rg, cfg).mapping;
  } catch (const MappingFailedError&) {
    return std::nullopt;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigOverflow) return std::nullopt;
    throw;
  }
}

std::string hop_label(int h) { return std::to_string(h) + (h == 1 ? " hop" : " hops"); }

}  // namespace

MapperConfig manifest_config(const RunManifest& m) {
  MapperConfig cfg = m.config.empty() ? MapperConfig{} : parse_mapper_config(detail::read_file(m.config));
  if (m.seed) cfg.seed = *m.seed;
  if (m.strategy) cfg.strategy = *m.strategy;
  if (m.max_ii) cfg.max_ii = *m.max_ii;
  if (m.hop_limit) cfg.hop_limit = *m.hop_limit;
  return cfg;
}

std::vector<std::string> manifest_kernels(const RunManifest& m, const std::string& tag) {
  if (!m.dfgs.empty()) return m.dfgs;
  std::vector<std::string> out;
  for (const auto& name : kernel_names()) {
    if (!tag.empty()) {
      const auto tags = bundled_kernel(name).tags;
      if (std::find(tags.begin(), tags.end(), tag) == tags.end()) continue;
    }
    out.push_back("kernel:" + name);
  }
  return out;
}

// --- hop sweep -------------------------------------------------------------------

HopSweep sweep_hops(const RunManifest& m, const std::vector<int>& hops) {
  if (hops.empty()) throw Error(ErrorCode::SchemaError, "hop list is empty");
  for (int h : hops)
    if (h < 1) throw Error(ErrorCode::SchemaError, "hop limits must be >= 1");
  HopSweep sweep;
  sweep.hops = hops;
  for (const auto& ref : manifest_kernels(m, "fanout")) {
    const Prepared p = prepare(m.arch, ref);
    sweep.arch = p.spec.name;
    HopSweep::Row row;
    row.kernel = p.dfg.name;
    for (int h : hops) {
      RunManifest hm = m;
      hm.hop_limit = h;
      auto mapping = try_map(p.embedded, p.rg, manifest_config(hm));
      row.ii.push_back(mapping ? std::optional<int>(mapping->ii) : std::nullopt);
      if (mapping) row.mappings.push_back(std::move(*mapping));
    }
    for (std::size_t i = 1; i < row.ii.size(); ++i) {
      const auto& a = row.ii[i - 1];
      const auto& b = row.ii[i];
      if (a && (!b || *b > *a)) row.monotone = false;
    }
    sweep.rows.push_back(std::move(row));
  }
  return sweep;
}

std::string HopSweep::to_csv() const {
  std::ostringstream s;
  s << "kernel";
  for (int h : hops) s << ",hop_" << h;
  s << ",monotone\n";
  for (const auto& r : rows) {
    s << r.kernel;
    for (const auto& ii : r.ii) s << ',' << csv_cell(ii);
    s << ',' << (r.monotone ? "yes" : "no") << '\n';
  }
  return s.str();
}

std::string HopSweep::to_markdown() const {
  std::ostringstream s;
  s << "| Kernel |";
  for (int h : hops) s << ' ' << hop_label(h) << " |";
  s << "\n|---|";
  for (std::size_t i = 0; i < hops.size(); ++i) s << "---|";
  s << '\n';
  for (const auto& r : rows) {
    s << "| " << r.kernel << (r.monotone ? "" : " (non-monotone)") << " |";
    for (const auto& ii : r.ii) s << ' ' << csv_cell(ii) << " |";
    s << '\n';
  }
  return s.str();
}

std::string HopSweep::to_json() const {
  json j;
  j["arch"] = arch;
  j["hops"] = hops;
  json rs = json::array();
  for (const auto& r : rows) {
    json ii = json::array();
    for (const auto& v : r.ii) ii.push_back(v ? json(*v) : json(nullptr));
    rs.push_back({{"kernel", r.kernel}, {"ii", ii}, {"monotone", r.monotone}});
  }
  j["rows"] = rs;
  return j.dump(1) + "\n";
}

// --- quadrants -------------------------------------------------------------------

QuadrantComparison compare_quadrants(const RunManifest& m) {
  QuadrantComparison q;
  const std::string spatial_ref = m.spatial_arch.empty() ? m.arch : m.spatial_arch;
  for (const auto& ref : manifest_kernels(m)) {
    const Prepared st = prepare(m.arch, ref);
    const Prepared sp = prepare(spatial_ref, ref);
    q.temporal_arch = st.spec.name;
    q.spatial_arch = sp.spec.name;
    QuadrantComparison::Row row;
    row.kernel = st.dfg.name;
    RunManifest sm = m;
    sm.max_ii = 1;
    if (auto mp = try_map(sp.embedded, sp.rg, manifest_config(sm))) {
      row.spatial = mp->ii;
      row.mappings.push_back(std::move(*mp));
    }
    if (auto mp = try_map(st.embedded, st.rg, manifest_config(m))) {
      row.temporal = mp->ii;
      row.mappings.push_back(std::move(*mp));
    }
    q.rows.push_back(std::move(row));
  }
  return q;
}

std::string QuadrantComparison::to_csv() const {
  std::ostringstream s;
  s << "kernel,spatial_ii,spatio_temporal_ii\n";
  for (const auto& r : rows) s << r.kernel << ',' << csv_cell(r.spatial) << ',' << csv_cell(r.temporal) << '\n';
  return s.str();
}

std::string QuadrantComparison::to_markdown() const {
  std::ostringstream s;
  s << "| Kernel | spatial (" << spatial_arch << ", II=1) | spatio-temporal (" << temporal_arch << ") |\n|---|---|---|\n";
  auto cell = [](const std::optional<int>& ii) { return ii ? std::to_string(*ii) : std::string("infeasible"); };
  for (const auto& r : rows) s << "| " << r.kernel << " | " << cell(r.spatial) << " | " << cell(r.temporal) << " |\n";
  return s.str();
}

std::string QuadrantComparison::to_json() const {
  json j;
  j["spatial_arch"] = spatial_arch;
  j["spatio_temporal_arch"] = temporal_arch;
  json rs = json::array();
  auto cell = [](const std::optional<int>& ii) { return ii ? json(*ii) : json(nullptr); };
  for (const auto& r : rows)
    rs.push_back({{"kernel", r.kernel}, {"spatial_ii", cell(r.spatial)}, {"spatio_temporal_ii", cell(r.temporal)}});
  j["rows"] = rs;
  return j.dump(1) + "\n";
}

// --- commands --------------------------------------------------------------------

int cmd_map(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  return guarded(m, err, t0, [&] {
    ensure_dir(m.out_dir);
    const Prepared p = prepare(m.arch, single_dfg(m));
    detail::write_file(path_in(m, "layout.json"), serialize_layout(p.layout));
    map_and_write(m, p, t0, out);
    return kExitOk;
  });
}

int cmd_validate(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  return guarded(m, err, t0, [&] {
    ensure_dir(m.out_dir);
    const Prepared p = prepare(m.arch, single_dfg(m));
    detail::write_file(path_in(m, "layout.json"), serialize_layout(p.layout));
    const Bitstream bs = m.bitstream.empty() ? map_and_write(m, p, t0, out)
                                             : parse_bitstream(detail::read_file(m.bitstream), p.rg);
    const int iterations = m.iterations > 0 ? m.iterations : p.dfg.iteration_count_hint.value_or(16);
    const std::uint64_t seed = manifest_config(m).seed;
    TestBundle bundle = gen_vectors(p.dfg, p.layout, memory_geometry(p.rg), seed, iterations);
    bundle.arch = p.spec.name;
    write_bundle(path_in(m, "bundle"), bundle);

    SimOptions opts;
    std::ofstream trace;
    if (m.trace) {
      trace.open(path_in(m, "trace.txt"));
      if (!trace) throw Error(ErrorCode::IoError, "cannot write trace file");
      opts.trace = &trace;
    }
    const Verdict v = validate(p.rg, bs, p.layout, bundle, opts);
    const EnergyModel model = m.energy_model.empty() ? EnergyModel{}
                                                     : parse_energy_model(detail::read_file(m.energy_model));
    detail::write_file(path_in(m, "verdict.json"), verdict_to_json(v, p.rg.word_width));
    detail::write_file(path_in(m, "energy.json"), energy_to_json(estimate_energy(v.stats, model)));
    out << (v.pass ? "PASS" : "FAIL");
    if (!v.pass) out << " (" << v.mismatch_count << " mismatching words" << (v.error.empty() ? "" : "; " + v.error) << ")";
    out << '\n';
    return v.pass ? kExitOk : kExitValidationFailed;
  });
}

int cmd_sweep_hops(const RunManifest& m, const std::vector<int>& hops, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  return guarded(m, err, t0, [&] {
    ensure_dir(m.out_dir);
    const HopSweep sweep = sweep_hops(m, hops);
    detail::write_file(path_in(m, "sweep_hops.csv"), sweep.to_csv());
    detail::write_file(path_in(m, "sweep_hops.md"), sweep.to_markdown());
    detail::write_file(path_in(m, "sweep_hops.json"), with_wall_time(sweep.to_json(), seconds_since(t0)));
    out << sweep.to_markdown();
    return kExitOk;
  });
}

int cmd_compare_quadrants(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  return guarded(m, err, t0, [&] {
    ensure_dir(m.out_dir);
    const QuadrantComparison q = compare_quadrants(m);
    detail::write_file(path_in(m, "quadrants.csv"), q.to_csv());
    detail::write_file(path_in(m, "quadrants.md"), q.to_markdown());
    detail::write_file(path_in(m, "quadrants.json"), with_wall_time(q.to_json(), seconds_since(t0)));
    out << q.to_markdown();
    return kExitOk;
  });
}

std::string error_report_json(const std::exception& e) {
  json j;
  j["status"] = "error";
  if (const auto* ce = dynamic_cast<const Error*>(&e))
    j["code"] = error_code_name(ce->code());
  else
    j["code"] = "Internal";
  j["message"] = e.what();
  return j.dump(1) + "\n";
}

}  // namespace cgra
