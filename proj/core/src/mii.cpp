#include "cgra/mii.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <tuple>

#include "cgra/error.hpp"

namespace cgra {

std::vector<int> node_latencies(const Dfg& dfg, const RoutingGraph& rg) {
  std::vector<int> lat;
  lat.reserve(dfg.nodes.size());
  for (const auto& n : dfg.nodes) {
    int best = -1;
    for (const auto& fu : rg.fus)
      if (fu.supports(n.opcode)) best = best < 0 ? fu.latency_of(n.opcode) : std::min(best, fu.latency_of(n.opcode));
    if (best < 0)
      throw Error(ErrorCode::MappingFailed,
                  "no FU supports " + std::string(opcode_name(n.opcode)) + " (node '" + n.id + "')");
    lat.push_back(best);
  }
  return lat;
}

std::vector<std::vector<std::int64_t>> longest_paths(const Dfg& dfg, const std::vector<int>& lat, int ii) {
  const int n = dfg.size();
  std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n, kNoPath));
  for (const auto& e : dfg.edges) {
    std::int64_t w = lat[e.src] - static_cast<std::int64_t>(ii) * e.distance;
    d[e.src][e.dst] = std::max(d[e.src][e.dst], w);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      if (d[i][k] == kNoPath) continue;
      for (int j = 0; j < n; ++j)
        if (d[k][j] != kNoPath) d[i][j] = std::max(d[i][j], d[i][k] + d[k][j]);
    }
  return d;
}

namespace {

bool has_positive_cycle(const Dfg& dfg, const std::vector<int>& lat, int ii) {
  auto d = longest_paths(dfg, lat, ii);
  for (int i = 0; i < dfg.size(); ++i)
    if (d[i][i] != kNoPath && d[i][i] > 0) return true;
  return false;
}

int res_mii(const Dfg& dfg, const RoutingGraph& rg) {
  // Hall bound over every subset of the opcodes in use: the ops in the subset
  // can only run on the union of the FUs supporting any of them.
  std::map<Opcode, int> count;
  for (const auto& n : dfg.nodes) ++count[n.opcode];
  std::vector<std::pair<Opcode, int>> ops(count.begin(), count.end());
  const int k = static_cast<int>(ops.size());
  int best = 1;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    int ops_in = 0;
    std::set<int> fus;
    for (int i = 0; i < k; ++i) {
      if (!(mask & (1u << i))) continue;
      ops_in += ops[i].second;
      for (int f : rg.fus_supporting(ops[i].first)) fus.insert(f);
    }
    if (fus.empty()) continue;  // node_latencies already rejected this case
    const int f = static_cast<int>(fus.size());
    best = std::max(best, (ops_in + f - 1) / f);
  }
  return best;
}

}  // namespace

MiiReport compute_mii(const Dfg& dfg, const RoutingGraph& rg) {
  const auto lat = node_latencies(dfg, rg);
  MiiReport r;
  r.res_mii = res_mii(dfg, rg);
  // A back edge only bounds II when it closes a cycle.
  const auto d = longest_paths(dfg, lat, 1);
  bool recurrent = false;
  for (int i = 0; i < dfg.size(); ++i) recurrent |= d[i][i] != kNoPath;
  if (recurrent) {
    int ii = 1;
    while (has_positive_cycle(dfg, lat, ii)) ++ii;
    r.rec_mii = ii;
  }
  r.mii = std::max({1, r.res_mii, r.rec_mii});
  return r;
}

MiiReport compute_mii(const Dfg& dfg, const ArchSpec& spec) { return compute_mii(dfg, elaborate(spec)); }

std::vector<int> order_nodes(const Dfg& dfg, const std::vector<int>& lat) {
  const int n = dfg.size();
  Dfg annotated = compute_asap_alap(dfg);

  // Longest path over the acyclic (non-recurrence) part, in latency units.
  std::vector<std::vector<std::int64_t>> fwd(n, std::vector<std::int64_t>(n, kNoPath));
  for (int i = 0; i < n; ++i) fwd[i][i] = 0;
  const auto topo = dfg.topological_order();
  for (int u : topo)
    for (const auto& e : dfg.edges)
      if (e.src == u && e.kind != EdgeKind::Recurrence)
        for (int s = 0; s < n; ++s)
          if (fwd[s][u] != kNoPath) fwd[s][e.dst] = std::max(fwd[s][e.dst], fwd[s][u] + lat[u]);

  // Length of the longest recurrence cycle through each node.
  std::vector<std::int64_t> cycle(n, 0);
  for (const auto& e : dfg.edges) {
    if (e.kind != EdgeKind::Recurrence) continue;
    for (int v = 0; v < n; ++v)
      if (fwd[e.dst][v] != kNoPath && fwd[v][e.src] != kNoPath)
        cycle[v] = std::max(cycle[v], fwd[e.dst][v] + fwd[v][e.src] + lat[e.src]);
  }

  std::vector<int> indeg(n, 0);
  for (const auto& e : dfg.edges)
    if (e.kind != EdgeKind::Recurrence) ++indeg[e.dst];
  using Key = std::tuple<std::int64_t, int, std::string, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  auto push = [&](int v) { ready.push({-cycle[v], annotated.nodes[v].asap, dfg.nodes[v].id, v}); };
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) push(v);
  std::vector<int> order;
  while (!ready.empty()) {
    int u = std::get<3>(ready.top());
    ready.pop();
    order.push_back(u);
    for (const auto& e : dfg.edges)
      if (e.src == u && e.kind != EdgeKind::Recurrence && --indeg[e.dst] == 0) push(e.dst);
  }
  return order;
}

std::vector<int> order_nodes(const Dfg& dfg) { return order_nodes(dfg, std::vector<int>(dfg.nodes.size(), 1)); }

}  // namespace cgra
