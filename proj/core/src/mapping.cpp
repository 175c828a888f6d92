#include "cgra/mapping.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "cgra/error.hpp"
#include "json_util.hpp"

namespace cgra {

using detail::json;

int operand_port(const FuInfo& fu, OperandSlot slot) {
  switch (slot) {
    case OperandSlot::Left: return fu.left;
    case OperandSlot::Right: return fu.right;
    case OperandSlot::Pred: return fu.pred;
  }
  return -1;
}

int placed_latency(const Dfg& dfg, const RoutingGraph& rg, const Mapping& m, int node) {
  return rg.fus[m.placement[node].fu].latency_of(dfg.nodes[node].opcode);
}

int schedule_length(const Dfg& dfg, const RoutingGraph& rg, const Mapping& m) {
  int len = 0;
  for (int v = 0; v < dfg.size(); ++v)
    if (m.placement[v].fu >= 0) len = std::max(len, m.placement[v].time + placed_latency(dfg, rg, m, v));
  return len;
}

std::vector<std::string> check_mapping(const Dfg& dfg, const RoutingGraph& rg, const Mapping& m) {
  std::vector<std::string> bad;
  const int ii = m.ii;
  if (ii < 1) return {"II < 1"};
  auto mod = [ii](long t) { return static_cast<int>(((t % ii) + ii) % ii); };
  if (static_cast<int>(m.placement.size()) != dfg.size()) return {"placement size does not match DFG"};
  if (m.routes.size() != dfg.edges.size()) return {"route count does not match DFG edges"};

  // (resource, slot) -> distinct (value, time) keys.
  std::map<std::pair<int, int>, std::set<std::pair<int, long>>> use;
  auto note = [&](int r, long t, int value) { use[{r, mod(t)}].insert({value, t}); };

  for (int v = 0; v < dfg.size(); ++v) {
    const auto& n = dfg.nodes[v];
    const auto& p = m.placement[v];
    if (p.fu < 0 || p.fu >= static_cast<int>(rg.fus.size())) {
      bad.push_back("node " + n.id + " is not placed");
      continue;
    }
    const auto& fu = rg.fus[p.fu];
    if (!fu.supports(n.opcode)) bad.push_back("node " + n.id + " placed on " + fu.name + " which lacks its opcode");
    if (p.time < 0) bad.push_back("node " + n.id + " has negative time");
    note(fu.slot, p.time, v);
    if (n.opcode != Opcode::STORE) note(fu.result, p.time + fu.latency_of(n.opcode), v);
    if (is_memory(n.opcode)) {
      if (std::find(fu.mu_ports.begin(), fu.mu_ports.end(), p.mem_port) == fu.mu_ports.end()) {
        bad.push_back("node " + n.id + " uses a memory port its FU cannot reach");
      } else {
        const auto& mu = rg.mus[rg.mu_of_bank(std::max(0, n.bank))];
        if (n.bank >= 0 && std::find(mu.ports.begin(), mu.ports.end(), p.mem_port) == mu.ports.end())
          bad.push_back("node " + n.id + " accesses bank " + std::to_string(n.bank) + " through a foreign port");
        note(p.mem_port, p.time, v);
      }
    }
  }
  if (!bad.empty()) return bad;

  for (std::size_t ei = 0; ei < dfg.edges.size(); ++ei) {
    const auto& e = dfg.edges[ei];
    const auto& route = m.routes[ei];
    const std::string tag = "edge " + dfg.nodes[e.src].id + "->" + dfg.nodes[e.dst].id;
    if (dfg.nodes[e.src].opcode == Opcode::STORE) {
      bad.push_back(tag + ": STORE produces no value");
      continue;
    }
    if (route.empty()) {
      bad.push_back(tag + ": unrouted");
      continue;
    }
    const auto& src_fu = rg.fus[m.placement[e.src].fu];
    const auto& dst_fu = rg.fus[m.placement[e.dst].fu];
    const long start = m.placement[e.src].time + src_fu.latency_of(dfg.nodes[e.src].opcode);
    const long arrive = m.placement[e.dst].time + static_cast<long>(e.distance) * ii;
    if (route.front().resource != src_fu.result || route.front().time != start)
      bad.push_back(tag + ": route does not start at the producer result");
    if (route.back().resource != operand_port(dst_fu, e.slot) || route.back().time != arrive)
      bad.push_back(tag + ": route does not end at the consumer operand at its schedule time");
    int hops = 0;
    for (std::size_t i = 0; i < route.size(); ++i) {
      const auto& st = route[i];
      const auto& res = rg.resources[st.resource];
      if (i > 0) {
        const auto& prev = route[i - 1];
        const auto& pres = rg.resources[prev.resource];
        int dt = 0;
        if (pres.kind == ResourceKind::FuSlot) dt = rg.fus[pres.fu].latency_of(Opcode::ROUTE);
        if (res.kind == ResourceKind::Reg) dt = 1;
        bool arc = prev.resource == st.resource ? res.kind == ResourceKind::Reg
                                                : std::count(rg.fanout[prev.resource].begin(),
                                                             rg.fanout[prev.resource].end(), st.resource) > 0;
        if (!arc) bad.push_back(tag + ": " + pres.name + " does not drive " + res.name);
        if (st.time - prev.time != dt) bad.push_back(tag + ": bad timing into " + res.name);
        if (dt) hops = 0;
        if (res.kind == ResourceKind::FuSlot) {
          // Pass-through: the slot must not run a node in this cycle.
          for (int v = 0; v < dfg.size(); ++v)
            if (m.placement[v].fu == res.fu && mod(m.placement[v].time) == mod(st.time))
              bad.push_back(tag + ": routes through " + res.name + " while it executes " + dfg.nodes[v].id);
        }
      }
      if (res.kind == ResourceKind::Link && ++hops > m.hop_limit)
        bad.push_back(tag + ": exceeds hop limit at " + res.name);
      // The producer's own result is already noted; the consumer operand port is a real use.
      note(st.resource, st.time, e.src);
    }
  }

  for (const auto& [key, keys] : use) {
    const auto& res = rg.resources[key.first];
    if (static_cast<int>(keys.size()) > res.capacity)
      bad.push_back(res.name + "@" + std::to_string(key.second) + " holds " + std::to_string(keys.size()) +
                    " values (capacity " + std::to_string(res.capacity) + ")");
  }

  // Recurrence budget: the consumer of iteration k+d must not run before the producer of k finishes.
  for (const auto& e : dfg.edges) {
    long need = m.placement[e.src].time + placed_latency(dfg, rg, m, e.src);
    long have = m.placement[e.dst].time + static_cast<long>(e.distance) * ii;
    if (have < need)
      bad.push_back("edge " + dfg.nodes[e.src].id + "->" + dfg.nodes[e.dst].id + ": consumer scheduled too early");
  }
  return bad;
}

std::string mapping_to_json(const Dfg& dfg, const RoutingGraph& rg, const Mapping& m) {
  json j;
  j["arch"] = m.arch_name;
  j["dfg"] = m.dfg_name;
  j["ii"] = m.ii;
  j["hop_limit"] = m.hop_limit;
  json pl = json::array();
  for (int v = 0; v < dfg.size(); ++v) {
    const auto& p = m.placement[v];
    json pj{{"node", dfg.nodes[v].id}, {"fu", p.fu >= 0 ? rg.fus[p.fu].name : ""}, {"time", p.time}};
    if (p.mem_port >= 0) pj["mem_port"] = rg.resources[p.mem_port].name;
    pl.push_back(pj);
  }
  j["placement"] = pl;
  json routes = json::array();
  for (std::size_t ei = 0; ei < dfg.edges.size(); ++ei) {
    const auto& e = dfg.edges[ei];
    json steps = json::array();
    for (const auto& s : m.routes[ei]) steps.push_back({rg.resources[s.resource].name, s.time});
    routes.push_back({{"src", dfg.nodes[e.src].id},
                      {"dst", dfg.nodes[e.dst].id},
                      {"slot", slot_name(e.slot)},
                      {"path", steps}});
  }
  j["routes"] = routes;
  j["cost"] = m.cost;
  json over = json::array();
  for (const auto& o : m.oversubscribed) over.push_back({rg.resources[o.resource].name, o.slot});
  j["oversubscribed"] = over;
  return j.dump(1) + "\n";
}

Mapping mapping_from_json(std::string_view text, const Dfg& dfg, const RoutingGraph& rg) {
  json j = detail::parse_json(text, "mapping");
  Mapping m;
  m.arch_name = detail::get_or<std::string>(j, "arch", "", "mapping");
  m.dfg_name = detail::get_or<std::string>(j, "dfg", "", "mapping");
  m.ii = detail::get_field<int>(j, "ii", "mapping");
  m.hop_limit = detail::get_or<int>(j, "hop_limit", rg.hop_limit, "mapping");
  m.cost = detail::get_or<double>(j, "cost", 0.0, "mapping");
  auto resource = [&](const std::string& name) {
    int r = rg.find(name);
    if (r < 0) throw Error(ErrorCode::SchemaError, "mapping names unknown resource '" + name + "'");
    return r;
  };
  m.placement.assign(dfg.nodes.size(), {});
  for (const auto& pj : j.at("placement")) {
    int v = dfg.index_of(detail::get_field<std::string>(pj, "node", "placement"));
    if (v < 0) throw Error(ErrorCode::SchemaError, "mapping places an unknown node");
    const auto fu_name = detail::get_field<std::string>(pj, "fu", "placement");
    for (std::size_t f = 0; f < rg.fus.size(); ++f)
      if (rg.fus[f].name == fu_name) m.placement[v].fu = static_cast<int>(f);
    m.placement[v].time = detail::get_field<int>(pj, "time", "placement");
    if (pj.contains("mem_port")) m.placement[v].mem_port = resource(pj["mem_port"].get<std::string>());
  }
  m.routes.assign(dfg.edges.size(), {});
  const auto& rj = j.at("routes");
  if (rj.size() != dfg.edges.size()) throw Error(ErrorCode::SchemaError, "mapping route count mismatch");
  for (std::size_t ei = 0; ei < rj.size(); ++ei) {
    int hops = 0;
    long prev = 0;
    for (const auto& s : rj[ei].at("path")) {
      RouteStep st{resource(s.at(0).get<std::string>()), s.at(1).get<int>(), 0};
      if (st.time != prev) hops = 0;
      if (rg.resources[st.resource].kind == ResourceKind::Link) ++hops;
      st.hops = hops;
      prev = st.time;
      m.routes[ei].push_back(st);
    }
  }
  return m;
}

}  // namespace cgra
