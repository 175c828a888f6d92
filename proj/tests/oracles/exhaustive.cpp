#include "exhaustive.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <tuple>

namespace oracle {

using namespace cgra;

namespace {

struct Key {
  int value;
  long time;
  bool operator==(const Key&) const = default;
};

class Search {
 public:
  Search(const Dfg& dfg, const RoutingGraph& rg, int ii, int hop, const ExhaustiveOptions& opts)
      : dfg_(dfg), rg_(rg), ii_(ii), hop_(hop), opts_(opts), n_(static_cast<int>(rg.resources.size())) {
    occ_.resize(static_cast<std::size_t>(n_) * ii_);
    order_ = dfg.topological_order();
    m_.ii = ii;
    m_.hop_limit = hop;
    m_.placement.assign(dfg.nodes.size(), {});
    m_.routes.assign(dfg.edges.size(), {});
    // Arc list derived directly from resource kinds.
    succ_.resize(n_);
    for (int r = 0; r < n_; ++r) {
      const auto& res = rg.resources[r];
      for (int s : rg.fanout[r]) {
        int dt = 0;
        if (res.kind == ResourceKind::FuSlot) dt = 1;
        if (rg.resources[s].kind == ResourceKind::Reg) dt = 1;
        succ_[r].push_back({s, dt});
      }
      if (res.kind == ResourceKind::Reg) succ_[r].push_back({r, 1});
    }
    // Lower bound on cycles from each resource to each other (0-1 BFS ignoring hops).
    lb_.assign(n_, std::vector<int>(n_, std::numeric_limits<int>::max() / 2));
    for (int a = 0; a < n_; ++a) {
      auto& d = lb_[a];
      std::deque<int> dq{a};
      d[a] = 0;
      while (!dq.empty()) {
        int r = dq.front();
        dq.pop_front();
        for (auto [s, dt] : succ_[r])
          if (d[r] + dt < d[s]) {
            d[s] = d[r] + dt;
            dt ? dq.push_back(s) : dq.push_front(s);
          }
      }
    }
  }

  ExhaustiveResult run() {
    ExhaustiveResult res;
    res.found = solve(0);
    res.complete = res.found || steps_ <= opts_.budget;
    res.steps = steps_;
    if (res.found) res.mapping = m_;
    return res;
  }

 private:
  int slot(long t) const { return static_cast<int>(((t % ii_) + ii_) % ii_); }
  std::vector<std::pair<Key, int>>& at(int r, long t) { return occ_[static_cast<std::size_t>(r) * ii_ + slot(t)]; }

  bool free_for(int r, long t, int value) {
    int others = 0;
    for (const auto& [k, _] : at(r, t))
      if (!(k == Key{value, t})) ++others;
    return others < rg_.resources[r].capacity;
  }
  void claim(int r, long t, int value) {
    for (auto& [k, c] : at(r, t))
      if (k == Key{value, t}) {
        ++c;
        return;
      }
    at(r, t).push_back({{value, t}, 1});
  }
  void release(int r, long t, int value) {
    auto& v = at(r, t);
    for (auto it = v.begin(); it != v.end(); ++it)
      if (it->first == Key{value, t}) {
        if (--it->second == 0) v.erase(it);
        return;
      }
  }

  int latency(int node, int fu) const { return rg_.fus[fu].latency_of(dfg_.nodes[node].opcode); }

  bool solve(int k) {
    if (++steps_ > opts_.budget) return false;
    if (k == dfg_.size()) {
      std::vector<int> all(dfg_.edges.size());
      for (std::size_t e = 0; e < all.size(); ++e) all[e] = static_cast<int>(e);
      return route_all(all, 0);
    }
    const int v = order_[k];
    const auto& node = dfg_.nodes[v];
    long lo = 0;
    for (const auto& e : dfg_.edges) {
      if (e.dst == v && e.src != v && m_.placement[e.src].fu >= 0) {
        lo = std::max(lo, m_.placement[e.src].time + latency(e.src, m_.placement[e.src].fu) - static_cast<long>(e.distance) * ii_);
      }
    }
    const long last = lo + ii_ - 1 + opts_.slack;
    for (long t = lo; t <= last; ++t) {
      for (int f = 0; f < static_cast<int>(rg_.fus.size()); ++f) {
        const auto& fu = rg_.fus[f];
        if (!fu.supports(node.opcode)) continue;
        // Upper bounds from already-placed consumers (recurrence back edges).
        bool ok = true;
        for (const auto& e : dfg_.edges) {
          if (e.src == v && m_.placement[e.dst].fu >= 0 && e.dst != v)
            ok = ok && t + latency(v, f) <= m_.placement[e.dst].time + static_cast<long>(e.distance) * ii_;
          if (e.src == v && e.dst == v) ok = ok && latency(v, f) <= static_cast<long>(e.distance) * ii_;
        }
        if (!ok || !free_for(fu.slot, t, v)) continue;
        if (node.opcode != Opcode::STORE && !free_for(fu.result, t + latency(v, f), v)) continue;
        std::vector<int> ports{-1};
        if (is_memory(node.opcode)) {
          ports.clear();
          for (int p : fu.mu_ports) {
            if (node.bank >= 0) {
              const auto& mu = rg_.mus[rg_.mu_of_bank(node.bank)];
              if (std::find(mu.ports.begin(), mu.ports.end(), p) == mu.ports.end()) continue;
            }
            if (free_for(p, t, v)) ports.push_back(p);
          }
        }
        for (int p : ports) {
          m_.placement[v] = {f, static_cast<int>(t), p};
          claim(fu.slot, t, v);
          if (node.opcode != Opcode::STORE) claim(fu.result, t + latency(v, f), v);
          if (p >= 0) claim(p, t, v);
          bool viable = true;
          for (const auto& ed : dfg_.edges)
            if ((ed.src == v || ed.dst == v) && m_.placement[ed.src].fu >= 0 && m_.placement[ed.dst].fu >= 0)
              viable = viable && routable_alone(ed);
          if (viable && solve(k + 1)) return true;
          if (p >= 0) release(p, t, v);
          if (node.opcode != Opcode::STORE) release(fu.result, t + latency(v, f), v);
          release(fu.slot, t, v);
          m_.placement[v] = {};
          if (steps_ > opts_.budget) return false;
        }
      }
    }
    return false;
  }

  // Relaxation used while placing: the edge has some route on its own, given
  // only the FU slots taken by nodes. Sound for pruning since occupancy only grows.
  bool routable_alone(const DfgEdge& e) {
    if (dfg_.nodes[e.src].opcode == Opcode::STORE) return false;
    const auto& sp = m_.placement[e.src];
    const auto& dp = m_.placement[e.dst];
    const long start = sp.time + latency(e.src, sp.fu);
    const long arrive = dp.time + static_cast<long>(e.distance) * ii_;
    const int target = operand_port(rg_.fus[dp.fu], e.slot);
    if (arrive < start || start + lb_[rg_.fus[sp.fu].result][target] > arrive) return false;
    const long span = arrive - start + 1;
    std::vector<char> seen(static_cast<std::size_t>(n_) * span * (hop_ + 1), 0);
    auto id = [&](int r, long t, int h) { return (static_cast<std::size_t>(r) * span + (t - start)) * (hop_ + 1) + h; };
    std::vector<std::tuple<int, long, int>> stack{{rg_.fus[sp.fu].result, start, 0}};
    seen[id(rg_.fus[sp.fu].result, start, 0)] = 1;
    while (!stack.empty()) {
      auto [r, t, h] = stack.back();
      stack.pop_back();
      if (r == target && t == arrive) return true;
      for (auto [s, dt] : succ_[r]) {
        const long nt = t + dt;
        if (nt > arrive || nt + lb_[s][target] > arrive) continue;
        const auto& res = rg_.resources[s];
        if (res.kind == ResourceKind::MuPort) continue;
        if (res.kind == ResourceKind::InPort && res.fu >= 0 && s != target && s != rg_.fus[res.fu].left) continue;
        if (res.kind == ResourceKind::FuSlot && !at(s, nt).empty()) continue;
        int nh = dt ? 0 : h;
        if (res.kind == ResourceKind::Link && ++nh > hop_) continue;
        if (seen[id(s, nt, nh)]) continue;
        seen[id(s, nt, nh)] = 1;
        stack.push_back({s, nt, nh});
      }
    }
    return false;
  }

  bool route_all(const std::vector<int>& edges, std::size_t i) {
    if (i == edges.size()) return true;
    const auto& e = dfg_.edges[edges[i]];
    if (dfg_.nodes[e.src].opcode == Opcode::STORE) return false;
    const auto& sp = m_.placement[e.src];
    const auto& dp = m_.placement[e.dst];
    const long start = sp.time + latency(e.src, sp.fu);
    const long arrive = dp.time + static_cast<long>(e.distance) * ii_;
    if (arrive < start) return false;
    const int target = operand_port(rg_.fus[dp.fu], e.slot);
    path_.clear();
    path_.push_back({rg_.fus[sp.fu].result, static_cast<int>(start), 0});
    return dfs(edges, i, e.src, target, arrive);
  }

  bool dfs(const std::vector<int>& edges, std::size_t i, int value, int target, long arrive) {
    if (++steps_ > opts_.budget) return false;
    const RouteStep cur = path_.back();
    if (cur.resource == target && cur.time == arrive) {
      const int e = edges[i];
      m_.routes[e] = path_;
      for (const auto& s : path_) claim(s.resource, s.time, value);
      auto saved = path_;
      if (route_all(edges, i + 1)) return true;
      path_ = saved;
      for (const auto& s : path_) release(s.resource, s.time, value);
      m_.routes[e].clear();
      return false;
    }
    for (auto [s, dt] : succ_[cur.resource]) {
      const long nt = cur.time + dt;
      if (nt > arrive || nt + lb_[s][target] > arrive) continue;
      const auto& res = rg_.resources[s];
      if (res.kind == ResourceKind::MuPort) continue;
      if (res.kind == ResourceKind::InPort && res.fu >= 0 && s != target && s != rg_.fus[res.fu].left) continue;
      int nh = dt ? 0 : cur.hops;
      if (res.kind == ResourceKind::Link && ++nh > hop_) continue;
      bool clash = false;
      for (const auto& p : path_)
        if (p.resource == s && slot(p.time) == slot(nt)) clash = true;  // revisit or modulo self-overlap
      if (clash || !free_for(s, nt, value)) continue;
      path_.push_back({s, static_cast<int>(nt), nh});
      if (dfs(edges, i, value, target, arrive)) return true;
      path_.pop_back();
      if (steps_ > opts_.budget) return false;
    }
    return false;
  }

  const Dfg& dfg_;
  const RoutingGraph& rg_;
  int ii_, hop_;
  ExhaustiveOptions opts_;
  int n_;
  std::vector<std::vector<std::pair<Key, int>>> occ_;
  std::vector<std::vector<std::pair<int, int>>> succ_;
  std::vector<std::vector<int>> lb_;
  std::vector<int> order_;
  std::vector<RouteStep> path_;
  Mapping m_;
  long steps_ = 0;
};

}  // namespace

ExhaustiveResult exhaustive_map(const Dfg& dfg, const RoutingGraph& rg, int ii, int hop_limit,
                                const ExhaustiveOptions& opts) {
  Search s(dfg, rg, ii, hop_limit, opts);
  auto r = s.run();
  r.mapping.arch_name = rg.arch_name;
  r.mapping.dfg_name = dfg.name;
  return r;
}

MinIi exhaustive_min_ii(const Dfg& dfg, const RoutingGraph& rg, int max_ii, int hop_limit,
                        const ExhaustiveOptions& opts) {
  MinIi out;
  for (int ii = 1; ii <= max_ii; ++ii) {
    auto r = exhaustive_map(dfg, rg, ii, hop_limit, opts);
    if (r.found) {
      out.ii = ii;
      return out;
    }
    if (!r.complete) out.complete = false;
  }
  return out;
}

}  // namespace oracle
