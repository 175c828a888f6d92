#include "cgra/mapper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <set>

#include "json_util.hpp"

namespace cgra {

using detail::json;

std::string_view strategy_name(Strategy s) { return s == Strategy::Sa ? "sa" : "adaptive"; }

Strategy parse_strategy(std::string_view name) {
  if (name == "adaptive") return Strategy::Adaptive;
  if (name == "sa") return Strategy::Sa;
  throw Error(ErrorCode::SchemaError, "unknown strategy '" + std::string(name) + "'");
}

MapperConfig parse_mapper_config(std::string_view text) {
  json j = detail::parse_json(text, "mapper config");
  detail::check_fields(j,
                       {"max_ii", "strategy", "seed", "escalation", "max_rounds", "patience", "restarts", "sa", "costs", "slack",
                        "hop_limit"},
                       "mapper config");
  MapperConfig c;
  const char* ctx = "mapper config";
  c.max_ii = detail::get_or<int>(j, "max_ii", c.max_ii, ctx);
  c.strategy = parse_strategy(detail::get_or<std::string>(j, "strategy", "adaptive", ctx));
  c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed, ctx);
  c.escalation = detail::get_or<double>(j, "escalation", c.escalation, ctx);
  c.max_rounds = detail::get_or<int>(j, "max_rounds", c.max_rounds, ctx);
  c.patience = detail::get_or<int>(j, "patience", c.patience, ctx);
  c.restarts = detail::get_or<int>(j, "restarts", c.restarts, ctx);
  c.slack = detail::get_or<int>(j, "slack", c.slack, ctx);
  if (j.contains("hop_limit")) c.hop_limit = detail::get_field<int>(j, "hop_limit", ctx);
  if (j.contains("sa")) {
    const auto& s = j["sa"];
    detail::check_fields(s, {"t0", "cooling", "moves", "tmin"}, "sa");
    c.sa_t0 = detail::get_or<double>(s, "t0", c.sa_t0, "sa");
    c.sa_cooling = detail::get_or<double>(s, "cooling", c.sa_cooling, "sa");
    c.sa_moves = detail::get_or<int>(s, "moves", c.sa_moves, "sa");
    c.sa_tmin = detail::get_or<double>(s, "tmin", c.sa_tmin, "sa");
  }
  if (j.contains("costs")) {
    const auto& s = j["costs"];
    detail::check_fields(s, {"fu", "link", "reg", "port", "overuse"}, "costs");
    c.costs.fu = detail::get_or<double>(s, "fu", c.costs.fu, "costs");
    c.costs.link = detail::get_or<double>(s, "link", c.costs.link, "costs");
    c.costs.reg = detail::get_or<double>(s, "reg", c.costs.reg, "costs");
    c.costs.port = detail::get_or<double>(s, "port", c.costs.port, "costs");
    c.costs.overuse = detail::get_or<double>(s, "overuse", c.costs.overuse, "costs");
  }
  if (c.max_ii < 0) throw Error(ErrorCode::SchemaError, "max_ii must be >= 0");
  if (!(c.sa_cooling > 0 && c.sa_cooling < 1)) throw Error(ErrorCode::SchemaError, "sa.cooling must be in (0,1)");
  if (!(c.escalation > 1)) throw Error(ErrorCode::SchemaError, "escalation must be > 1");
  if (c.sa_t0 <= 0 || c.sa_tmin <= 0 || c.sa_moves < 1) throw Error(ErrorCode::SchemaError, "bad sa schedule");
  if (c.max_rounds < 0 || c.patience < 1 || c.restarts < 1 || c.slack < 0) throw Error(ErrorCode::SchemaError, "bad adaptive limits");
  if (c.hop_limit && *c.hop_limit < 1) throw Error(ErrorCode::SchemaError, "hop_limit must be >= 1");
  for (double v : {c.costs.fu, c.costs.link, c.costs.reg, c.costs.port, c.costs.overuse})
    if (v < 0) throw Error(ErrorCode::SchemaError, "route costs must be >= 0");
  return c;
}

std::string serialize_mapper_config(const MapperConfig& c) {
  json j;
  j["max_ii"] = c.max_ii;
  j["strategy"] = strategy_name(c.strategy);
  j["seed"] = c.seed;
  j["escalation"] = c.escalation;
  j["max_rounds"] = c.max_rounds;
  j["patience"] = c.patience;
  j["restarts"] = c.restarts;
  j["sa"] = {{"t0", c.sa_t0}, {"cooling", c.sa_cooling}, {"moves", c.sa_moves}, {"tmin", c.sa_tmin}};
  j["costs"] = {{"fu", c.costs.fu},
                {"link", c.costs.link},
                {"reg", c.costs.reg},
                {"port", c.costs.port},
                {"overuse", c.costs.overuse}};
  j["slack"] = c.slack;
  if (c.hop_limit) j["hop_limit"] = *c.hop_limit;
  return j.dump(1) + "\n";
}

namespace {

constexpr double kUnroutedPenalty = 1000.0;

class Engine {
 public:
  // Attempt 0 is the plain greedy pass; later attempts jitter candidate costs.
  Engine(const Dfg& dfg, Mrrg& mrrg, Mapping& m, const MapperConfig& cfg, int attempt = 0)
      : dfg_(dfg),
        rg_(mrrg.graph()),
        mrrg_(mrrg),
        m_(m),
        cfg_(cfg),
        router_(mrrg),
        rng_(cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt)),
        jitter_(attempt > 0 ? 3.0 : 0.0) {
    const int n = dfg.size();
    m_.ii = mrrg.ii();
    m_.hop_limit = mrrg.hop_limit();
    if (static_cast<int>(m_.placement.size()) != n) m_.placement.assign(n, {});
    if (m_.routes.size() != dfg.edges.size()) m_.routes.assign(dfg.edges.size(), {});
    lat_ = node_latencies(dfg, rg_);
    lp_ = longest_paths(dfg, lat_, mrrg.ii());
    in_.resize(n);
    out_.resize(n);
    for (int e = 0; e < static_cast<int>(dfg.edges.size()); ++e) {
      out_[dfg.edges[e].src].push_back(e);
      in_[dfg.edges[e].dst].push_back(e);
    }
    // Earliest start ignoring resources, in latency units.
    asap_.assign(n, 0);
    for (int v : dfg.topological_order())
      for (int e : out_[v])
        if (dfg.edges[e].kind != EdgeKind::Recurrence)
          asap_[dfg.edges[e].dst] = std::max(asap_[dfg.edges[e].dst], asap_[v] + lat_[v]);
    compute_min_cycles();
  }

  // --- occupancy bookkeeping ------------------------------------------------

  bool placed(int v) const { return m_.placement[v].fu >= 0; }

  void claim_node(int v) {
    const auto& p = m_.placement[v];
    const auto& fu = rg_.fus[p.fu];
    mrrg_.claim(fu.slot, p.time, v);
    if (dfg_.nodes[v].opcode != Opcode::STORE) mrrg_.claim(fu.result, p.time + fu.latency_of(dfg_.nodes[v].opcode), v);
    if (p.mem_port >= 0) mrrg_.claim(p.mem_port, p.time, v);
  }

  void release_node(int v) {
    const auto& p = m_.placement[v];
    const auto& fu = rg_.fus[p.fu];
    mrrg_.release(fu.slot, p.time, v);
    if (dfg_.nodes[v].opcode != Opcode::STORE)
      mrrg_.release(fu.result, p.time + fu.latency_of(dfg_.nodes[v].opcode), v);
    if (p.mem_port >= 0) mrrg_.release(p.mem_port, p.time, v);
  }

  void claim_route(int e) {
    for (const auto& s : m_.routes[e]) mrrg_.claim(s.resource, s.time, dfg_.edges[e].src);
  }

  void rip(int e) {
    for (const auto& s : m_.routes[e]) mrrg_.release(s.resource, s.time, dfg_.edges[e].src);
    m_.routes[e].clear();
  }

  void load() {
    for (int v = 0; v < dfg_.size(); ++v)
      if (placed(v)) claim_node(v);
    for (int e = 0; e < static_cast<int>(dfg_.edges.size()); ++e) claim_route(e);
  }

  void unplace(int v) {
    for (int e : in_[v]) rip(e);
    for (int e : out_[v]) rip(e);
    if (placed(v)) release_node(v);
    m_.placement[v] = {};
  }

  void place(int v, const Placement& p) {
    m_.placement[v] = p;
    claim_node(v);
  }

  // --- routing ----------------------------------------------------------------

  // Routes edge e between two placed nodes. Returns the cost, or nullopt.
  std::optional<double> route(int e) {
    const auto& edge = dfg_.edges[e];
    const int u = edge.src;
    if (dfg_.nodes[u].opcode == Opcode::STORE) return std::nullopt;
    const auto& src_fu = rg_.fus[m_.placement[u].fu];
    const auto& dst_fu = rg_.fus[m_.placement[edge.dst].fu];
    const long start = m_.placement[u].time + src_fu.latency_of(dfg_.nodes[u].opcode);
    const long arrival = m_.placement[edge.dst].time + static_cast<long>(edge.distance) * m_.ii;
    if (arrival < start) return std::nullopt;
    const int target = operand_port(dst_fu, edge.slot);

    // Tree of value u: its result plus every routed branch.
    std::vector<RouteStep> sources{{src_fu.result, static_cast<int>(start), 0}};
    std::vector<std::pair<int, int>> origin{{-1, 0}};
    for (int f : out_[u]) {
      if (f == e) continue;
      const auto& path = m_.routes[f];
      for (int i = 1; i < static_cast<int>(path.size()); ++i) {
        bool dup = false;
        for (const auto& s : sources) dup = dup || (s.resource == path[i].resource && s.time == path[i].time);
        if (dup) continue;
        sources.push_back(path[i]);
        origin.push_back({f, i});
      }
    }
    auto r = router_.route(u, sources, target, arrival, cfg_.costs);
    if (!r) return std::nullopt;
    std::vector<RouteStep> full;
    const auto [f, i] = origin[r->source];
    if (f < 0)
      full.push_back(sources[0]);
    else
      full.assign(m_.routes[f].begin(), m_.routes[f].begin() + i + 1);
    full.insert(full.end(), r->steps.begin(), r->steps.end());
    m_.routes[e] = std::move(full);
    claim_route(e);
    return r->cost;
  }

  // Routes every unrouted edge between v and placed neighbours.
  double route_incident(int v, int& failures) {
    double cost = 0;
    failures = 0;
    auto go = [&](int e) {
      const auto& edge = dfg_.edges[e];
      if (!m_.routes[e].empty() || !placed(edge.src) || !placed(edge.dst)) return;
      if (auto c = route(e))
        cost += *c;
      else
        ++failures;
    };
    for (int e : in_[v]) go(e);
    for (int e : out_[v]) go(e);
    return cost;
  }

  // --- placement ----------------------------------------------------------------

  struct Window {
    long lo, hi;
  };

  Window window(int v) const {
    long lo = std::numeric_limits<long>::min(), hi = std::numeric_limits<long>::max();
    bool any = false;
    for (int w = 0; w < dfg_.size(); ++w) {
      if (w == v || !placed(w)) continue;
      const long tw = m_.placement[w].time;
      if (lp_[w][v] != kNoPath) lo = std::max(lo, tw + static_cast<long>(lp_[w][v])), any = true;
      if (lp_[v][w] != kNoPath) hi = std::min(hi, tw - static_cast<long>(lp_[v][w]));
    }
    lo = any ? std::max(lo, 0L) : asap_[v];
    return {lo, hi};
  }

  // Free memory port for node v on fu at time t, -1 if none, -2 when not needed.
  int mem_port_for(int v, const FuInfo& fu, long t) const {
    const auto& node = dfg_.nodes[v];
    if (!is_memory(node.opcode)) return -2;
    for (int p : fu.mu_ports) {
      if (node.bank >= 0) {
        const auto& mu = rg_.mus[rg_.mu_of_bank(node.bank)];
        if (std::find(mu.ports.begin(), mu.ports.end(), p) == mu.ports.end()) continue;
      }
      if (mrrg_.others(p, t, v) == 0) return p;
    }
    return -1;
  }

  // Necessary timing between v on fu at t and its placed neighbours.
  bool timing_possible(int v, int f, long t) const {
    for (int e : in_[v]) {
      const auto& edge = dfg_.edges[e];
      if (edge.src == v || !placed(edge.src)) continue;
      const auto& p = m_.placement[edge.src];
      long gap = t + static_cast<long>(edge.distance) * m_.ii - (p.time + rg_.fus[p.fu].latency_of(dfg_.nodes[edge.src].opcode));
      if (gap < min_cycles_[p.fu][f]) return false;
    }
    for (int e : out_[v]) {
      const auto& edge = dfg_.edges[e];
      const auto& fu = rg_.fus[f];
      long start = t + fu.latency_of(dfg_.nodes[v].opcode);
      if (edge.dst == v) {
        if (t + static_cast<long>(edge.distance) * m_.ii - start < min_cycles_[f][f]) return false;
        continue;
      }
      if (!placed(edge.dst)) continue;
      const auto& p = m_.placement[edge.dst];
      long gap = p.time + static_cast<long>(edge.distance) * m_.ii - start;
      if (gap < min_cycles_[f][p.fu]) return false;
    }
    return true;
  }

  struct Candidate {
    int fu;
    long time;
    int mem_port;
  };

  std::vector<Candidate> candidates(int v, bool wide) const {
    std::vector<Candidate> out;
    const auto [lo, hi] = window(v);
    if (lo > hi) return out;
    long span = static_cast<long>(m_.ii) - 1 + cfg_.slack;
    if (wide) span += 2L * m_.ii + 4;
    const long last = std::min(hi, lo + span);
    for (long t = lo; t <= last; ++t)
      for (int f = 0; f < static_cast<int>(rg_.fus.size()); ++f) {
        const auto& fu = rg_.fus[f];
        if (!fu.supports(dfg_.nodes[v].opcode)) continue;
        if (mrrg_.others(fu.slot, t, v) > 0) continue;
        int mp = mem_port_for(v, fu, t);
        if (mp == -1) continue;
        if (!timing_possible(v, f, t)) continue;
        out.push_back({f, t, mp < 0 ? -1 : mp});
      }
    return out;
  }

  // Places v at the cheapest candidate and routes its edges. Returns false if
  // no candidate slot exists at all.
  bool place_best(int v, const std::set<std::pair<int, long>>& avoid = {}) {
    auto cands = candidates(v, false);
    if (cands.empty()) cands = candidates(v, true);
    if (!avoid.empty()) {
      std::vector<Candidate> kept;
      for (const auto& c : cands)
        if (!avoid.count({c.fu, c.time})) kept.push_back(c);
      if (!kept.empty()) cands = std::move(kept);
    }
    if (cands.empty()) return false;
    double best = std::numeric_limits<double>::infinity();
    const Candidate* pick = nullptr;
    std::uniform_real_distribution<double> noise(0.0, jitter_);
    for (const auto& c : cands) {
      double cost = trial(v, c) + scarcity(v, c.fu);
      if (jitter_ > 0) cost += noise(rng_);
      if (cost < best) best = cost, pick = &c;
    }
    commit(v, *pick);
    return true;
  }

  // Penalty for taking a slot on fu that unplaced nodes of some opcode still
  // need: grows as that opcode's free slots approach its remaining demand.
  double scarcity(int v, int f) const {
    std::map<Opcode, int> need;
    for (int w = 0; w < dfg_.size(); ++w)
      if (w != v && !placed(w)) ++need[dfg_.nodes[w].opcode];
    double penalty = 0;
    for (const auto& [op, n] : need) {
      if (!rg_.fus[f].supports(op)) continue;
      int free = 0;
      for (int g : rg_.fus_supporting(op))
        for (int s = 0; s < m_.ii; ++s)
          if (mrrg_.users(rg_.fus[g].slot, s) == 0) ++free;
      const int left = free - 1 - n;
      penalty += left < 0 ? kUnroutedPenalty : 2.0 * n / (left + 1);
    }
    return penalty;
  }

  double trial(int v, const Candidate& c) {
    place(v, {c.fu, static_cast<int>(c.time), c.mem_port});
    int failures = 0;
    double cost = route_incident(v, failures) + kUnroutedPenalty * failures;
    unplace(v);
    return cost;
  }

  void commit(int v, const Candidate& c) {
    place(v, {c.fu, static_cast<int>(c.time), c.mem_port});
    int failures = 0;
    route_incident(v, failures);
  }

  bool initial_placement(const std::vector<int>& order) {
    for (int v : order)
      if (!place_best(v)) return false;
    return true;
  }

  // --- state metrics --------------------------------------------------------------

  int unrouted() const {
    int n = 0;
    for (std::size_t e = 0; e < dfg_.edges.size(); ++e)
      if (m_.routes[e].empty()) ++n;
    return n;
  }

  bool legal() const { return mrrg_.total_overuse() == 0 && unrouted() == 0; }

  double route_length() const {
    double n = 0;
    for (const auto& r : m_.routes) n += static_cast<double>(r.size());
    return n;
  }

  double route_cost() const {
    double total = 0;
    for (const auto& r : m_.routes)
      for (std::size_t i = 1; i < r.size(); ++i) {
        switch (rg_.resources[r[i].resource].kind) {
          case ResourceKind::FuSlot: total += cfg_.costs.fu; break;
          case ResourceKind::Link: total += cfg_.costs.link; break;
          case ResourceKind::Reg: total += cfg_.costs.reg; break;
          default: total += cfg_.costs.port;
        }
      }
    return total;
  }

  void finish() {
    m_.oversubscribed = mrrg_.oversubscribed();
    m_.cost = route_cost();
  }

  // --- resolution ---------------------------------------------------------------

  // Values whose routes touch an oversubscribed rnode, plus values with unrouted edges.
  std::vector<int> victims() const {
    std::set<int> out;
    std::set<std::pair<int, int>> hot;
    for (const auto& o : mrrg_.oversubscribed()) hot.insert({o.resource, o.slot});
    for (std::size_t e = 0; e < dfg_.edges.size(); ++e) {
      const int u = dfg_.edges[e].src;
      if (m_.routes[e].empty()) {
        out.insert(u);
        continue;
      }
      for (const auto& s : m_.routes[e])
        if (hot.count({s.resource, mrrg_.slot_of(s.time)})) {
          out.insert(u);
          break;
        }
    }
    return {out.begin(), out.end()};
  }

  bool adaptive(int& rounds) {
    int best = std::numeric_limits<int>::max();
    int stale = 0;
    for (rounds = 0; rounds < cfg_.max_rounds; ++rounds) {
      if (legal()) return true;
      mrrg_.escalate(cfg_.escalation);
      const auto vals = victims();
      for (int u : vals)
        for (int e : out_[u]) rip(e);
      std::vector<int> replace;
      for (int u : vals)
        for (int e : out_[u])
          if (!route(e)) replace.push_back(dfg_.edges[e].dst == u ? u : dfg_.edges[e].dst);
      std::sort(replace.begin(), replace.end());
      replace.erase(std::unique(replace.begin(), replace.end()), replace.end());
      for (int v : replace) replace_node(v);

      const int score = mrrg_.total_overuse() + 4 * unrouted();
      if (score < best) {
        best = score;
        stale = 0;
      } else if (++stale >= cfg_.patience) {
        stale = 0;
        std::vector<int> pool;
        for (int u : victims()) {
          pool.push_back(u);
          for (int e : out_[u]) pool.push_back(dfg_.edges[e].dst);
        }
        if (!pool.empty()) {
          std::sort(pool.begin(), pool.end());
          pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
          replace_node(pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng_)], true);
        }
      }
    }
    return legal();
  }

  void replace_node(int v, bool move = false) {
    std::set<std::pair<int, long>> avoid;
    const Placement old = m_.placement[v];
    if (move && old.fu >= 0) avoid.insert({old.fu, old.time});
    unplace(v);
    if (!place_best(v, avoid)) place(v, old), route_all_of(v);
  }

  void route_all_of(int v) {
    int failures = 0;
    route_incident(v, failures);
  }

  double sa_cost() const { return 10.0 * mrrg_.total_overuse() + route_length() + kUnroutedPenalty * unrouted(); }

  bool anneal(int& rounds) {
    rounds = 0;
    double cost = sa_cost();
    const int n = dfg_.size();
    if (n == 0) return legal();
    std::uniform_int_distribution<int> pick_node(0, n - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (double temp = cfg_.sa_t0; temp > cfg_.sa_tmin; temp *= cfg_.sa_cooling, ++rounds) {
      for (int i = 0; i < cfg_.sa_moves; ++i) {
        if (legal()) return true;
        const int v = pick_node(rng_);
        auto cands = candidates(v, false);
        if (cands.empty()) continue;
        const auto c = cands[std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng_)];
        // Snapshot v's placement and incident routes.
        const Placement old = m_.placement[v];
        std::vector<std::pair<int, std::vector<RouteStep>>> saved;
        for (int e : in_[v]) saved.push_back({e, m_.routes[e]});
        for (int e : out_[v]) saved.push_back({e, m_.routes[e]});
        unplace(v);
        commit(v, c);
        const double next = sa_cost();
        const double delta = next - cost;
        if (delta <= 0 || coin(rng_) < std::exp(-delta / temp)) {
          cost = next;
        } else {
          unplace(v);
          place(v, old);
          for (auto& [e, r] : saved) {
            if (!m_.routes[e].empty()) continue;  // self-loops appear twice
            m_.routes[e] = r;
            claim_route(e);
          }
        }
      }
    }
    return legal();
  }

 private:
  // Minimum cycles from fu a's result to any operand of fu b, ignoring congestion.
  void compute_min_cycles() {
    const int nf = static_cast<int>(rg_.fus.size());
    const int nr = static_cast<int>(rg_.resources.size());
    const int H = mrrg_.hop_limit() + 1;
    min_cycles_.assign(nf, std::vector<long>(nf, std::numeric_limits<long>::max() / 4));
    for (int a = 0; a < nf; ++a) {
      std::vector<long> best(static_cast<std::size_t>(nr) * H, std::numeric_limits<long>::max());
      std::deque<std::tuple<int, int, long>> dq;
      best[static_cast<std::size_t>(rg_.fus[a].result) * H] = 0;
      dq.emplace_back(rg_.fus[a].result, 0, 0);
      while (!dq.empty()) {
        auto [r, h, d] = dq.front();
        dq.pop_front();
        if (d > best[static_cast<std::size_t>(r) * H + h]) continue;
        const auto& res = rg_.resources[r];
        if (res.fu >= 0 && res.kind == ResourceKind::InPort) {
          auto& slot = min_cycles_[a][res.fu];
          slot = std::min(slot, d);
        }
        for (const auto& arc : mrrg_.arcs(r)) {
          int nh = arc.dt ? 0 : h;
          if (rg_.resources[arc.to].kind == ResourceKind::Link && ++nh >= H) continue;
          long nd = d + arc.dt;
          auto& b = best[static_cast<std::size_t>(arc.to) * H + nh];
          if (nd >= b) continue;
          b = nd;
          if (arc.dt)
            dq.emplace_back(arc.to, nh, nd);
          else
            dq.emplace_front(arc.to, nh, nd);
        }
      }
    }
  }

  const Dfg& dfg_;
  const RoutingGraph& rg_;
  Mrrg& mrrg_;
  Mapping& m_;
  const MapperConfig& cfg_;
  Router router_;
  std::mt19937_64 rng_;
  double jitter_;
  std::vector<int> lat_;
  std::vector<std::vector<std::int64_t>> lp_;
  std::vector<std::vector<int>> in_, out_;
  std::vector<long> asap_;
  std::vector<std::vector<long>> min_cycles_;
};

}  // namespace

void load_occupancy(const Dfg& dfg, Mrrg& mrrg, const Mapping& mapping) {
  Mapping copy = mapping;
  MapperConfig cfg;
  Engine(dfg, mrrg, copy, cfg).load();
}

bool resolve_adaptive(const Dfg& dfg, Mrrg& mrrg, Mapping& mapping, const MapperConfig& cfg) {
  Engine engine(dfg, mrrg, mapping, cfg);
  engine.load();
  int rounds = 0;
  bool ok = engine.adaptive(rounds);
  engine.finish();
  return ok;
}

bool resolve_sa(const Dfg& dfg, Mrrg& mrrg, Mapping& mapping, const MapperConfig& cfg) {
  Engine engine(dfg, mrrg, mapping, cfg);
  engine.load();
  int rounds = 0;
  bool ok = engine.anneal(rounds);
  engine.finish();
  return ok;
}

MapResult map(const Dfg& dfg, const RoutingGraph& rg, const MapperConfig& cfg) {
  MapResult result;
  result.mii = compute_mii(dfg, rg);
  const int hop = cfg.hop_limit.value_or(rg.hop_limit);
  const int cap = rg.config_bytes_per_pe > 0 ? rg.config_bytes_per_pe / rg.instruction_bytes : 0;
  int last = cfg.max_ii;
  if (cap > 0) last = std::min(last, cap);
  if (cap > 0 && result.mii.mii > cap && cfg.max_ii >= result.mii.mii)
    throw Error(ErrorCode::ConfigOverflow, "MII " + std::to_string(result.mii.mii) + " needs more than " +
                                               std::to_string(rg.config_bytes_per_pe) + " configuration bytes per PE");
  const auto order = order_nodes(dfg, node_latencies(dfg, rg));
  Mapping best;
  int best_score = std::numeric_limits<int>::max();
  for (int ii = result.mii.mii; ii <= last; ++ii) {
    for (int attempt = 0; attempt < cfg.restarts; ++attempt) {
      Mrrg mrrg(rg, ii, hop);
      Mapping m;
      m.arch_name = rg.arch_name;
      m.dfg_name = dfg.name;
      Engine engine(dfg, mrrg, m, cfg, attempt);
      AttemptLog log;
      log.ii = ii;
      bool ok = engine.initial_placement(order);
      if (!ok) {
        log.note = "placement failed";
      } else {
        ok = cfg.strategy == Strategy::Sa ? engine.anneal(log.rounds) : engine.adaptive(log.rounds);
      }
      engine.finish();
      log.overuse = mrrg.total_overuse();
      log.unrouted = engine.unrouted();
      if (ok) {
        auto bad = check_mapping(dfg, rg, m);
        if (!bad.empty()) {
          ok = false;
          log.note = "checker: " + bad.front();
        }
      }
      log.success = ok;
      result.attempts.push_back(log);
      if (ok) {
        result.mapping = std::move(m);
        return result;
      }
      int score = log.overuse + 4 * log.unrouted + (log.note == "placement failed" ? 1000 : 0);
      if (score < best_score) best_score = score, best = m;
    }
  }
  throw MappingFailedError("no legal mapping for II in [" + std::to_string(result.mii.mii) + ", " +
                               std::to_string(last) + "]",
                           best, result.attempts, result.mii);
}

MapResult map(const Dfg& dfg, const ArchSpec& spec, const MapperConfig& cfg) { return map(dfg, elaborate(spec), cfg); }

std::string map_report_json(const Dfg& dfg, const RoutingGraph& rg, const MapResult& result) {
  json j = json::parse(mapping_to_json(dfg, rg, result.mapping));
  json out;
  out["status"] = "ok";
  out["ii"] = result.mapping.ii;
  out["mii"] = {{"res", result.mii.res_mii}, {"rec", result.mii.rec_mii}, {"mii", result.mii.mii}};
  out["schedule_length"] = schedule_length(dfg, rg, result.mapping);
  json attempts = json::array();
  for (const auto& a : result.attempts) {
    json aj{{"ii", a.ii}, {"success", a.success}, {"rounds", a.rounds}, {"overuse", a.overuse}, {"unrouted", a.unrouted}};
    if (!a.note.empty()) aj["note"] = a.note;
    attempts.push_back(aj);
  }
  out["attempts"] = attempts;
  out["mapping"] = j;
  return out.dump(1) + "\n";
}

}  // namespace cgra
