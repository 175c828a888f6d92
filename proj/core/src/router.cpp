#include "cgra/router.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

#include "cgra/error.hpp"

namespace cgra {

Router::Router(const Mrrg& mrrg) : mrrg_(mrrg) {}

double Router::base_cost(int resource, const RouteCosts& costs) const {
  switch (mrrg_.graph().resources[resource].kind) {
    case ResourceKind::FuSlot: return costs.fu;
    case ResourceKind::Link: return costs.link;
    case ResourceKind::Reg: return costs.reg;
    default: return costs.port;
  }
}

std::optional<RouteResult> Router::route(int value, const std::vector<RouteStep>& sources, int target, long arrival,
                                         const RouteCosts& costs, bool allow_overuse) {
  const auto& rg = mrrg_.graph();
  const auto& res = rg.resources;
  const int hop_limit = mrrg_.hop_limit();
  const int H = hop_limit + 1;

  long tmin = arrival + 1;
  for (const auto& s : sources)
    if (s.time <= arrival) tmin = std::min<long>(tmin, s.time);
  if (tmin > arrival) return std::nullopt;
  const long W = arrival - tmin + 1;
  const std::size_t n_rt = static_cast<std::size_t>(res.size()) * W;
  const std::size_t n_states = n_rt * H;
  if (dist_.size() < n_states) {
    dist_.resize(n_states);
    parent_.resize(n_states);
    stamp_.assign(n_states, 0);
  }
  if (settled_.size() < n_rt) {
    settled_.resize(n_rt);
    settled_stamp_.assign(n_rt, 0);
  }
  if (++gen_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    std::fill(settled_stamp_.begin(), settled_stamp_.end(), 0);
    gen_ = 1;
  }

  auto rt_index = [&](int r, long t) { return static_cast<std::size_t>(r) * W + (t - tmin); };
  auto state = [&](int r, long t, int h) { return rt_index(r, t) * H + h; };
  auto decode = [&](std::size_t s, int& r, long& t, int& h) {
    h = static_cast<int>(s % H);
    std::size_t rt = s / H;
    r = static_cast<int>(rt / W);
    t = static_cast<long>(rt % W) + tmin;
  };

  // Rnodes of the existing tree; the route may start there but never re-enter.
  std::vector<std::size_t> tree;
  for (const auto& s : sources)
    if (s.time <= arrival) tree.push_back(rt_index(s.resource, s.time));
  std::sort(tree.begin(), tree.end());
  auto in_tree = [&](int r, long t) { return std::binary_search(tree.begin(), tree.end(), rt_index(r, t)); };

  using Item = std::tuple<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  std::vector<int> source_of_root;
  auto relax = [&](std::size_t s, double d, int par) {
    if (stamp_[s] == gen_ && dist_[s] <= d) return;
    stamp_[s] = gen_;
    dist_[s] = d;
    parent_[s] = par;
    pq.push({d, s});
  };
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    if (s.time > arrival) continue;
    // Roots are marked with parent = -(source index) - 1.
    relax(state(s.resource, s.time, std::min(s.hops, hop_limit)), 0.0, -static_cast<int>(i) - 1);
  }

  // Walks the parent chain to detect a modulo self-conflict: the same rnode
  // claimed by this path at a different absolute time.
  auto self_conflict = [&](std::size_t from, int r, long t) {
    const int slot = mrrg_.slot_of(t);
    for (long s = static_cast<long>(from); s >= 0;) {
      int pr, ph;
      long pt;
      decode(static_cast<std::size_t>(s), pr, pt, ph);
      if (pr == r && pt != t && mrrg_.slot_of(pt) == slot) return true;
      int p = parent_[s];
      s = p >= 0 ? p : -1;
    }
    return false;
  };

  while (!pq.empty()) {
    auto [d, s] = pq.top();
    pq.pop();
    if (stamp_[s] != gen_ || d > dist_[s]) continue;
    int r, h;
    long t;
    decode(s, r, t, h);
    const std::size_t rt = rt_index(r, t);
    if (settled_stamp_[rt] == gen_ && settled_[rt] <= h) continue;
    settled_stamp_[rt] = gen_;
    settled_[rt] = static_cast<std::int8_t>(h);

    if (r == target && t == arrival) {
      RouteResult out;
      out.cost = d;
      std::size_t cur = s;
      while (parent_[cur] >= 0) {
        int cr, ch;
        long ct;
        decode(cur, cr, ct, ch);
        out.steps.push_back({cr, static_cast<int>(ct), ch});
        cur = static_cast<std::size_t>(parent_[cur]);
      }
      out.source = -parent_[cur] - 1;
      std::reverse(out.steps.begin(), out.steps.end());
      if (out.steps.empty()) return std::nullopt;  // target already in the tree
      return out;
    }

    for (const auto& a : mrrg_.arcs(r)) {
      const long nt = t + a.dt;
      if (nt > arrival) continue;
      const auto& nres = res[a.to];
      int nh = a.dt ? 0 : h;
      if (nres.kind == ResourceKind::Link && ++nh > hop_limit) continue;
      if (nres.kind == ResourceKind::MuPort) continue;
      if (nres.kind == ResourceKind::InPort && nres.fu >= 0 && a.to != target && a.to != rg.fus[nres.fu].left)
        continue;  // right/pred operands are dead ends unless they are the goal
      if (in_tree(a.to, nt)) continue;
      const int others = mrrg_.others(a.to, nt, value);
      double c = base_cost(a.to, costs) + mrrg_.history(a.to, mrrg_.slot_of(nt));
      if (mrrg_.strict(a.to)) {
        if (others > 0) continue;
      } else if (others >= nres.capacity) {
        if (!allow_overuse) continue;
        c += costs.overuse * (1.0 + mrrg_.history(a.to, mrrg_.slot_of(nt))) * (others - nres.capacity + 1);
      }
      if (self_conflict(s, a.to, nt)) continue;
      relax(state(a.to, nt, nh), d + c, static_cast<int>(s));
    }
  }
  return std::nullopt;
}

RouteResult route_edge(const Mrrg& mrrg, int value, const std::vector<RouteStep>& sources, int target, long arrival,
                       const RouteCosts& costs) {
  Router router(mrrg);
  auto r = router.route(value, sources, target, arrival, costs);
  if (!r)
    throw Error(ErrorCode::NoPath, "no route to " + mrrg.graph().resources[target].name + " at t=" +
                                       std::to_string(arrival));
  return *r;
}

}  // namespace cgra
