#include "cgra/mrrg.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "cgra/error.hpp"

namespace cgra {

Mrrg::Mrrg(const RoutingGraph& rg, int ii, int hop_limit) : rg_(&rg), ii_(ii), hop_limit_(hop_limit) {
  if (ii < 1) throw Error(ErrorCode::MappingFailed, "II must be >= 1");
  if (hop_limit < 1) throw Error(ErrorCode::SchemaError, "hop limit must be >= 1");
  const int n = resource_count();
  arcs_.resize(n);
  for (int r = 0; r < n; ++r) {
    const auto& res = rg.resources[r];
    for (int s : rg.fanout[r]) {
      int dt = 0;
      if (res.kind == ResourceKind::FuSlot) dt = rg.fus[res.fu].latency_of(Opcode::ROUTE);
      if (rg.resources[s].kind == ResourceKind::Reg) dt = 1;
      arcs_[r].push_back({s, dt});
    }
    if (res.kind == ResourceKind::Reg) arcs_[r].push_back({r, 1});
  }
  claims_.resize(static_cast<std::size_t>(size()));
  history_.assign(static_cast<std::size_t>(size()), 0.0);
}

bool Mrrg::strict(int resource) const {
  auto k = rg_->resources[resource].kind;
  return k == ResourceKind::FuSlot || k == ResourceKind::MuPort;
}

void Mrrg::claim(int resource, long time, int value) {
  auto& cs = claims_[index(resource, slot_of(time))];
  for (auto& c : cs)
    if (c.value == value && c.time == time) {
      ++c.refs;
      return;
    }
  cs.push_back({value, time, 1});
}

void Mrrg::release(int resource, long time, int value) {
  auto& cs = claims_[index(resource, slot_of(time))];
  for (auto it = cs.begin(); it != cs.end(); ++it)
    if (it->value == value && it->time == time) {
      if (--it->refs == 0) cs.erase(it);
      return;
    }
}

int Mrrg::others(int resource, long time, int value) const {
  int n = 0;
  for (const auto& c : claims_[index(resource, slot_of(time))])
    if (c.value != value || c.time != time) ++n;
  return n;
}

int Mrrg::users(int resource, int slot) const { return static_cast<int>(claims_[index(resource, slot)].size()); }

int Mrrg::overuse(int resource, int slot) const {
  return std::max(0, users(resource, slot) - rg_->resources[resource].capacity);
}

int Mrrg::total_overuse() const {
  int total = 0;
  for (int r = 0; r < resource_count(); ++r)
    for (int s = 0; s < ii_; ++s) total += overuse(r, s);
  return total;
}

std::vector<RNode> Mrrg::oversubscribed() const {
  std::vector<RNode> out;
  for (int r = 0; r < resource_count(); ++r)
    for (int s = 0; s < ii_; ++s)
      if (overuse(r, s) > 0) out.push_back({r, s});
  return out;
}

void Mrrg::clear_occupancy() {
  for (auto& cs : claims_) cs.clear();
}

void Mrrg::escalate(double factor) {
  for (int r = 0; r < resource_count(); ++r)
    for (int s = 0; s < ii_; ++s)
      if (overuse(r, s) > 0) {
        double& h = history_[index(r, s)];
        h = (h + 1.0) * factor;
      }
}

bool Mrrg::search(RNode from, RNode to, bool same_cycle) const {
  if (from == to) return true;
  const auto& res = rg_->resources;
  // State: (resource, slot, hops used in the current cycle).
  const int h = hop_limit_ + 1;
  std::vector<char> seen(static_cast<std::size_t>(size()) * h, 0);
  auto key = [&](int r, int s, int hops) { return (static_cast<std::size_t>(r) * ii_ + s) * h + hops; };
  std::deque<std::tuple<int, int, int>> queue;
  auto push = [&](int r, int s, int hops) {
    auto k = key(r, s, hops);
    if (seen[k]) return;
    seen[k] = 1;
    queue.emplace_back(r, s, hops);
  };
  push(from.resource, from.slot, 0);
  if (res[from.resource].kind == ResourceKind::FuSlot) {
    const auto& fu = rg_->fus[res[from.resource].fu];
    for (int p : fu.mu_ports)
      if (RNode{p, from.slot} == to) return true;
  }
  while (!queue.empty()) {
    auto [r, s, hops] = queue.front();
    queue.pop_front();
    for (const auto& a : arcs_[r]) {
      if (same_cycle && a.dt != 0) continue;
      int nh = a.dt ? 0 : hops;
      if (res[a.to].kind == ResourceKind::Link && ++nh > hop_limit_) continue;
      int ns = (s + a.dt) % ii_;
      if (RNode{a.to, ns} == to) return true;
      push(a.to, ns, nh);
    }
  }
  return false;
}

bool Mrrg::reachable(RNode from, RNode to) const { return search(from, to, false); }

bool Mrrg::reachable_within_cycle(RNode from, RNode to) const {
  return from.slot == to.slot && search(from, to, true);
}

std::string Mrrg::to_dot() const {
  std::ostringstream out;
  out << "digraph mrrg {\n  rankdir=LR;\n";
  const auto& res = rg_->resources;
  for (int s = 0; s < ii_; ++s) {
    out << "  subgraph cluster_t" << s << " {\n    label=\"t=" << s << "\";\n";
    for (const auto& r : res)
      out << "    \"" << r.name << "@" << s << "\" [shape=" << (r.kind == ResourceKind::FuSlot ? "box" : "ellipse")
          << "];\n";
    out << "  }\n";
  }
  for (int r = 0; r < resource_count(); ++r)
    for (int s = 0; s < ii_; ++s)
      for (const auto& a : arcs_[r])
        out << "  \"" << res[r].name << "@" << s << "\" -> \"" << res[a.to].name << "@" << (s + a.dt) % ii_ << "\";\n";
  out << "}\n";
  return out.str();
}

}  // namespace cgra
