#include "netupd/waitrm.hpp"

#include <algorithm>
#include <chrono>
#include <variant>

#include "netupd/kripke.hpp"
#include "netupd/semantics.hpp"

namespace netupd {

bool ReachRelation::reaches(SwitchId from, SwitchId to) const {
  auto a = std::lower_bound(switches.begin(), switches.end(), from);
  auto b = std::lower_bound(switches.begin(), switches.end(), to);
  if (a == switches.end() || *a != from || b == switches.end() || *b != to) return false;
  return reach[a - switches.begin()][b - switches.begin()] != 0;
}

std::vector<SwitchId> ReachRelation::reached_from(SwitchId from) const {
  std::vector<SwitchId> out;
  for (auto s : switches)
    if (reaches(from, s)) out.push_back(s);
  return out;
}

namespace {

// Per-class switch graph; node = class * switches + switch index.
class ClassGraph {
 public:
  explicit ClassGraph(const Network& net)
      : net_(&net), classes_(effective_classes(net)), n_(net.switches.size()) {
    succ_.resize(classes_.size() * n_);
    for (const auto& l : net.links)
      if (l.from.is_host() && !l.to.is_host()) ingress_.push_back(net.switch_index(l.to.id));
    std::sort(ingress_.begin(), ingress_.end());
    ingress_.erase(std::unique(ingress_.begin(), ingress_.end()), ingress_.end());
  }

  void add_table(SwitchId sw, const Table& tbl) {
    std::size_t si = net_->switch_index(sw);
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      auto& out = succ_[c * n_ + si];
      for (const auto& r : tbl.rules()) {
        bool applies = true;
        for (const auto& ft : r.pattern.fields) {
          auto fv = classes_[c].fixed_value(ft.field);
          if (fv && *fv != ft.value) applies = false;
        }
        if (!applies) continue;
        for (const auto& a : r.actions) {
          if (a.kind != Action::Kind::Forward) continue;
          const Link* l = net_->link_from(Location::at(sw, a.port));
          if (!l || l->to.is_host()) continue;
          std::size_t t = c * n_ + net_->switch_index(l->to.id);
          if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
        }
      }
    }
  }

  void add_network(const Network& net) {
    for (const auto& s : net.switches) add_table(s.id, s.table);
  }

  // Nodes reachable by at least one hop from `from`.
  std::vector<char> closure(const std::vector<std::size_t>& from) const {
    std::vector<char> seen(succ_.size(), 0);
    std::vector<std::size_t> stack;
    for (auto v : from)
      for (auto w : succ_[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto w : succ_[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    return seen;
  }

  std::vector<char> from_ingress() const {
    std::vector<std::size_t> src;
    for (std::size_t c = 0; c < classes_.size(); ++c)
      for (auto si : ingress_) src.push_back(c * n_ + si);
    auto seen = closure(src);
    for (auto v : src) seen[v] = 1;
    return seen;
  }

  const std::vector<std::size_t>& successors(std::size_t v) const { return succ_[v]; }
  std::size_t classes() const { return classes_.size(); }
  std::size_t switches() const { return n_; }
  std::size_t index(SwitchId sw) const { return net_->switch_index(sw); }

 private:
  const Network* net_;
  std::vector<TrafficClass> classes_;
  std::size_t n_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::size_t> ingress_;
};

using Clock = std::chrono::steady_clock;

}  // namespace

ReachRelation inter_switch_reachability(const Network& net) {
  ClassGraph g(net);
  g.add_network(net);
  ReachRelation r;
  for (const auto& s : net.switches) r.switches.push_back(s.id);
  std::sort(r.switches.begin(), r.switches.end());
  const std::size_t n = r.switches.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t ai = g.index(r.switches[a]);
    for (std::size_t c = 0; c < g.classes(); ++c)
      for (auto t : g.successors(c * g.switches() + ai)) adj[a].push_back(t % g.switches());
  }
  // Positions in r.switches and switch indices coincide once both are sorted.
  r.reach.assign(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::size_t> stack(adj[a].begin(), adj[a].end());
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (r.reach[a][v]) continue;
      r.reach[a][v] = 1;
      for (auto w : adj[v]) stack.push_back(w);
    }
  }
  return r;
}

WaitRemovalResult remove_waits(const Network& n_i, const std::vector<Command>& cmds,
                               const ltl::FormulaPtr& phi, const WaitRemovalOptions& opts) {
  auto t0 = Clock::now();
  WaitRemovalResult res;
  res.cmds = cmds;

  std::vector<Command> updates;
  std::vector<char> wait_before;  // wait present before updates[k]
  bool pending_wait = false;
  for (const auto& c : cmds) {
    if (is_wait(c)) {
      ++res.waits_before;
      pending_wait = true;
    } else if (is_update(c)) {
      wait_before.push_back(pending_wait);
      updates.push_back(c);
      pending_wait = false;
    } else {
      throw SimError("wait removal expects only updates and waits");
    }
  }
  if (updates.empty()) {
    res.cmds.clear();
    res.removed = res.waits_before;
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return res;
  }

  std::vector<Network> configs{n_i.configuration()};
  for (const auto& u : updates) configs.push_back(apply_command(configs.back(), u));

  std::vector<Command> out{updates[0]};
  std::size_t window_start = 0;  // config index
  auto new_window = [&](std::size_t a) {
    ClassGraph g(configs[a]);
    g.add_network(configs[a]);
    return g;
  };
  ClassGraph graph = new_window(0);
  // Nodes updated in the window whose old table could have seen traffic.
  std::vector<std::size_t> tainted;
  auto note_update = [&](std::size_t k) {
    SwitchId sw = command_switch(updates[k]);
    auto reached = graph.from_ingress();
    std::size_t si = graph.index(sw);
    for (std::size_t c = 0; c < graph.classes(); ++c)
      if (reached[c * graph.switches() + si]) tainted.push_back(c * graph.switches() + si);
    graph.add_table(sw, configs[k + 1].find_switch(sw)->table);
  };
  note_update(0);

  for (std::size_t k = 1; k < updates.size(); ++k) {
    SwitchId sk = command_switch(updates[k]);
    bool keep = false;
    if (wait_before[k]) {
      ClassGraph probe = graph;
      probe.add_table(sk, configs[k + 1].find_switch(sk)->table);
      auto seen = probe.closure(tainted);
      std::size_t si = probe.index(sk);
      for (std::size_t c = 0; c < probe.classes(); ++c)
        if (seen[c * probe.switches() + si]) keep = true;
      if (!keep && opts.verify_windows) {
        std::vector<Command> window(updates.begin() + window_start,
                                    updates.begin() + k + 1);
        try {
          keep = !oracle_verify_windowed(configs[window_start], window, phi, opts.max_traces).ok;
        } catch (const SimError&) {
          keep = true;
        }
      }
    }
    if (keep) {
      out.push_back(Wait{});
      ++res.retained;
      window_start = k;
      graph = new_window(k);
      tainted.clear();
    }
    out.push_back(updates[k]);
    note_update(k);
  }

  OracleVerdict v;
  try {
    v = oracle_verify_windowed(n_i, out, phi, opts.max_traces);
  } catch (const SimError& e) {
    v.ok = false;
    v.message = e.what();
  }
  if (!v.ok) {
    res.cmds = cmds;
    res.fallback = true;
    res.removed = 0;
    res.retained = res.waits_before;
    res.message = "re-verification failed: " + v.message;
  } else {
    res.cmds = std::move(out);
    res.removed = res.waits_before - res.retained;
  }
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

}  // namespace netupd
