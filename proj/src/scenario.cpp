#include "netupd/scenario.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>

namespace netupd {

namespace example {

namespace {
void add_hop(Network& net, SwitchId from, SwitchId to, HostId dst) {
  Rule r;
  r.priority = 1;
  r.pattern.fields = {{*net.fields.index_of("dst"), dst}};
  r.actions = {Action::forward(*port_toward(net, from, to))};
  Switch* s = net.find_switch(from);
  std::vector<Rule> rules = s->table.rules();
  rules.push_back(r);
  s->table = Table(std::move(rules));
}
}  // namespace

Topology topology() {
  Topology t;
  t.source = "two-pod example";
  t.names = {"C1", "C2", "A1", "A2", "A3", "A4", "T1", "T2", "T3", "T4"};
  auto ix = [](SwitchId s) { return static_cast<std::size_t>(s - 1); };
  for (SwitchId c : {C1, C2})
    for (SwitchId a : {A1, A2, A3, A4}) t.add_edge(ix(c), ix(a));
  for (SwitchId a : {A1, A2})
    for (SwitchId tor : {T1, T2}) t.add_edge(ix(a), ix(tor));
  for (SwitchId a : {A3, A4})
    for (SwitchId tor : {T3, T4}) t.add_edge(ix(a), ix(tor));
  t.hosts.assign(t.size(), 0);
  for (SwitchId tor : {T1, T2, T3, T4}) t.hosts[ix(tor)] = 1;
  return t;
}

Network base_network() {
  Network net = to_network(topology());
  net.classes = {TrafficClass{0, "h3", {{0, 3}}}};
  return net;
}

Network red_config() {
  Network net = base_network();
  install_route(net, {T1, A1, C1, A3, T3}, 3);
  return net;
}

Network green_config() {
  Network net = base_network();
  install_route(net, {T1, A1, C2, A3, T3}, 3);
  // C1 keeps its rule; only A1 and C2 differ from the red configuration.
  install_route(net, {C1, A3, T3}, 3);
  return net;
}

Network blue_config() {
  Network net = base_network();
  install_route(net, {T1, A2, C1, A4, T3}, 3);
  add_hop(net, A1, C1, 3);
  add_hop(net, A3, T3, 3);
  return net;
}

namespace {
ltl::FormulaPtr src_atom(const Network& net) {
  return ltl::atom(ltl::Atom::at_port(T1, *host_port(net, T1, 1)));
}
ltl::FormulaPtr dst_atom(const Network& net) {
  return ltl::atom(ltl::Atom::at_port(T3, *host_port(net, T3, 3)));
}
}  // namespace

ltl::FormulaPtr reachability(const Network& net) {
  return ltl::build_property(ltl::PropertyKind::Reachability, src_atom(net), dst_atom(net), {});
}

ltl::FormulaPtr reachability_and_waypoint(const Network& net) {
  auto w = ltl::build_property(
      ltl::PropertyKind::Waypoint, src_atom(net), dst_atom(net),
      {ltl::atom(ltl::Atom::at_switch(A2)), ltl::atom(ltl::Atom::at_switch(A3))});
  return ltl::conj(reachability(net), w);
}

}  // namespace example

namespace {

struct FlowEdge {
  std::size_t to;
  int cap;
  std::size_t rev;
  bool forward;
};

}  // namespace

std::vector<std::vector<std::size_t>> disjoint_paths(const Topology& topo, std::size_t s,
                                                     std::size_t d,
                                                     const std::vector<char>& blocked,
                                                     std::uint64_t seed) {
  const std::size_t n = topo.size();
  if (s == d || s >= n || d >= n) return {};
  // Node v splits into in = 2v and out = 2v+1.
  std::vector<std::vector<FlowEdge>> g(2 * n);
  auto add = [&](std::size_t a, std::size_t b, int cap) {
    g[a].push_back({b, cap, g[b].size(), true});
    g[b].push_back({a, 0, g[a].size() - 1, false});
  };
  auto usable = [&](std::size_t v) { return v == s || v == d || !blocked[v]; };
  for (std::size_t v = 0; v < n; ++v)
    if (usable(v)) add(2 * v, 2 * v + 1, (v == s || v == d) ? 2 : 1);
  for (auto [a, b] : topo.edges) {
    if (!usable(a) || !usable(b)) continue;
    add(2 * a + 1, 2 * b, 1);
    add(2 * b + 1, 2 * a, 1);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> order(2 * n);
  for (std::size_t v = 0; v < 2 * n; ++v) {
    order[v].resize(g[v].size());
    for (std::size_t i = 0; i < g[v].size(); ++i) order[v][i] = i;
    std::shuffle(order[v].begin(), order[v].end(), rng);
  }
  const std::size_t src = 2 * s + 1, sink = 2 * d;
  for (int round = 0; round < 2; ++round) {
    std::vector<std::pair<std::size_t, std::size_t>> prev(2 * n, {SIZE_MAX, 0});
    std::queue<std::size_t> q;
    q.push(src);
    prev[src] = {src, 0};
    while (!q.empty() && prev[sink].first == SIZE_MAX) {
      auto v = q.front();
      q.pop();
      for (auto i : order[v]) {
        const auto& e = g[v][i];
        if (e.cap > 0 && prev[e.to].first == SIZE_MAX) {
          prev[e.to] = {v, i};
          q.push(e.to);
        }
      }
    }
    if (prev[sink].first == SIZE_MAX) return {};
    for (std::size_t v = sink; v != src;) {
      auto [u, i] = prev[v];
      g[u][i].cap -= 1;
      g[v][g[u][i].rev].cap += 1;
      v = u;
    }
  }
  std::vector<std::vector<std::size_t>> paths;
  for (int k = 0; k < 2; ++k) {
    std::vector<std::size_t> path{s};
    std::size_t v = src;
    while (v != sink) {
      bool moved = false;
      for (auto& e : g[v]) {
        if (!e.forward || e.cap != 0) continue;
        // Saturated forward edge out of an out-node carries flow.
        e.cap = -1;
        v = e.to;
        moved = true;
        break;
      }
      if (!moved) return {};
      path.push_back(v / 2);
      v = 2 * (v / 2) + 1;
      if (v / 2 == d) break;
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

namespace {

ltl::FormulaPtr port_atom(const Network& net, SwitchId sw, HostId h) {
  auto p = host_port(net, sw, h);
  if (!p) throw TopologyError("switch " + std::to_string(sw) + " has no host " + std::to_string(h));
  return ltl::atom(ltl::Atom::at_port(sw, *p));
}

std::vector<SwitchId> to_ids(const std::vector<std::size_t>& nodes) {
  std::vector<SwitchId> out;
  for (auto v : nodes) out.push_back(static_cast<SwitchId>(v + 1));
  return out;
}

}  // namespace

Scenario gen_diamond_scenario(const Topology& topo, const DiamondOptions& opts) {
  if (opts.pairs == 0) throw TopologyError("diamond scenario needs at least one pair");
  if (topo.size() < 4) throw TopologyError("topology too small for a diamond");
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, topo.size() - 1);
  std::size_t nway = 0;
  if (opts.kind == ltl::PropertyKind::Waypoint) nway = 1;
  if (opts.kind == ltl::PropertyKind::ServiceChain) nway = std::max<std::size_t>(1, opts.chain_length);

  struct PairPlan {
    std::size_t s, d;
    std::vector<std::size_t> wi, wf, way;
  };
  std::vector<PairPlan> plans;
  std::set<std::size_t> used_dst, endpoints;
  for (std::size_t p = 0; p < opts.pairs; ++p) {
    bool found = false;
    for (unsigned attempt = 0; attempt < opts.retries && !found; ++attempt) {
      std::size_t s = pick(rng), d = pick(rng);
      if (s == d || used_dst.count(d)) continue;
      if (opts.double_diamond && (used_dst.count(s) || endpoints.count(s) || endpoints.count(d)))
        continue;
      std::vector<std::size_t> chain{s};
      std::set<std::size_t> chosen{s, d};
      bool ok = true;
      for (std::size_t k = 0; k < nway; ++k) {
        std::size_t w = pick(rng);
        if (chosen.count(w)) {
          ok = false;
          break;
        }
        chosen.insert(w);
        chain.push_back(w);
      }
      if (!ok) continue;
      chain.push_back(d);
      std::vector<char> blocked(topo.size(), 0);
      for (auto v : chain) blocked[v] = 1;
      std::vector<std::size_t> wi{s}, wf{s};
      for (std::size_t k = 0; k + 1 < chain.size() && ok; ++k) {
        blocked[chain[k]] = 0;
        blocked[chain[k + 1]] = 0;
        auto paths = disjoint_paths(topo, chain[k], chain[k + 1], blocked, rng());
        blocked[chain[k]] = 1;
        blocked[chain[k + 1]] = 1;
        if (paths.size() != 2) {
          ok = false;
          break;
        }
        for (int j = 0; j < 2; ++j)
          if (paths[j].size() < 2 + opts.min_interior) ok = false;
        if (!ok) break;
        if (std::uniform_int_distribution<int>(0, 1)(rng)) std::swap(paths[0], paths[1]);
        for (std::size_t j = 1; j < paths[0].size(); ++j) {
          wi.push_back(paths[0][j]);
          blocked[paths[0][j]] = 1;
        }
        for (std::size_t j = 1; j < paths[1].size(); ++j) {
          wf.push_back(paths[1][j]);
          blocked[paths[1][j]] = 1;
        }
      }
      if (!ok) continue;
      PairPlan plan{s, d, wi, wf, {chain.begin() + 1, chain.end() - 1}};
      plans.push_back(std::move(plan));
      used_dst.insert(d);
      if (opts.double_diamond) used_dst.insert(s);
      endpoints.insert(s);
      endpoints.insert(d);
      found = true;
    }
    if (!found)
      throw TopologyError("no pair with disjoint paths found after " +
                          std::to_string(opts.retries) + " attempts");
  }

  Topology t = topo;
  t.hosts.assign(t.size(), 0);
  for (auto v : endpoints) t.hosts[v] = 1;
  Network base = to_network(t);
  std::map<std::size_t, HostId> host_of;
  for (auto v : endpoints) host_of[v] = hosts_at(base, static_cast<SwitchId>(v + 1)).at(0);

  Scenario sc;
  sc.kind = opts.kind;
  sc.seed = opts.seed;
  sc.pairs = opts.pairs;
  sc.double_diamond = opts.double_diamond;
  sc.name = "diamond-" + ltl::to_string(opts.kind) + (opts.double_diamond ? "-double" : "") +
            "-p" + std::to_string(opts.pairs) + "-s" + std::to_string(opts.seed);
  const std::size_t dst_field = 0;
  std::uint32_t cid = 0;
  for (const auto& pl : plans) {
    HostId hd = host_of[pl.d];
    base.classes.push_back({cid++, "to_h" + std::to_string(hd), {{dst_field, hd}}});
    if (opts.double_diamond) {
      HostId hs = host_of[pl.s];
      base.classes.push_back({cid++, "to_h" + std::to_string(hs), {{dst_field, hs}}});
    }
  }
  sc.initial = base;
  sc.final_net = base;
  std::vector<ltl::FormulaPtr> conjuncts;
  for (const auto& pl : plans) {
    auto wi = to_ids(pl.wi), wf = to_ids(pl.wf);
    HostId hs = host_of[pl.s], hd = host_of[pl.d];
    install_route(sc.initial, wi, hd);
    install_route(sc.final_net, wf, hd);
    SwitchId s = wi.front(), d = wi.back();
    auto guard = ltl::atom(ltl::Atom::field_eq("dst", hd));
    std::vector<ltl::FormulaPtr> ways;
    for (auto w : pl.way) ways.push_back(ltl::atom(ltl::Atom::at_switch(static_cast<SwitchId>(w + 1))));
    conjuncts.push_back(ltl::build_property(opts.kind, port_atom(base, s, hs),
                                            port_atom(base, d, hd), ways, guard));
    if (opts.double_diamond) {
      std::vector<SwitchId> ri(wf.rbegin(), wf.rend()), rf(wi.rbegin(), wi.rend());
      install_route(sc.initial, ri, hs);
      install_route(sc.final_net, rf, hs);
      conjuncts.push_back(ltl::build_property(
          ltl::PropertyKind::Reachability, port_atom(base, d, hd), port_atom(base, s, hs), {},
          ltl::atom(ltl::Atom::field_eq("dst", hs))));
    }
    sc.initial_paths.push_back(wi);
    sc.final_paths.push_back(wf);
    sc.waypoints.push_back(to_ids(pl.way));
  }
  sc.phi = ltl::conj_all(conjuncts);
  return sc;
}

}  // namespace netupd
