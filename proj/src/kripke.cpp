#include "netupd/kripke.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace netupd {

namespace {

auto state_key(const KState& s) {
  return std::make_tuple(s.cls, s.sw, static_cast<int>(s.role), s.port);
}

void insert_sorted(std::vector<StateId>& v, StateId x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

void erase_sorted(std::vector<StateId>& v, StateId x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}

// Packets of `cls` that `tbl` can tell apart.
std::vector<Packet> local_representatives(const FieldSchema& fields, const Table& tbl,
                                          const TrafficClass& cls) {
  const std::size_t nf = fields.size();
  std::vector<std::vector<std::uint32_t>> choices(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    if (auto v = cls.fixed_value(f)) {
      choices[f] = {*v};
      continue;
    }
    std::set<std::uint32_t> tested;
    for (const auto& r : tbl.rules())
      for (const auto& t : r.pattern.fields)
        if (t.field == f) tested.insert(t.value);
    choices[f].assign(tested.begin(), tested.end());
    for (std::uint32_t v = 0; v <= fields.max_values[f]; ++v)
      if (!tested.count(v)) {
        choices[f].push_back(v);
        break;
      }
  }
  std::vector<Packet> out;
  Packet cur;
  cur.fields.assign(nf, 0);
  auto rec = [&](auto&& self, std::size_t f) -> void {
    if (f == nf) {
      out.push_back(cur);
      return;
    }
    for (auto v : choices[f]) {
      cur.fields[f] = v;
      self(self, f + 1);
    }
  };
  rec(rec, 0);
  return out;
}

const Location* peer_of(const KripkeStructure& k, const Location& from) {
  auto it = std::lower_bound(k.out_links.begin(), k.out_links.end(), from,
                             [](const auto& e, const Location& l) { return e.first < l; });
  if (it == k.out_links.end() || it->first != from) return nullptr;
  return &it->second;
}

std::vector<StateId> compute_succ(const KripkeStructure& k, StateId q, const Table& tbl,
                                  const std::vector<Packet>& reps) {
  const KState& s = k.states[q];
  std::vector<StateId> out;
  for (const auto& pkt : reps) {
    for (const auto& [opkt, opt] : lookup(tbl, pkt, s.port)) {
      if (!k.classes[s.cls].contains(opkt))
        throw KripkeError("switch " + std::to_string(s.sw) +
                          " rewrites a packet of class " + k.classes[s.cls].name +
                          " into another class");
      const Location* to = peer_of(k, Location::at(s.sw, opt));
      if (!to) continue;
      std::optional<StateId> t;
      if (to->is_host())
        t = k.find_state(KState::Role::Egress, s.sw, opt, s.cls);
      else
        t = k.find_state(KState::Role::Ingress, to->id, to->port, s.cls);
      if (!t) throw KripkeError("missing state for " + to->to_string());
      out.push_back(*t);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) {
    auto d = k.find_state(KState::Role::Drop, s.sw, s.port, s.cls);
    out.push_back(*d);
  }
  return out;
}

std::optional<std::vector<StateId>> dfs_cycle(const KripkeStructure& k,
                                              const std::vector<StateId>& roots) {
  // 0 = unseen, 1 = on stack, 2 = done
  std::vector<std::uint8_t> color(k.size(), 0);
  std::vector<std::pair<StateId, std::size_t>> stack;
  for (StateId r : roots) {
    if (color[r]) continue;
    color[r] = 1;
    stack.push_back({r, 0});
    while (!stack.empty()) {
      auto& [q, i] = stack.back();
      if (i == k.succ[q].size()) {
        color[q] = 2;
        stack.pop_back();
        continue;
      }
      StateId t = k.succ[q][i++];
      if (t == q) {
        if (k.succ[q].size() > 1) return std::vector<StateId>{q};
        continue;
      }
      if (color[t] == 1) {
        std::vector<StateId> cyc;
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
          cyc.push_back(it->first);
          if (it->first == t) break;
        }
        std::reverse(cyc.begin(), cyc.end());
        return cyc;
      }
      if (color[t] == 0) {
        color[t] = 1;
        stack.push_back({t, 0});
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::size_t KripkeStructure::edge_count() const {
  std::size_t n = 0;
  for (const auto& s : succ) n += s.size();
  return n;
}

std::optional<StateId> KripkeStructure::find_state(KState::Role role, SwitchId sw, PortId pt,
                                                   std::uint32_t cls) const {
  KState probe{role, sw, pt, cls, 0};
  auto key = state_key(probe);
  auto it = std::lower_bound(states.begin(), states.end(), key,
                             [](const KState& s, const auto& k) { return state_key(s) < k; });
  if (it == states.end() || state_key(*it) != key) return std::nullopt;
  return static_cast<StateId>(it - states.begin());
}

bool KripkeStructure::atom_holds(StateId q, const ltl::Atom& a) const {
  return ltl::eval_atom(a, states[q].position(), classes, fields);
}

KripkeStructure make_kripke(std::vector<KState> states,
                            const std::vector<std::pair<StateId, StateId>>& edges,
                            std::vector<StateId> initial, std::vector<TrafficClass> classes,
                            FieldSchema fields) {
  KripkeStructure k;
  k.states = std::move(states);
  k.succ.assign(k.size(), {});
  k.pred.assign(k.size(), {});
  for (auto [a, b] : edges) {
    if (a >= k.size() || b >= k.size()) throw KripkeError("edge references unknown state");
    insert_sorted(k.succ[a], b);
    insert_sorted(k.pred[b], a);
  }
  for (StateId q = 0; q < k.size(); ++q)
    if (k.succ[q].empty()) throw KripkeError("state " + std::to_string(q) + " has no successor");
  std::sort(initial.begin(), initial.end());
  initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
  k.initial = std::move(initial);
  k.classes = std::move(classes);
  if (k.classes.empty()) k.classes.push_back(TrafficClass{0, "all", {}});
  k.fields = std::move(fields);
  return k;
}

std::vector<TrafficClass> effective_classes(const Network& net) {
  if (!net.classes.empty()) return net.classes;
  std::size_t total = 1;
  for (auto m : net.fields.max_values) {
    total *= static_cast<std::size_t>(m) + 1;
    if (total > 256)
      throw KripkeError("no traffic classes declared and the field space is too large");
  }
  std::vector<TrafficClass> out;
  std::vector<std::uint32_t> cur(net.fields.size(), 0);
  for (std::size_t i = 0; i < total; ++i) {
    TrafficClass c;
    c.id = static_cast<std::uint32_t>(i);
    c.name = "c" + std::to_string(i);
    for (std::size_t f = 0; f < cur.size(); ++f) c.constraint.push_back({f, cur[f]});
    out.push_back(std::move(c));
    for (std::size_t f = cur.size(); f-- > 0;) {
      if (++cur[f] <= net.fields.max_values[f]) break;
      cur[f] = 0;
    }
  }
  return out;
}

KripkeStructure build_kripke(const Network& net) {
  KripkeStructure k;
  k.classes = effective_classes(net);
  k.fields = net.fields;
  for (const auto& l : net.links)
    if (!l.from.is_host()) k.out_links.emplace_back(l.from, l.to);
  std::sort(k.out_links.begin(), k.out_links.end());

  std::map<SwitchId, std::vector<PortId>> in_ports, host_ports;
  std::set<std::pair<SwitchId, PortId>> host_fed;
  for (const auto& l : net.links) {
    if (!l.to.is_host()) {
      in_ports[l.to.id].push_back(l.to.port);
      if (l.from.is_host()) host_fed.insert({l.to.id, l.to.port});
    }
    if (!l.from.is_host() && l.to.is_host()) host_ports[l.from.id].push_back(l.from.port);
  }
  for (auto& [sw, v] : in_ports) std::sort(v.begin(), v.end());
  for (auto& [sw, v] : host_ports) std::sort(v.begin(), v.end());

  for (const auto& s : net.switches) k.switch_ids.push_back(s.id);
  for (std::uint32_t c = 0; c < k.classes.size(); ++c) {
    for (const auto& s : net.switches) {
      for (PortId p : in_ports[s.id]) k.states.push_back({KState::Role::Ingress, s.id, p, c, 0});
      for (PortId p : host_ports[s.id]) k.states.push_back({KState::Role::Egress, s.id, p, c, 0});
      for (PortId p : in_ports[s.id]) k.states.push_back({KState::Role::Drop, s.id, p, c, 0});
    }
  }
  k.succ.assign(k.size(), {});
  k.pred.assign(k.size(), {});
  k.ingress_of.assign(k.switch_ids.size(), {});
  k.drop_of.assign(k.switch_ids.size(), {});
  for (StateId q = 0; q < k.size(); ++q) {
    const KState& s = k.states[q];
    std::size_t si = net.switch_index(s.sw);
    if (s.role == KState::Role::Ingress) {
      k.ingress_of[si].push_back(q);
      k.drop_of[si].push_back(*k.find_state(KState::Role::Drop, s.sw, s.port, s.cls));
      if (host_fed.count({s.sw, s.port})) k.initial.push_back(q);
    } else {
      k.succ[q] = {q};
      k.pred[q].push_back(q);
    }
  }
  for (const auto& s : net.switches) {
    std::size_t si = net.switch_index(s.id);
    std::vector<std::vector<Packet>> reps(k.classes.size());
    for (std::size_t c = 0; c < k.classes.size(); ++c)
      reps[c] = local_representatives(net.fields, s.table, k.classes[c]);
    for (StateId q : k.ingress_of[si]) {
      k.succ[q] = compute_succ(k, q, s.table, reps[k.states[q].cls]);
      for (StateId t : k.succ[q]) insert_sorted(k.pred[t], q);
    }
  }
  if (auto cyc = check_dag(k)) {
    std::string msg = "forwarding loop:";
    for (StateId q : *cyc) msg += " " + state_name(k, q);
    throw LoopError(msg, *cyc);
  }
  return k;
}

std::optional<std::vector<StateId>> check_dag(const KripkeStructure& k) {
  std::vector<StateId> all(k.size());
  for (StateId q = 0; q < k.size(); ++q) all[q] = q;
  return dfs_cycle(k, all);
}

std::optional<std::vector<StateId>> find_cycle_from(const KripkeStructure& k,
                                                    const std::vector<StateId>& roots) {
  return dfs_cycle(k, roots);
}

UpdateDelta refresh_switch(KripkeStructure& k, const Network& net, SwitchId sw) {
  auto it = std::lower_bound(k.switch_ids.begin(), k.switch_ids.end(), sw);
  if (it == k.switch_ids.end() || *it != sw)
    throw KripkeError("structure has no switch " + std::to_string(sw));
  std::size_t si = static_cast<std::size_t>(it - k.switch_ids.begin());
  const Switch* s = net.find_switch(sw);
  if (!s) throw NetworkError("unknown switch " + std::to_string(sw));
  UpdateDelta delta;
  std::vector<std::vector<Packet>> reps(k.classes.size());
  std::vector<bool> have(k.classes.size(), false);
  for (StateId q : k.ingress_of[si]) {
    std::uint32_t c = k.states[q].cls;
    if (!have[c]) {
      reps[c] = local_representatives(k.fields, s->table, k.classes[c]);
      have[c] = true;
    }
    auto next = compute_succ(k, q, s->table, reps[c]);
    if (next == k.succ[q]) continue;
    for (StateId t : k.succ[q]) erase_sorted(k.pred[t], q);
    for (StateId t : next) insert_sorted(k.pred[t], q);
    k.succ[q] = std::move(next);
    delta.changed.push_back(q);
  }
  std::sort(delta.changed.begin(), delta.changed.end());
  return delta;
}

SwUpdateResult sw_update(const Network& net, const KripkeStructure& k, SwitchId sw,
                         const Table& tbl) {
  SwUpdateResult r{apply_switch_update(net, sw, tbl), k, {}};
  r.delta = refresh_switch(r.k, r.net, sw);
  if (auto cyc = find_cycle_from(r.k, r.delta.changed)) {
    std::string msg = "update of switch " + std::to_string(sw) + " creates a loop:";
    for (StateId q : *cyc) msg += " " + state_name(r.k, q);
    throw LoopError(msg, *cyc);
  }
  return r;
}

SwUpdateResult sw_update(const Network& net, const KripkeStructure& k, const RuleDelta& delta) {
  const Switch* s = net.find_switch(delta.sw);
  if (!s) throw NetworkError("unknown switch " + std::to_string(delta.sw));
  return sw_update(net, k, delta.sw, apply_rule_delta(s->table, delta));
}

std::vector<StateId> ancestors(const KripkeStructure& k, const std::vector<StateId>& v) {
  std::vector<char> seen(k.size(), 0);
  std::vector<StateId> out, work;
  for (StateId q : v)
    if (!seen[q]) {
      seen[q] = 1;
      work.push_back(q);
    }
  while (!work.empty()) {
    StateId q = work.back();
    work.pop_back();
    out.push_back(q);
    for (StateId p : k.pred[q])
      if (!seen[p]) {
        seen[p] = 1;
        work.push_back(p);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<StateId> topo_order(const KripkeStructure& k, const std::vector<StateId>& subset) {
  std::vector<char> in(k.size(), 0);
  for (StateId q : subset) in[q] = 1;
  std::vector<std::uint32_t> indeg(k.size(), 0);
  for (StateId q : subset)
    for (StateId t : k.succ[q])
      if (t != q && in[t]) ++indeg[t];
  std::vector<StateId> order, ready;
  for (StateId q : subset)
    if (indeg[q] == 0) ready.push_back(q);
  while (!ready.empty()) {
    StateId q = ready.back();
    ready.pop_back();
    order.push_back(q);
    for (StateId t : k.succ[q])
      if (t != q && in[t] && --indeg[t] == 0) ready.push_back(t);
  }
  if (order.size() != subset.size()) {
    std::vector<StateId> left;
    for (StateId q : subset)
      if (indeg[q] > 0) left.push_back(q);
    auto cyc = dfs_cycle(k, left);
    throw LoopError("cycle in structure", cyc ? *cyc : left);
  }
  return order;
}

std::string state_name(const KripkeStructure& k, StateId q) {
  const KState& s = k.states[q];
  std::string cls = s.cls < k.classes.size() ? k.classes[s.cls].name : std::to_string(s.cls);
  switch (s.role) {
    case KState::Role::Ingress:
      return "s" + std::to_string(s.sw) + ":p" + std::to_string(s.port) + "/" + cls;
    case KState::Role::Egress:
      return "s" + std::to_string(s.sw) + ":p" + std::to_string(s.port) + "/" + cls + "/out";
    case KState::Role::Drop:
      return "s" + std::to_string(s.sw) + ":p" + std::to_string(s.port) + "/" + cls + "/drop";
    case KState::Role::Abstract:
      return "q" + std::to_string(q);
  }
  return "?";
}

std::string to_dot(const KripkeStructure& k) {
  std::ostringstream os;
  os << "digraph kripke {\n";
  std::set<StateId> init(k.initial.begin(), k.initial.end());
  for (StateId q = 0; q < k.size(); ++q) {
    os << "  q" << q << " [label=\"" << state_name(k, q) << "\"";
    if (init.count(q)) os << ", shape=doublecircle";
    else if (k.states[q].role == KState::Role::Drop) os << ", shape=box";
    os << "];\n";
  }
  for (StateId q = 0; q < k.size(); ++q)
    for (StateId t : k.succ[q]) os << "  q" << q << " -> q" << t << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace netupd
