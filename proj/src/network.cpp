#include "netupd/network.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace netupd {

std::optional<std::size_t> FieldSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

bool Pattern::matches(const Packet& pkt, PortId pt) const {
  if (in_port && *in_port != pt) return false;
  for (const auto& t : fields) {
    if (t.field >= pkt.fields.size() || pkt.fields[t.field] != t.value)
      return false;
  }
  return true;
}

bool canonical_less(const Rule& a, const Rule& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  if (a.pattern != b.pattern) return a.pattern < b.pattern;
  return a.actions < b.actions;
}

Table::Table(std::vector<Rule> rules) : rules_(std::move(rules)) {
  for (auto& r : rules_) std::sort(r.pattern.fields.begin(), r.pattern.fields.end());
  std::sort(rules_.begin(), rules_.end(), canonical_less);
  rules_.erase(std::unique(rules_.begin(), rules_.end()), rules_.end());
}

bool Table::contains(const Rule& r) const {
  return std::binary_search(rules_.begin(), rules_.end(), r, canonical_less);
}

std::optional<std::size_t> select_rule(const Table& tbl, const Packet& pkt,
                                       PortId pt) {
  // Rules are in canonical order, so the first match has the highest
  // priority and wins ties.
  const auto& rules = tbl.rules();
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (rules[i].pattern.matches(pkt, pt)) return i;
  return std::nullopt;
}

std::vector<PacketPort> lookup(const Table& tbl, const Packet& pkt, PortId pt) {
  std::vector<PacketPort> out;
  auto idx = select_rule(tbl, pkt, pt);
  if (!idx) return out;
  Packet cur = pkt;
  for (const auto& act : tbl.rules()[*idx].actions) {
    if (act.kind == Action::Kind::SetField) {
      if (act.field < cur.fields.size()) cur.fields[act.field] = act.value;
    } else {
      out.emplace_back(cur, act.port);
    }
  }
  return out;
}

std::string Location::to_string() const {
  if (is_host()) return "h" + std::to_string(id);
  return "s" + std::to_string(id) + ":p" + std::to_string(port);
}

Location Location::parse(const std::string& text) {
  auto fail = [&] { throw NetworkError("bad location '" + text + "'"); };
  if (text.size() < 2) fail();
  try {
    if (text[0] == 'h') {
      std::size_t used = 0;
      auto h = std::stoul(text.substr(1), &used);
      if (used + 1 != text.size()) fail();
      return host(static_cast<HostId>(h));
    }
    if (text[0] == 's') {
      auto colon = text.find(":p");
      if (colon == std::string::npos) fail();
      std::size_t used = 0;
      auto sw = std::stoul(text.substr(1, colon - 1), &used);
      if (used + 1 != colon) fail();
      auto rest = text.substr(colon + 2);
      auto pt = std::stoul(rest, &used);
      if (used != rest.size()) fail();
      return at(static_cast<SwitchId>(sw), static_cast<PortId>(pt));
    }
  } catch (const std::logic_error&) {
    fail();
  }
  fail();
  return {};
}

bool is_update(const Command& c) {
  return std::holds_alternative<SwitchUpdate>(c) ||
         std::holds_alternative<RuleUpdate>(c);
}

bool is_wait(const Command& c) { return std::holds_alternative<Wait>(c); }

SwitchId command_switch(const Command& c) {
  if (auto* u = std::get_if<SwitchUpdate>(&c)) return u->sw;
  if (auto* r = std::get_if<RuleUpdate>(&c)) return r->delta.sw;
  throw NetworkError("command is not an update");
}

std::string command_to_string(const Command& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SwitchUpdate>)
          return "upd s" + std::to_string(v.sw);
        else if constexpr (std::is_same_v<T, RuleUpdate>)
          return "upd-rule s" + std::to_string(v.delta.sw) + " (-" +
                 std::to_string(v.delta.removals.size()) + " +" +
                 std::to_string(v.delta.additions.size()) + ")";
        else if constexpr (std::is_same_v<T, Incr>)
          return "incr";
        else if constexpr (std::is_same_v<T, Flush>)
          return "flush";
        else
          return "wait";
      },
      c);
}

bool TrafficClass::contains(const Packet& pkt) const {
  for (const auto& t : constraint)
    if (t.field >= pkt.fields.size() || pkt.fields[t.field] != t.value) return false;
  return true;
}

std::optional<std::uint32_t> TrafficClass::fixed_value(std::size_t field) const {
  for (const auto& t : constraint)
    if (t.field == field) return t.value;
  return std::nullopt;
}

const Switch* Network::find_switch(SwitchId id) const {
  auto it = std::lower_bound(switches.begin(), switches.end(), id,
                             [](const Switch& s, SwitchId v) { return s.id < v; });
  if (it == switches.end() || it->id != id) return nullptr;
  return &*it;
}

Switch* Network::find_switch(SwitchId id) {
  return const_cast<Switch*>(std::as_const(*this).find_switch(id));
}

std::size_t Network::switch_index(SwitchId id) const {
  const Switch* s = find_switch(id);
  if (!s) throw NetworkError("unknown switch " + std::to_string(id));
  return static_cast<std::size_t>(s - switches.data());
}

const Link* Network::link_from(const Location& loc) const {
  for (const auto& l : links)
    if (l.from == loc) return &l;
  return nullptr;
}

const Link* Network::link_to(const Location& loc) const {
  for (const auto& l : links)
    if (l.to == loc) return &l;
  return nullptr;
}

bool Network::has_packets() const {
  for (const auto& s : switches)
    if (!s.buffered.empty()) return true;
  for (const auto& l : links)
    if (!l.packets.empty()) return true;
  return false;
}

bool Network::is_stable() const {
  std::optional<std::uint32_t> ep;
  auto same = [&](std::uint32_t e) {
    if (!ep) ep = e;
    return *ep == e;
  };
  for (const auto& s : switches)
    for (const auto& [p, pt] : s.buffered)
      if (!same(p.epoch)) return false;
  for (const auto& l : links)
    for (const auto& p : l.packets)
      if (!same(p.epoch)) return false;
  return true;
}

Network Network::configuration() const {
  Network n = *this;
  for (auto& s : n.switches) s.buffered.clear();
  for (auto& l : n.links) l.packets.clear();
  n.controller = Controller{};
  return n;
}

std::vector<std::pair<SwitchId, PortId>> Network::global_ports() const {
  std::set<std::pair<SwitchId, PortId>> ports;
  for (const auto& l : links) {
    if (!l.from.is_host()) ports.emplace(l.from.id, l.from.port);
    if (!l.to.is_host()) ports.emplace(l.to.id, l.to.port);
  }
  return {ports.begin(), ports.end()};
}

std::optional<std::uint32_t> Network::global_port_id(SwitchId sw, PortId pt) const {
  auto ports = global_ports();
  auto it = std::lower_bound(ports.begin(), ports.end(), std::make_pair(sw, pt));
  if (it == ports.end() || *it != std::make_pair(sw, pt)) return std::nullopt;
  return static_cast<std::uint32_t>(it - ports.begin());
}

void Network::sort_switches() {
  std::sort(switches.begin(), switches.end(),
            [](const Switch& a, const Switch& b) { return a.id < b.id; });
}

Network apply_switch_update(const Network& net, SwitchId sw, Table tbl) {
  Network out = net;
  Switch* s = out.find_switch(sw);
  if (!s) throw NetworkError("unknown switch " + std::to_string(sw));
  s->table = std::move(tbl);
  return out;
}

Table apply_rule_delta(const Table& tbl, const RuleDelta& delta) {
  std::vector<Rule> rules = tbl.rules();
  for (const auto& r : delta.removals) {
    auto it = std::find(rules.begin(), rules.end(), r);
    if (it != rules.end()) rules.erase(it);
  }
  for (const auto& r : delta.additions) rules.push_back(r);
  return Table(std::move(rules));
}

ConfigDiff config_diff(const Network& initial, const Network& final_net) {
  if (initial.switches.size() != final_net.switches.size())
    throw NetworkError("mismatched topologies: switch counts differ");
  ConfigDiff diff;
  for (std::size_t i = 0; i < initial.switches.size(); ++i) {
    const Switch& a = initial.switches[i];
    const Switch& b = final_net.switches[i];
    if (a.id != b.id)
      throw NetworkError("mismatched topologies: switch " + std::to_string(a.id) +
                         " vs " + std::to_string(b.id));
    if (a.table == b.table) continue;
    diff.updates.push_back({a.id, b.table});
    RuleDelta d{a.id, {}, {}};
    for (const auto& r : a.table.rules())
      if (!b.table.contains(r)) d.removals.push_back(r);
    for (const auto& r : b.table.rules())
      if (!a.table.contains(r)) d.additions.push_back(r);
    diff.deltas.push_back(std::move(d));
  }
  return diff;
}

std::vector<RuleDelta> rule_units(SwitchId sw, const Table& from, const Table& to) {
  std::vector<Rule> removed, added;
  for (const auto& r : from.rules())
    if (!to.contains(r)) removed.push_back(r);
  for (const auto& r : to.rules())
    if (!from.contains(r)) added.push_back(r);
  std::vector<RuleDelta> units;
  std::vector<bool> add_used(added.size(), false);
  for (const auto& r : removed) {
    RuleDelta u{sw, {r}, {}};
    for (std::size_t j = 0; j < added.size(); ++j) {
      if (!add_used[j] && added[j].priority == r.priority &&
          added[j].pattern == r.pattern) {
        add_used[j] = true;
        u.additions.push_back(added[j]);
        break;
      }
    }
    units.push_back(std::move(u));
  }
  for (std::size_t j = 0; j < added.size(); ++j)
    if (!add_used[j]) units.push_back(RuleDelta{sw, {}, {added[j]}});
  return units;
}

std::vector<std::string> validate_network(const Network& net) {
  std::vector<std::string> out;
  std::set<SwitchId> ids;
  for (const auto& s : net.switches)
    if (!ids.insert(s.id).second)
      out.push_back("duplicate id: switch " + std::to_string(s.id));
  std::set<HostId> hosts;
  for (auto h : net.hosts)
    if (!hosts.insert(h).second) out.push_back("duplicate id: host " + std::to_string(h));

  auto endpoint_ok = [&](const Location& loc) {
    return loc.is_host() ? hosts.count(loc.id) > 0 : ids.count(loc.id) > 0;
  };
  std::set<Location> froms, tos;
  for (const auto& l : net.links) {
    std::string name = l.from.to_string() + "->" + l.to.to_string();
    if (!endpoint_ok(l.from) || !endpoint_ok(l.to))
      out.push_back("dangling endpoint: link " + name);
    if (l.from == l.to) out.push_back("self link: " + name);
    if (l.from.is_host() && l.to.is_host())
      out.push_back("host-to-host link: " + name);
    if (!l.from.is_host() && !froms.insert(l.from).second)
      out.push_back("port used twice as link source: " + l.from.to_string());
    if (!l.to.is_host() && !tos.insert(l.to).second)
      out.push_back("port used twice as link target: " + l.to.to_string());
  }
  for (const auto& s : net.switches) {
    for (const auto& r : s.table.rules()) {
      for (const auto& t : r.pattern.fields)
        if (t.field >= net.fields.size())
          out.push_back("rule on switch " + std::to_string(s.id) + " tests unknown field");
      for (const auto& a : r.actions) {
        if (a.kind == Action::Kind::Forward && !froms.count(Location::at(s.id, a.port)))
          out.push_back("rule on switch " + std::to_string(s.id) +
                        " forwards to unlinked port " + std::to_string(a.port));
        if (a.kind == Action::Kind::SetField && a.field >= net.fields.size())
          out.push_back("rule on switch " + std::to_string(s.id) + " sets unknown field");
      }
    }
  }
  for (std::size_t i = 0; i < net.classes.size(); ++i) {
    for (const auto& t : net.classes[i].constraint)
      if (t.field >= net.fields.size() || t.value > net.fields.max_values[t.field])
        out.push_back("class " + net.classes[i].name + " constrains an undeclared value");
    for (std::size_t j = i + 1; j < net.classes.size(); ++j) {
      bool disjoint = false;
      for (const auto& t : net.classes[i].constraint) {
        auto v = net.classes[j].fixed_value(t.field);
        if (v && *v != t.value) disjoint = true;
      }
      if (!disjoint)
        out.push_back("classes " + net.classes[i].name + " and " +
                      net.classes[j].name + " overlap");
    }
  }
  std::uint32_t ep = net.controller.epoch;
  for (const auto& l : net.links)
    for (const auto& p : l.packets) {
      if (p.fields.size() != net.fields.size())
        out.push_back("packet with missing fields on link " + l.from.to_string());
      if (p.epoch > ep) out.push_back("packet epoch ahead of controller");
    }
  return out;
}

std::vector<Packet> class_representatives(const Network& net, const TrafficClass& cls) {
  const std::size_t nf = net.fields.size();
  std::vector<std::vector<std::uint32_t>> choices(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    if (auto v = cls.fixed_value(f)) {
      choices[f] = {*v};
      continue;
    }
    std::set<std::uint32_t> tested;
    for (const auto& s : net.switches)
      for (const auto& r : s.table.rules())
        for (const auto& t : r.pattern.fields)
          if (t.field == f) tested.insert(t.value);
    choices[f].assign(tested.begin(), tested.end());
    for (std::uint32_t v = 0; v <= net.fields.max_values[f]; ++v) {
      if (!tested.count(v)) {
        choices[f].push_back(v);
        break;
      }
    }
  }
  std::vector<Packet> out;
  Packet cur;
  cur.fields.assign(nf, 0);
  constexpr std::size_t kCap = 4096;
  auto rec = [&](auto&& self, std::size_t f) -> void {
    if (out.size() >= kCap) return;
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
  if (out.size() >= kCap)
    throw NetworkError("traffic class " + cls.name + " has too many distinguishable packets");
  return out;
}

std::optional<std::size_t> class_of(const std::vector<TrafficClass>& classes,
                                    const Packet& pkt) {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].contains(pkt)) return i;
  return std::nullopt;
}

}  // namespace netupd
