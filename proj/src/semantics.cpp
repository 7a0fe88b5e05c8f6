#include "netupd/semantics.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "netupd/kripke.hpp"

namespace netupd {

std::string to_string(StepKind k) {
  switch (k) {
    case StepKind::In: return "In";
    case StepKind::Out: return "Out";
    case StepKind::Process: return "Process";
    case StepKind::Forward: return "Forward";
    case StepKind::Update: return "Update";
    case StepKind::Incr: return "Incr";
    case StepKind::Flush: return "Flush";
  }
  return "?";
}

std::vector<ltl::Position> SinglePacketTrace::positions(
    const std::vector<TrafficClass>& classes) const {
  std::vector<ltl::Position> out;
  for (const auto& o : obs) {
    auto c = class_of(classes, o.pkt);
    out.push_back({o.sw, o.pt, c ? static_cast<std::uint32_t>(*c)
                                 : static_cast<std::uint32_t>(classes.size()),
                   false, 0});
  }
  if (dropped && !out.empty()) {
    auto last = out.back();
    last.dropped = true;
    out.push_back(last);
  }
  return out;
}

std::vector<Packet> ingress_packets(const Network& net) {
  std::vector<Packet> out;
  for (const auto& c : effective_classes(net)) {
    auto reps = class_representatives(net, c);
    out.insert(out.end(), reps.begin(), reps.end());
  }
  return out;
}

Network apply_command(const Network& net, const Command& c) {
  if (auto* u = std::get_if<SwitchUpdate>(&c)) return apply_switch_update(net, u->sw, u->table);
  if (auto* r = std::get_if<RuleUpdate>(&c)) {
    const Switch* s = net.find_switch(r->delta.sw);
    if (!s) throw NetworkError("unknown switch " + std::to_string(r->delta.sw));
    return apply_switch_update(net, r->delta.sw, apply_rule_delta(s->table, r->delta));
  }
  return net;
}

SimState make_sim_state(const Network& net, const std::vector<Command>& cmds) {
  SimState s;
  s.net = net;
  s.net.controller.cmds.clear();
  for (const auto& c : cmds) {
    if (is_wait(c)) {
      s.net.controller.cmds.push_back(Incr{});
      s.net.controller.cmds.push_back(Flush{});
    } else {
      s.net.controller.cmds.push_back(c);
    }
  }
  return s;
}

namespace {

std::optional<std::uint32_t> min_epoch(const Network& net) {
  std::optional<std::uint32_t> m;
  auto see = [&](std::uint32_t e) { m = m ? std::min(*m, e) : e; };
  for (const auto& s : net.switches)
    for (const auto& pr : s.buffered) see(pr.first.epoch);
  for (const auto& l : net.links)
    for (const auto& p : l.packets) see(p.epoch);
  return m;
}

std::optional<std::size_t> link_index_from(const Network& net, const Location& loc) {
  for (std::size_t i = 0; i < net.links.size(); ++i)
    if (net.links[i].from == loc) return i;
  return std::nullopt;
}

}  // namespace

std::vector<StepChoice> enabled_steps(const SimState& s, const std::vector<Packet>& universe,
                                      bool allow_in) {
  std::vector<StepChoice> out;
  const Network& net = s.net;
  for (std::size_t i = 0; i < net.links.size(); ++i) {
    const Link& l = net.links[i];
    if (allow_in && l.from.is_host() && !l.to.is_host())
      for (std::size_t j = 0; j < universe.size(); ++j) out.push_back({StepKind::In, i, j});
    if (l.packets.empty()) continue;
    if (!l.from.is_host() && l.to.is_host()) out.push_back({StepKind::Out, i, 0});
    if (!l.to.is_host()) out.push_back({StepKind::Process, i, 0});
  }
  for (std::size_t i = 0; i < net.switches.size(); ++i)
    for (std::size_t j = 0; j < net.switches[i].buffered.size(); ++j)
      out.push_back({StepKind::Forward, i, j});
  if (!net.controller.cmds.empty()) {
    const Command& head = net.controller.cmds.front();
    if (is_update(head)) {
      out.push_back({StepKind::Update, 0, 0});
    } else if (std::holds_alternative<Incr>(head)) {
      out.push_back({StepKind::Incr, 0, 0});
    } else if (std::holds_alternative<Flush>(head)) {
      auto m = min_epoch(net);
      if (!m || *m >= net.controller.epoch) out.push_back({StepKind::Flush, 0, 0});
    }
  }
  return out;
}

void apply_step(SimState& s, const StepChoice& c, const std::vector<Packet>& universe) {
  Network& net = s.net;
  LogEntry e;
  e.kind = c.kind;
  switch (c.kind) {
    case StepKind::In: {
      Packet p = universe.at(c.item);
      p.epoch = net.controller.epoch;
      p.tag = s.next_tag++;
      e.tag = p.tag;
      net.links.at(c.element).packets.push_back(p);
      break;
    }
    case StepKind::Out: {
      Link& l = net.links.at(c.element);
      Packet p = l.packets.front();
      l.packets.pop_front();
      e.tag = p.tag;
      e.obs = Observation{l.from.id, l.from.port, p};
      break;
    }
    case StepKind::Process: {
      Link& l = net.links.at(c.element);
      Packet p = l.packets.front();
      l.packets.pop_front();
      Switch& sw = net.switches.at(net.switch_index(l.to.id));
      e.tag = p.tag;
      e.obs = Observation{l.to.id, l.to.port, p};
      for (auto [q, pt] : lookup(sw.table, p, l.to.port)) {
        q.epoch = p.epoch;
        q.tag = s.next_tag++;
        e.children.push_back(q.tag);
        sw.buffered.emplace_back(q, pt);
      }
      break;
    }
    case StepKind::Forward: {
      Switch& sw = net.switches.at(c.element);
      auto [p, pt] = sw.buffered.at(c.item);
      sw.buffered.erase(sw.buffered.begin() + static_cast<std::ptrdiff_t>(c.item));
      e.tag = p.tag;
      if (auto li = link_index_from(net, Location::at(sw.id, pt)))
        net.links[*li].packets.push_back(p);
      else
        e.discarded = true;
      break;
    }
    case StepKind::Update: {
      Command head = net.controller.cmds.front();
      net.controller.cmds.erase(net.controller.cmds.begin());
      Controller ctl = std::move(net.controller);
      net = apply_command(net, head);
      net.controller = std::move(ctl);
      break;
    }
    case StepKind::Incr:
      net.controller.cmds.erase(net.controller.cmds.begin());
      ++net.controller.epoch;
      break;
    case StepKind::Flush:
      net.controller.cmds.erase(net.controller.cmds.begin());
      break;
  }
  s.log.push_back(std::move(e));
}

std::vector<std::pair<StepKind, SimState>> enumerate_steps(const SimState& s) {
  auto universe = ingress_packets(s.net);
  std::vector<std::pair<StepKind, SimState>> out;
  for (const auto& c : enabled_steps(s, universe, true)) {
    SimState next = s;
    apply_step(next, c, universe);
    out.emplace_back(c.kind, std::move(next));
  }
  return out;
}

std::vector<SinglePacketTrace> traces_from_log(const std::vector<LogEntry>& log) {
  std::map<std::uint64_t, std::uint64_t> parent;
  std::map<std::uint64_t, Observation> processed;
  std::map<std::uint64_t, std::size_t> alive;  // linked outputs per processed tag
  std::map<std::uint64_t, std::uint64_t> child_parent;
  for (const auto& e : log) {
    if (e.kind == StepKind::Process && e.obs) {
      processed[e.tag] = *e.obs;
      alive[e.tag] = e.children.size();
      for (auto c : e.children) parent[c] = e.tag;
    }
  }
  auto chain = [&](std::uint64_t tag) {
    std::vector<Observation> obs;
    for (std::optional<std::uint64_t> t = tag; t;) {
      obs.push_back(processed.at(*t));
      auto it = parent.find(*t);
      t = it == parent.end() ? std::nullopt : std::optional<std::uint64_t>(it->second);
    }
    std::reverse(obs.begin(), obs.end());
    return obs;
  };
  std::vector<SinglePacketTrace> out;
  for (const auto& e : log) {
    if (e.kind == StepKind::Forward && e.discarded) {
      auto it = parent.find(e.tag);
      if (it != parent.end() && --alive[it->second] == 0) out.push_back({chain(it->second), true});
    } else if (e.kind == StepKind::Process && e.children.empty()) {
      out.push_back({chain(e.tag), true});
    } else if (e.kind == StepKind::Out && e.obs) {
      SinglePacketTrace t;
      auto it = parent.find(e.tag);
      if (it != parent.end()) t.obs = chain(it->second);
      t.obs.push_back(*e.obs);
      out.push_back(std::move(t));
    }
  }
  return out;
}

SimResult run_commands(const Network& net, const std::vector<Command>& cmds,
                       const SimOptions& opts) {
  SimResult r;
  r.state = make_sim_state(net, cmds);
  auto universe = ingress_packets(net);
  std::mt19937_64 rng(opts.seed);
  std::size_t injected = 0;
  while (true) {
    auto choices = enabled_steps(r.state, universe, injected < opts.inject);
    if (choices.empty()) break;
    if (r.steps >= opts.max_steps)
      throw SimError("step bound of " + std::to_string(opts.max_steps) +
                     " exceeded (forwarding loop or livelock)");
    std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
    const StepChoice c = choices[pick(rng)];
    if (c.kind == StepKind::In) ++injected;
    apply_step(r.state, c, universe);
    ++r.steps;
  }
  if (!r.state.net.controller.cmds.empty())
    throw SimError("controller blocked with commands remaining");
  r.traces = traces_from_log(r.state.log);
  return r;
}

namespace {

std::string packet_key(const Packet& p) {
  std::string k;
  for (auto v : p.fields) k += std::to_string(v) + ",";
  k += "e" + std::to_string(p.epoch);
  return k;
}

std::string obs_key(const Observation& o) {
  return std::to_string(o.sw) + ":" + std::to_string(o.pt) + "/" + packet_key(o.pkt);
}

std::string trace_key(const SinglePacketTrace& t) {
  std::string k;
  for (const auto& o : t.obs) k += obs_key(o) + ";";
  if (t.dropped) k += "drop";
  return k;
}

struct XState {
  SimState sim;
  std::map<std::uint64_t, std::vector<Observation>> hist;
  std::size_t injected = 0;
};

std::string xstate_key(const XState& x) {
  std::ostringstream os;
  const Network& net = x.sim.net;
  os << net.controller.cmds.size() << "|" << net.controller.epoch << "|" << x.injected << "|";
  auto hist_of = [&](const Packet& p) {
    std::string h;
    auto it = x.hist.find(p.tag);
    if (it != x.hist.end())
      for (const auto& o : it->second) h += obs_key(o) + ";";
    return h;
  };
  for (const auto& l : net.links) {
    os << "L";
    for (const auto& p : l.packets) os << "[" << packet_key(p) << "#" << hist_of(p) << "]";
  }
  for (const auto& s : net.switches) {
    std::vector<std::string> items;
    for (const auto& [p, pt] : s.buffered)
      items.push_back(packet_key(p) + "@" + std::to_string(pt) + "#" + hist_of(p));
    std::sort(items.begin(), items.end());
    os << "S";
    for (const auto& i : items) os << "[" << i << "]";
  }
  return os.str();
}

}  // namespace

ExploreResult explore_adversarial(const Network& net, const std::vector<Command>& cmds,
                                  std::size_t max_packets, std::size_t max_states) {
  ExploreResult res;
  auto universe = ingress_packets(net);
  std::set<std::string> seen_traces;
  std::unordered_set<std::string> seen;
  std::vector<XState> stack;
  XState init;
  init.sim = make_sim_state(net, cmds);
  seen.insert(xstate_key(init));
  stack.push_back(std::move(init));
  auto emit = [&](SinglePacketTrace t) {
    if (seen_traces.insert(trace_key(t)).second) res.traces.push_back(std::move(t));
  };
  while (!stack.empty()) {
    XState x = std::move(stack.back());
    stack.pop_back();
    ++res.states;
    for (const auto& c : enabled_steps(x.sim, universe, x.injected < max_packets)) {
      XState y = x;
      y.sim.log.clear();
      apply_step(y.sim, c, universe);
      const LogEntry& e = y.sim.log.back();
      if (c.kind == StepKind::In) {
        ++y.injected;
        y.hist[e.tag] = {};
      } else if (c.kind == StepKind::Process) {
        auto h = y.hist[e.tag];
        h.push_back(*e.obs);
        y.hist.erase(e.tag);
        std::size_t linked = 0;
        const Switch& sw = y.sim.net.switches[y.sim.net.switch_index(e.obs->sw)];
        for (const auto& [p, pt] : sw.buffered) {
          if (std::find(e.children.begin(), e.children.end(), p.tag) == e.children.end()) continue;
          if (y.sim.net.link_from(Location::at(sw.id, pt))) {
            ++linked;
            y.hist[p.tag] = h;
          }
        }
        if (linked == 0) emit({h, true});
      } else if (c.kind == StepKind::Out) {
        auto h = y.hist[e.tag];
        h.push_back(*e.obs);
        y.hist.erase(e.tag);
        emit({h, false});
      } else if (c.kind == StepKind::Forward && e.discarded) {
        y.hist.erase(e.tag);
      }
      y.sim.log.clear();
      if (seen.insert(xstate_key(y)).second) {
        if (seen.size() > max_states) {
          res.truncated = true;
          return res;
        }
        stack.push_back(std::move(y));
      }
    }
  }
  return res;
}

std::vector<SinglePacketTrace> single_packet_traces(const Network& net, std::size_t bound) {
  if (!net.is_static()) throw SimError("single_packet_traces needs a static network");
  if (bound == 0) bound = 2 * net.switches.size() + 2;
  auto universe = ingress_packets(net);
  std::vector<SinglePacketTrace> out;
  struct Frame {
    SwitchId sw;
    PortId pt;
    Packet pkt;
    std::vector<Observation> obs;
  };
  for (const auto& l : net.links) {
    if (!l.from.is_host() || l.to.is_host()) continue;
    for (const auto& p : universe) {
      std::vector<Frame> work{{l.to.id, l.to.port, p, {}}};
      while (!work.empty()) {
        Frame f = std::move(work.back());
        work.pop_back();
        f.obs.push_back({f.sw, f.pt, f.pkt});
        if (f.obs.size() > bound)
          throw TraceLoopError("forwarding loop: trace exceeds " + std::to_string(bound) +
                                   " observations",
                               {f.obs, false});
        const Switch* s = net.find_switch(f.sw);
        if (!s) throw NetworkError("unknown switch " + std::to_string(f.sw));
        std::size_t linked = 0;
        for (const auto& [q, pt] : lookup(s->table, f.pkt, f.pt)) {
          const Link* nl = net.link_from(Location::at(f.sw, pt));
          if (!nl) continue;
          ++linked;
          if (nl->to.is_host()) {
            auto obs = f.obs;
            obs.push_back({f.sw, pt, q});
            out.push_back({std::move(obs), false});
          } else {
            work.push_back({nl->to.id, nl->to.port, q, f.obs});
          }
        }
        if (linked == 0) out.push_back({f.obs, true});
      }
    }
  }
  return out;
}

bool is_careful(const std::vector<Command>& cmds) {
  bool pending = false;  // an update not yet followed by a barrier
  bool incr = false;
  for (const auto& c : cmds) {
    if (is_update(c)) {
      if (pending) return false;
      pending = true;
    } else if (is_wait(c)) {
      pending = false;
      incr = false;
    } else if (std::holds_alternative<Incr>(c)) {
      incr = true;
    } else if (std::holds_alternative<Flush>(c) && incr) {
      pending = false;
      incr = false;
    }
  }
  return true;
}

bool is_simple(const std::vector<Command>& cmds) {
  std::set<SwitchId> seen;
  for (const auto& c : cmds)
    if (std::holds_alternative<SwitchUpdate>(c) && !seen.insert(command_switch(c)).second)
      return false;
  return true;
}

std::vector<Command> make_careful(const std::vector<Command>& cmds) {
  std::vector<Command> out;
  bool pending = false;
  for (const auto& c : cmds) {
    if (is_update(c)) {
      if (pending) out.push_back(Wait{});
      pending = true;
    } else if (is_wait(c) || std::holds_alternative<Flush>(c)) {
      pending = false;
    }
    out.push_back(c);
  }
  return out;
}

namespace {

bool check_trace(const SinglePacketTrace& t, const ltl::FormulaPtr& phi,
                 const std::vector<TrafficClass>& classes, const FieldSchema& fields) {
  return ltl::eval_finite(t.positions(classes), phi, classes, fields);
}

}  // namespace

OracleVerdict oracle_verify(const Network& n_i, const std::vector<Command>& cmds,
                            const ltl::FormulaPtr& phi) {
  if (!is_careful(cmds)) throw SimError("oracle_verify needs a careful command sequence");
  OracleVerdict v;
  Network cur = n_i.configuration();
  auto classes = effective_classes(cur);
  ltl::check_decidable(phi, classes, cur.fields);
  std::vector<Network> configs{cur};
  for (const auto& c : cmds)
    if (is_update(c)) configs.push_back(apply_command(configs.back(), c));
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::vector<SinglePacketTrace> traces;
    try {
      traces = single_packet_traces(configs[i]);
    } catch (const TraceLoopError& e) {
      v.ok = false;
      v.loop = true;
      v.config_index = i + 1;
      v.trace = e.trace;
      v.message = e.what();
      return v;
    }
    for (const auto& t : traces) {
      ++v.traces_checked;
      if (!check_trace(t, phi, classes, cur.fields)) {
        v.ok = false;
        v.config_index = i + 1;
        v.trace = t;
        v.message = "configuration " + std::to_string(i + 1) + " violates the property";
        return v;
      }
    }
  }
  return v;
}

OracleVerdict oracle_verify_windowed(const Network& n_i, const std::vector<Command>& cmds,
                                     const ltl::FormulaPtr& phi, std::size_t max_traces) {
  OracleVerdict v;
  Network start = n_i.configuration();
  auto classes = effective_classes(start);
  ltl::check_decidable(phi, classes, start.fields);
  auto universe = ingress_packets(start);
  const std::size_t bound = 2 * start.switches.size() + 2;

  // Split into windows at barriers.
  std::vector<std::vector<Command>> windows(1);
  bool incr = false;
  for (const auto& c : cmds) {
    if (is_wait(c) || (std::holds_alternative<Flush>(c) && incr)) {
      windows.emplace_back();
      incr = false;
    } else if (std::holds_alternative<Incr>(c)) {
      incr = true;
    } else if (is_update(c)) {
      windows.back().push_back(c);
    }
  }

  for (std::size_t w = 0; w < windows.size(); ++w) {
    std::vector<Network> configs{start};
    for (const auto& c : windows[w]) configs.push_back(apply_command(configs.back(), c));
    // Change points of each switch's table within the window.
    std::map<SwitchId, std::vector<std::size_t>> changes;
    for (std::size_t i = 0; i < windows[w].size(); ++i)
      changes[command_switch(windows[w][i])].push_back(i + 1);

    struct Frame {
      SwitchId sw;
      PortId pt;
      Packet pkt;
      std::size_t time;
      std::vector<Observation> obs;
    };
    auto fail = [&](SinglePacketTrace t, bool loop, const std::string& msg) {
      v.ok = false;
      v.loop = loop;
      v.config_index = w + 1;
      v.trace = std::move(t);
      v.message = msg;
    };
    for (const auto& l : start.links) {
      if (!l.from.is_host() || l.to.is_host()) continue;
      for (const auto& p : universe) {
        std::vector<Frame> work{{l.to.id, l.to.port, p, 0, {}}};
        while (!work.empty()) {
          Frame f = std::move(work.back());
          work.pop_back();
          f.obs.push_back({f.sw, f.pt, f.pkt});
          bool repeat = false;
          for (std::size_t i = 0; i + 1 < f.obs.size(); ++i)
            if (f.obs[i].sw == f.sw && f.obs[i].pt == f.pt) repeat = true;
          if (repeat || f.obs.size() > bound) {
            fail({f.obs, false}, true, "forwarding loop in window " + std::to_string(w + 1));
            return v;
          }
          std::vector<std::size_t> times{f.time};
          auto it = changes.find(f.sw);
          if (it != changes.end())
            for (auto t : it->second)
              if (t > f.time) times.push_back(t);
          for (auto t : times) {
            const Switch* s = configs[t].find_switch(f.sw);
            std::size_t linked = 0;
            for (const auto& [q, pt] : lookup(s->table, f.pkt, f.pt)) {
              const Link* nl = start.link_from(Location::at(f.sw, pt));
              if (!nl) continue;
              ++linked;
              if (nl->to.is_host()) {
                auto obs = f.obs;
                obs.push_back({f.sw, pt, q});
                SinglePacketTrace tr{std::move(obs), false};
                if (++v.traces_checked > max_traces)
                  throw SimError("windowed verification exceeded its trace budget");
                if (!check_trace(tr, phi, classes, start.fields)) {
                  fail(std::move(tr), false,
                       "window " + std::to_string(w + 1) + " admits a violating trace");
                  return v;
                }
              } else {
                work.push_back({nl->to.id, nl->to.port, q, t, f.obs});
              }
            }
            if (linked == 0) {
              SinglePacketTrace tr{f.obs, true};
              ++v.traces_checked;
              if (!check_trace(tr, phi, classes, start.fields)) {
                fail(std::move(tr), false,
                     "window " + std::to_string(w + 1) + " admits a violating trace");
                return v;
              }
            }
          }
        }
      }
    }
    start = configs.back();
  }
  return v;
}

}  // namespace netupd
