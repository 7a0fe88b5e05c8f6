#include <set>

#include "doctest.h"
#include "netupd/scenario.hpp"
#include "netupd/semantics.hpp"
#include "oracles.hpp"

using namespace netupd;
using namespace netupd::example;

namespace {

Command sw_upd(const Network& target, SwitchId s) {
  return SwitchUpdate{s, target.find_switch(s)->table};
}

std::vector<SwitchId> switch_path(const SinglePacketTrace& t) {
  std::vector<SwitchId> out;
  for (const auto& o : t.obs)
    if (out.empty() || out.back() != o.sw) out.push_back(o.sw);
  return out;
}

bool holds(const Network& net, const SinglePacketTrace& t, const ltl::FormulaPtr& phi) {
  auto classes = effective_classes(net);
  return oracle::eval(phi, t.positions(classes), 0, classes, net.fields);
}

SinglePacketTrace no_epoch(SinglePacketTrace t) {
  for (auto& o : t.obs) o.pkt.epoch = 0;
  return t;
}

}  // namespace

TEST_CASE("static traces of the worked example") {
  Network red = red_config();
  auto ts = single_packet_traces(red);
  CHECK(ts.size() == 4);
  std::size_t delivered = 0;
  for (const auto& t : ts) {
    REQUIRE(!t.obs.empty());
    if (t.obs.front().sw == T1) {
      CHECK(switch_path(t) == std::vector<SwitchId>{T1, A1, C1, A3, T3});
      CHECK_FALSE(t.dropped);
      ++delivered;
    }
    if (t.obs.front().sw == T2) CHECK(t.dropped);
  }
  CHECK(delivered == 1);
  auto phi = reachability(red);
  for (const auto& t : ts) CHECK(holds(red, t, phi));
}

TEST_CASE("looping configurations raise a trace loop") {
  Network net = red_config();
  Rule r;
  r.priority = 5;
  r.pattern.fields = {{0, 3}};
  r.actions = {Action::forward(*port_toward(net, C1, A1))};
  net = apply_switch_update(net, C1, Table({r}));
  CHECK_THROWS_AS(single_packet_traces(net), TraceLoopError);
  CHECK_FALSE(oracle::config_ok_by_traces(net, reachability(net)));
}

TEST_CASE("carefulness") {
  Network g = green_config();
  std::vector<Command> a{sw_upd(g, C2), Wait{}, sw_upd(g, A1)};
  std::vector<Command> b{sw_upd(g, C2), sw_upd(g, A1)};
  std::vector<Command> c{sw_upd(g, C2), Incr{}, Flush{}, sw_upd(g, A1)};
  CHECK(is_careful(a));
  CHECK_FALSE(is_careful(b));
  CHECK(is_careful(c));
  CHECK(is_careful(make_careful(b)));
  CHECK(make_careful(b).size() == 3);
  CHECK(is_simple(a));
  CHECK_FALSE(is_simple({sw_upd(g, C2), Wait{}, sw_upd(g, C2)}));
}

TEST_CASE("oracle verdicts on the worked example") {
  Network red = red_config(), green = green_config();
  auto phi = reachability(red);
  auto good = oracle_verify(red, {sw_upd(green, C2), Wait{}, sw_upd(green, A1)}, phi);
  CHECK(good.ok);
  CHECK(good.traces_checked == 12);
  auto bad = oracle_verify(red, {sw_upd(green, A1), Wait{}, sw_upd(green, C2)}, phi);
  CHECK_FALSE(bad.ok);
  CHECK(bad.config_index == 2);
  CHECK(bad.trace.dropped);
  CHECK_THROWS_AS(oracle_verify(red, {sw_upd(green, C2), sw_upd(green, A1)}, phi), SimError);
}

TEST_CASE("windowed verdicts mix configurations inside a window") {
  Network red = red_config(), green = green_config();
  auto phi = reachability(red);
  CHECK(oracle_verify_windowed(red, {sw_upd(green, C2), sw_upd(green, A1)}, phi).ok);
  auto v = oracle_verify_windowed(red, {sw_upd(green, A1), sw_upd(green, C2)}, phi);
  CHECK_FALSE(v.ok);
  CHECK(v.trace.dropped);
  // A wait after the first update makes the sequence careful and the same
  // verdict as the per-configuration oracle.
  CHECK(oracle_verify_windowed(red, {sw_upd(green, C2), Wait{}, sw_upd(green, A1)}, phi).ok ==
        oracle_verify(red, {sw_upd(green, C2), Wait{}, sw_upd(green, A1)}, phi).ok);
}

TEST_CASE("random runs of careful sequences only show induced-configuration traces") {
  Network red = red_config(), green = green_config();
  std::vector<Command> cmds{sw_upd(green, C2), Wait{}, sw_upd(green, A1)};
  std::vector<SinglePacketTrace> allowed;
  Network cur = red;
  for (auto& t : single_packet_traces(cur)) allowed.push_back(t);
  for (const auto& c : cmds) {
    if (!is_update(c)) continue;
    cur = apply_command(cur, c);
    for (auto& t : single_packet_traces(cur)) allowed.push_back(t);
  }
  auto phi = reachability(red);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SimOptions o;
    o.seed = seed;
    o.inject = 8;
    auto r = run_commands(red, cmds, o);
    CHECK(r.state.net.controller.cmds.empty());
    CHECK(config_diff(r.state.net.configuration(), green).updates.empty());
    for (const auto& t : r.traces) {
      CHECK(std::find(allowed.begin(), allowed.end(), no_epoch(t)) != allowed.end());
      CHECK(holds(red, t, phi));
    }
  }
}

TEST_CASE("adversarial exploration") {
  Network red = red_config(), green = green_config();
  auto phi = reachability(red);
  auto unsafe = explore_adversarial(red, {sw_upd(green, A1), sw_upd(green, C2)}, 1);
  CHECK_FALSE(unsafe.truncated);
  bool violated = false;
  for (const auto& t : unsafe.traces) violated = violated || !holds(red, t, phi);
  CHECK(violated);

  auto safe = explore_adversarial(red, {sw_upd(green, C2), Wait{}, sw_upd(green, A1)}, 2);
  CHECK_FALSE(safe.truncated);
  CHECK(safe.states > 0);
  for (const auto& t : safe.traces) CHECK(holds(red, t, phi));
  bool old_path = false, new_path = false;
  for (const auto& t : safe.traces) {
    auto p = switch_path(t);
    old_path = old_path || p == std::vector<SwitchId>{T1, A1, C1, A3, T3};
    new_path = new_path || p == std::vector<SwitchId>{T1, A1, C2, A3, T3};
  }
  CHECK(old_path);
  CHECK(new_path);
}

TEST_CASE("enumerate_steps respects the controller barrier") {
  Network red = red_config(), green = green_config();
  SimState s = make_sim_state(red, {sw_upd(green, C2), Wait{}, sw_upd(green, A1)});
  auto steps = enumerate_steps(s);
  bool has_update = false;
  for (auto& [k, next] : steps) has_update = has_update || k == StepKind::Update;
  CHECK(has_update);
  CHECK_THROWS_AS(run_commands(red, {Wait{}}, SimOptions{0, 0, 0}), SimError);
}
