// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "gen.hpp"
#include "netupd/checker.hpp"
#include "netupd/scenario.hpp"
#include "netupd/semantics.hpp"
#include "netupd/synth.hpp"
#include "netupd/waitrm.hpp"
#include "oracles.hpp"

using namespace netupd;
using namespace netupd::example;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Command upd(const Network& target, SwitchId s) { return SwitchUpdate{s, target.find_switch(s)->table}; }

std::vector<SwitchId> update_switches(const std::vector<Command>& cmds) {
  std::vector<SwitchId> out;
  for (const auto& c : cmds)
    if (is_update(c)) out.push_back(command_switch(c));
  return out;
}

std::size_t position(const std::vector<SwitchId>& v, SwitchId s) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
}

void c1(Outcome& o) {
  auto t0 = Clock::now();
  Network red = red_config(), green = green_config();
  auto phi = reachability(red);
  auto r = order_update(red, green, phi);
  o.require(r.ok, "no sequence for red to green");
  auto sw = update_switches(r.cmds);
  o.require(sw.size() == 2 && position(sw, C2) < position(sw, A1), "C2 not before A1");
  o.require(oracle_verify(red, r.cmds, phi).ok, "oracle rejects the sequence");

  auto rev = oracle_verify(red, {upd(green, A1), Wait{}, upd(green, C2)}, phi);
  o.require(!rev.ok && rev.config_index == 2, "reversed order not rejected at its first step");
  auto plan = make_plan(red, green, Granularity::Switch);
  std::vector<char> applied(plan.units.size(), 0);
  applied[plan.units_of(A1).at(0)] = 1;
  auto k = build_kripke(plan.config(applied));
  auto cr = Checker(phi).model_check(k);
  o.require(!cr.ok && !cr.counterexample.empty(), "no counterexample for A1 first");
  if (!cr.ok) {
    Cube cube = make_cex_formula(plan, k, cr.counterexample, applied);
    Cube want;
    want.lits = {{plan.units_of(A1).at(0), true}, {plan.units_of(C2).at(0), false}};
    std::sort(want.lits.begin(), want.lits.end());
    o.require(cube == want, "W-cube is not {A1:updated, C2:not-updated}");
  }
  double s = since(t0);
  o.require(s < 1.0, "runtime " + std::to_string(s) + "s");
  o.detail << (o.pass ? " C2 before A1, reversed order cube {A1:1, C2:0}, " : " ") << s << "s";
}

void c2(Outcome& o) {
  auto t0 = Clock::now();
  Network red = red_config(), blue = blue_config();
  auto phi = reachability_and_waypoint(red);
  std::vector<Command> expected{upd(blue, A2), upd(blue, A4), upd(blue, T1), Wait{}, upd(blue, C1)};
  o.require(oracle_verify_windowed(red, expected, phi).ok, "stated sequence rejected");
  auto r = order_update(red, blue, phi);
  o.require(r.ok, "no sequence for red to blue");
  o.require(oracle_verify(red, r.cmds, phi).ok, "oracle rejects the synthesized sequence");
  auto w = remove_waits(red, r.cmds, phi);
  o.require(!w.fallback, "wait removal fell back");
  o.require(oracle_verify_windowed(red, w.cmds, phi).ok, "oracle rejects the wait-reduced sequence");
  o.require(w.retained <= 2, std::to_string(w.retained) + " waits retained");
  double s = since(t0);
  o.require(s < 5.0, "runtime " + std::to_string(s) + "s");
  o.detail << " retained " << w.retained << " wait(s), sequence";
  for (const auto& c : w.cmds) o.detail << ' ' << (is_wait(c) ? std::string("wait") : red.find_switch(command_switch(c))->name);
  o.detail << ", " << s << "s";
}

void c3(Outcome& o) {
  std::size_t compared = 0, mismatches = 0, excess = 0, runs = 0;
  std::size_t per_kind[3] = {0, 0, 0};
  const ltl::PropertyKind kinds[] = {ltl::PropertyKind::Reachability, ltl::PropertyKind::Waypoint,
                                     ltl::PropertyKind::ServiceChain};
  for (std::uint64_t seed = 0; seed < 200 && (compared < 1200 || runs < 30); ++seed) {
    for (int ki = 0; ki < 3; ++ki) {
      DiamondOptions d;
      d.kind = kinds[ki];
      d.seed = seed;
      d.pairs = 1 + seed % 3;
      d.double_diamond = seed % 7 == 3;
      std::size_t n = 20 + 10 * (seed % 4);
      Scenario sc;
      try {
        sc = gen_diamond_scenario(gen_smallworld(n, 4, 0.1, seed), d);
      } catch (const TopologyError&) {
        continue;
      }
      SynthOptions opt;
      opt.debug_check = true;
      opt.granularity = seed % 2 ? Granularity::Rule : Granularity::Switch;
      opt.timeout_seconds = 20;
      auto r = order_update(sc.initial, sc.final_net, sc.phi, opt);
      ++runs;
      compared += r.stats.debug_compared;
      per_kind[ki] += r.stats.debug_compared;
      mismatches += r.stats.debug_mismatches;
      excess += r.stats.debug_relabel_excess;
    }
  }
  o.require(compared >= 1000, "only " + std::to_string(compared) + " comparisons");
  o.require(per_kind[0] && per_kind[1] && per_kind[2], "a property kind was not exercised");
  o.require(mismatches == 0, std::to_string(mismatches) + " verdict mismatches");
  o.require(excess == 0, std::to_string(excess) + " calls relabeled more than the ancestors");
  o.detail << " " << compared << " incremental calls over " << runs << " runs (" << per_kind[0] << '/'
           << per_kind[1] << '/' << per_kind[2] << " by kind), " << mismatches << " mismatches, " << excess
           << " over-relabels";
}

void c4(Outcome& o) {
  auto t0 = Clock::now();
  std::size_t instances = 0, agree = 0, solvable = 0, member = 0, members_needed = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    for (int ki = 0; ki < 3; ++ki) {
      Scenario sc;
      if (!testgen::small_diamond(seed, static_cast<ltl::PropertyKind>(ki), 2, 6, sc, 14, seed % 6 == 0))
        continue;
      auto plan = make_plan(sc.initial, sc.final_net, Granularity::Switch);
      auto truth = oracle::enumerate_orders(plan, sc.phi);
      auto r = order_update(sc.initial, sc.final_net, sc.phi);
      ++instances;
      if (r.ok == !truth.valid.empty()) ++agree;
      if (r.ok && !truth.valid.empty()) {
        ++members_needed;
        auto order = oracle::unit_order(plan, r.cmds);
        if (std::find(truth.valid.begin(), truth.valid.end(), order) != truth.valid.end()) ++member;
      }
      if (!truth.valid.empty()) ++solvable;
    }
  }
  double s = since(t0);
  o.require(instances >= 100, "only " + std::to_string(instances) + " instances");
  o.require(agree == instances, std::to_string(instances - agree) + " verdict disagreements");
  o.require(member == members_needed, std::to_string(members_needed - member) + " sequences outside the valid set");
  o.require(s < 600, "runtime " + std::to_string(s) + "s");
  o.detail << " " << instances << " instances (" << solvable << " solvable), " << agree << " agree, " << s << "s";
}

void c5(Outcome& o) {
  std::size_t instances = 0, eps = 0, solved = 0;
  double worst = 0;
  for (std::size_t n : {20u, 30u, 40u, 50u}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      DiamondOptions d;
      d.seed = seed;
      d.double_diamond = true;
      Scenario sc;
      try {
        sc = gen_diamond_scenario(gen_smallworld(n, 4, 0.1, seed), d);
      } catch (const TopologyError&) {
        continue;
      }
      ++instances;
      SynthOptions sw;
      sw.timeout_seconds = 60;
      auto t0 = Clock::now();
      auto a = order_update(sc.initial, sc.final_net, sc.phi, sw);
      worst = std::max(worst, since(t0));
      if (!a.ok && !a.timed_out) ++eps;
      SynthOptions rule = sw;
      rule.granularity = Granularity::Rule;
      t0 = Clock::now();
      auto b = order_update(sc.initial, sc.final_net, sc.phi, rule);
      worst = std::max(worst, since(t0));
      if (b.ok && oracle_verify(sc.initial, b.cmds, sc.phi).ok) ++solved;
    }
  }
  o.require(instances >= 8, "only " + std::to_string(instances) + " instances");
  o.require(eps == instances, std::to_string(instances - eps) + " not reported unsolvable at switch granularity");
  o.require(solved == instances, std::to_string(instances - solved) + " not solved at rule granularity");
  o.require(worst < 60, "slowest run " + std::to_string(worst) + "s");
  o.detail << " " << instances << " double diamonds, " << eps << " eps by switch, " << solved
           << " solved by rule, slowest " << worst << "s";
}

void c6(Outcome& o) {
  using fixture::Five;
  Five f;
  auto a = ltl::eventually(ltl::atom(ltl::Atom::prop(0)));
  auto b = ltl::eventually(ltl::atom(ltl::Atom::prop(1)));
  Checker c(ltl::disj(a, b));
  auto r0 = c.model_check(f.k);
  auto k2 = fixture::redirect(f.k, Five::J, {Five::N});
  Labeling lab = r0.labeling;
  std::size_t anc = 0;
  std::size_t n = c.relabel(k2, lab, {Five::J}, &anc);
  auto ancs = ancestors(k2, {Five::J});
  o.require(n == 2 && ancs == std::vector<StateId>{Five::H, Five::J}, "relabeled set is not {J, H}");
  bool gains_b = !lab.labels[Five::J].empty(), loses_a = true, had_a = !r0.labeling.labels[Five::J].empty();
  for (auto m : lab.labels[Five::J]) {
    gains_b = gains_b && c.closure().contains(m, b);
    loses_a = loses_a && !c.closure().contains(m, a);
  }
  for (auto m : r0.labeling.labels[Five::J]) had_a = had_a && c.closure().contains(m, a);
  o.require(had_a && gains_b && loses_a, "J does not trade F a for F b");
  o.require(lab.labels[Five::H] == r0.labeling.labels[Five::H], "H's label changed");
  o.require(r0.ok && c.check_init(k2, lab), "verdict is not true");
  o.detail << " relabeled " << n << " of " << anc << " ancestors, verdict true";
}

void c7(Outcome& o) {
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    DiamondOptions d;
    d.seed = seed;
    auto t0 = Clock::now();
    Scenario sc = gen_diamond_scenario(gen_smallworld(500, 4, 0.1, seed), d);
    SynthOptions opt;
    opt.timeout_seconds = 120;
    auto r = order_update(sc.initial, sc.final_net, sc.phi, opt);
    double s = since(t0);
    worst = std::max(worst, s);
    o.require(r.ok, "n=500 seed " + std::to_string(seed) + " not solved");
    o.require(s < 60, "n=500 seed " + std::to_string(seed) + " took " + std::to_string(s) + "s");
  }
  double inc = 0, bat = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    DiamondOptions d;
    d.seed = seed;
    Scenario sc = gen_diamond_scenario(gen_smallworld(200, 4, 0.1, seed), d);
    SynthOptions opt;
    auto ri = order_update(sc.initial, sc.final_net, sc.phi, opt);
    opt.incremental = false;
    auto rb = order_update(sc.initial, sc.final_net, sc.phi, opt);
    o.require(ri.ok && rb.ok, "n=200 seed " + std::to_string(seed) + " not solved in both modes");
    o.require(update_switches(ri.cmds) == update_switches(rb.cmds),
              "n=200 seed " + std::to_string(seed) + " sequences differ");
    inc += ri.stats.checker_seconds;
    bat += rb.stats.checker_seconds;
  }
  double ratio = inc > 0 ? bat / inc : 0;
  o.require(ratio >= 2.0, "checker speedup " + std::to_string(ratio));
  o.detail << " n=500 slowest " << worst << "s; n=200 checker time " << inc << "s incremental vs " << bat
           << "s batch (" << ratio << "x)";
}

void c8(Outcome& o) {
  std::size_t instances = 0, worst_retained = 0, unsolved = 0;
  double worst_fraction = 1, worst_secs = 0;
  for (int ki = 0; ki < 3; ++ki) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      DiamondOptions d;
      d.seed = seed;
      d.kind = static_cast<ltl::PropertyKind>(ki);
      Scenario sc = gen_diamond_scenario(gen_smallworld(500, 4, 0.1, seed), d);
      if (config_diff(sc.initial, sc.final_net).updates.size() < 20) continue;
      SynthOptions opt;
      opt.timeout_seconds = 60;
      auto r = order_update(sc.initial, sc.final_net, sc.phi, opt);
      if (!r.ok) {
        ++unsolved;
        continue;
      }
      ++instances;
      auto t0 = Clock::now();
      auto w = remove_waits(sc.initial, r.cmds, sc.phi);
      double secs = since(t0);
      double frac = w.waits_before ? static_cast<double>(w.removed) / static_cast<double>(w.waits_before) : 1.0;
      worst_retained = std::max(worst_retained, w.retained);
      worst_fraction = std::min(worst_fraction, frac);
      worst_secs = std::max(worst_secs, secs);
      o.require(!w.fallback, sc.name + " fell back");
      o.require(oracle_verify_windowed(sc.initial, w.cmds, sc.phi).ok, sc.name + " fails re-verification");
    }
  }
  o.require(instances >= 10, "only " + std::to_string(instances) + " solved instances");
  o.require(unsolved == 0, std::to_string(unsolved) + " instances not synthesized");
  o.require(worst_retained <= 3, std::to_string(worst_retained) + " waits retained");
  o.require(worst_fraction >= 0.9, "removed fraction " + std::to_string(worst_fraction));
  o.require(worst_secs < 5, "pass took " + std::to_string(worst_secs) + "s");
  o.detail << " " << instances << " instances at n=500 with >= 20 updates, most retained " << worst_retained
           << ", least removed " << worst_fraction * 100 << "%, slowest pass " << worst_secs << "s";
}

void c9(Outcome& o) {
  std::mt19937_64 rng(2024);
  std::size_t structures = 0, states = 0, bad = 0;
  for (int t = 0; t < 300; ++t) {
    auto k = testgen::random_dag(rng, 5 + rng() % 56);
    auto phi = testgen::bounded_formula(rng, 12);
    Checker c(phi);
    auto res = c.model_check(k);
    auto ref = oracle::trace_labels(k, c.closure());
    for (StateId q = 0; q < k.size(); ++q) {
      std::set<std::uint64_t> got;
      for (auto m : res.labeling.labels[q]) got.insert(m.bits);
      if (got != ref[q]) ++bad;
    }
    if (res.ok != oracle::all_traces_hold(k, phi)) ++bad;
    ++structures;
    states += k.size();
  }
  o.require(bad == 0, std::to_string(bad) + " label or verdict mismatches");
  o.detail << " " << structures << " structures, " << states << " states, " << bad << " mismatches";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<int, std::function<void(Outcome&)>>> all{
      {1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5}, {6, c6}, {7, c7}, {8, c8}, {9, c9}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  bool ok = true;
  for (auto& [id, fn] : all) {
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    auto t0 = Clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s -%s (%.2fs)\n", id, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(),
                since(t0));
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
