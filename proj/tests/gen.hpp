#pragma once

#include <random>
#include <vector>

#include "netupd/kripke.hpp"
#include "netupd/ltl.hpp"
#include "netupd/scenario.hpp"
#include "netupd/topology.hpp"

namespace testgen {

using namespace netupd;

// Loop-free abstract structure; state i only points to higher states.
inline KripkeStructure random_dag(std::mt19937_64& rng, std::size_t n, unsigned props = 3,
                                  std::size_t window = 8) {
  std::vector<KState> states(n);
  std::vector<std::pair<StateId, StateId>> edges;
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    states[i].role = KState::Role::Abstract;
    states[i].props = rng() & ((1ull << props) - 1);
    if (i + 1 == n || (i > 2 && u(rng) < 0.15)) {
      edges.push_back({static_cast<StateId>(i), static_cast<StateId>(i)});
      continue;
    }
    std::size_t hi = std::min(n - 1, i + window);
    std::uniform_int_distribution<std::size_t> pick(i + 1, hi);
    std::size_t deg = 1 + rng() % 3;
    for (std::size_t d = 0; d < deg; ++d)
      edges.push_back({static_cast<StateId>(i), static_cast<StateId>(pick(rng))});
  }
  std::vector<StateId> init;
  for (StateId q = 0; q < std::min<std::size_t>(3, n); ++q) init.push_back(q);
  return make_kripke(std::move(states), edges, init);
}

inline ltl::FormulaPtr random_formula(std::mt19937_64& rng, int depth, unsigned props = 3) {
  auto leaf = [&]() -> ltl::FormulaPtr {
    auto r = rng() % 8;
    if (r == 0) return ltl::tt();
    auto a = ltl::atom(ltl::Atom::prop(static_cast<std::uint32_t>(rng() % props)));
    return r < 5 ? a : ltl::negate(a);
  };
  if (depth <= 0) return leaf();
  switch (rng() % 9) {
    case 0:
      return leaf();
    case 1:
      return ltl::conj(random_formula(rng, depth - 1, props), random_formula(rng, depth - 1, props));
    case 2:
      return ltl::disj(random_formula(rng, depth - 1, props), random_formula(rng, depth - 1, props));
    case 3:
      return ltl::next(random_formula(rng, depth - 1, props));
    case 4:
      return ltl::until(random_formula(rng, depth - 1, props), random_formula(rng, depth - 1, props));
    case 5:
      return ltl::release(random_formula(rng, depth - 1, props), random_formula(rng, depth - 1, props));
    case 6:
      return ltl::eventually(random_formula(rng, depth - 1, props));
    case 7:
      return ltl::globally(random_formula(rng, depth - 1, props));
    default:
      return ltl::negate(random_formula(rng, depth - 1, props));
  }
}

// Formula whose extended closure has at most max_ecl members.
inline ltl::FormulaPtr bounded_formula(std::mt19937_64& rng, std::size_t max_ecl, int depth = 3) {
  for (;;) {
    auto f = random_formula(rng, depth);
    if (ltl::ecl(f).size() <= max_ecl) return f;
  }
}

// Diamond scenario on a small-world graph, retried over seeds until the
// number of update units is within [lo, hi].
inline bool small_diamond(std::uint64_t seed, ltl::PropertyKind kind, std::size_t lo,
                          std::size_t hi, Scenario& out, std::size_t n = 14,
                          bool double_diamond = false) {
  for (std::uint64_t s = seed * 1000; s < seed * 1000 + 200; ++s) {
    Topology t = gen_smallworld(n, 4, 0.2, s);
    DiamondOptions o;
    o.kind = kind;
    o.seed = s;
    o.chain_length = 2;
    o.double_diamond = double_diamond;
    try {
      Scenario sc = gen_diamond_scenario(t, o);
      auto diff = config_diff(sc.initial, sc.final_net);
      if (diff.updates.size() >= lo && diff.updates.size() <= hi) {
        out = std::move(sc);
        return true;
      }
    } catch (const TopologyError&) {
    }
  }
  return false;
}

}  // namespace testgen
