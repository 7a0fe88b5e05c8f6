#pragma once

// Independent reference implementations used by the tests and the
// acceptance runner. They share data types with the library but none of
// its algorithms beyond what is needed to build inputs.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "netupd/checker.hpp"
#include "netupd/kripke.hpp"
#include "netupd/ltl.hpp"
#include "netupd/network.hpp"
#include "netupd/semantics.hpp"
#include "netupd/synth.hpp"

namespace oracle {

using namespace netupd;

inline bool atom_at(const ltl::Atom& a, const ltl::Position& p,
                    const std::vector<TrafficClass>& classes, const FieldSchema& fields) {
  using K = ltl::Atom::Kind;
  switch (a.kind) {
    case K::Switch:
      return p.sw == a.sw;
    case K::Port:
      return p.sw == a.sw && p.port == a.port;
    case K::Dropped:
      return p.dropped;
    case K::Prop:
      return (p.props >> a.value) & 1u;
    case K::Field: {
      std::size_t f = 0;
      while (f < fields.names.size() && fields.names[f] != a.field) ++f;
      if (p.cls >= classes.size()) return false;
      for (const auto& t : classes[p.cls].constraint)
        if (t.field == f) return t.value == a.value;
      return false;
    }
  }
  return false;
}

// Direct recursive LTL semantics on the stutter extension of a finite trace.
inline bool eval(const ltl::FormulaPtr& f, const std::vector<ltl::Position>& tr, std::size_t i,
                 const std::vector<TrafficClass>& classes, const FieldSchema& fields) {
  using ltl::Op;
  const std::size_t last = tr.size() - 1;
  i = std::min(i, last);
  switch (f->op()) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Atom:
      return atom_at(f->atom(), tr[i], classes, fields);
    case Op::NegAtom:
      return !atom_at(f->atom(), tr[i], classes, fields);
    case Op::And:
      return eval(f->lhs(), tr, i, classes, fields) && eval(f->rhs(), tr, i, classes, fields);
    case Op::Or:
      return eval(f->lhs(), tr, i, classes, fields) || eval(f->rhs(), tr, i, classes, fields);
    case Op::Next:
      return eval(f->lhs(), tr, i + 1, classes, fields);
    case Op::Until:
      for (std::size_t j = i; j <= last; ++j) {
        if (eval(f->rhs(), tr, j, classes, fields)) return true;
        if (!eval(f->lhs(), tr, j, classes, fields)) return false;
      }
      return false;
    case Op::Release:
      for (std::size_t j = i; j <= last; ++j) {
        if (!eval(f->rhs(), tr, j, classes, fields)) return false;
        if (eval(f->lhs(), tr, j, classes, fields)) return true;
      }
      return true;
  }
  return false;
}

inline bool in_set(const ltl::ExtendedClosure& c, std::uint64_t bits, const ltl::FormulaPtr& f) {
  return c.contains(ltl::Mcs{bits}, f);
}

// Maximally consistent sets by filtering every sign assignment of the
// closure pairs against the local consistency rules.
inline std::vector<ltl::Mcs> brute_mcs(const ltl::ExtendedClosure& c) {
  using ltl::Op;
  std::vector<ltl::Mcs> out;
  const std::size_t n = c.pairs().size();
  for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
    bool ok = true;
    for (const auto& fm : c.formulas()) {
      bool in = in_set(c, bits, fm);
      switch (fm->op()) {
        case Op::True:
          ok = ok && in;
          break;
        case Op::False:
          ok = ok && !in;
          break;
        case Op::And:
          ok = ok && (in == (in_set(c, bits, fm->lhs()) && in_set(c, bits, fm->rhs())));
          break;
        case Op::Or:
          ok = ok && (in == (in_set(c, bits, fm->lhs()) || in_set(c, bits, fm->rhs())));
          break;
        case Op::Until:
          if (in_set(c, bits, fm->rhs())) ok = ok && in;
          if (in) ok = ok && (in_set(c, bits, fm->lhs()) || in_set(c, bits, fm->rhs()));
          break;
        case Op::Release:
          if (in) ok = ok && in_set(c, bits, fm->rhs());
          if (in_set(c, bits, fm->lhs()) && in_set(c, bits, fm->rhs())) ok = ok && in;
          break;
        default:
          break;
      }
      if (!ok) break;
    }
    if (ok) out.push_back({bits});
  }
  return out;
}

// Every path from q to a sink (structure must be loop-free).
inline void paths_from(const KripkeStructure& k, StateId q, std::vector<StateId>& cur,
                       std::vector<std::vector<StateId>>& out) {
  cur.push_back(q);
  if (k.is_sink(q)) {
    out.push_back(cur);
  } else {
    for (StateId t : k.succ[q])
      if (t != q) paths_from(k, t, cur, out);
  }
  cur.pop_back();
}

inline std::vector<ltl::Position> positions(const KripkeStructure& k,
                                            const std::vector<StateId>& path) {
  std::vector<ltl::Position> out;
  for (auto q : path) out.push_back(k.states[q].position());
  return out;
}

// Label of each state as the set of closure types of its traces.
inline std::vector<std::set<std::uint64_t>> trace_labels(const KripkeStructure& k,
                                                         const ltl::ExtendedClosure& c) {
  std::vector<std::set<std::uint64_t>> out(k.size());
  for (StateId q = 0; q < k.size(); ++q) {
    std::vector<std::vector<StateId>> ps;
    std::vector<StateId> cur;
    paths_from(k, q, cur, ps);
    for (const auto& p : ps) {
      auto tr = positions(k, p);
      std::uint64_t bits = 0;
      for (std::size_t i = 0; i < c.pairs().size(); ++i)
        if (eval(c.pairs()[i].pos, tr, 0, k.classes, k.fields)) bits |= 1ull << i;
      out[q].insert(bits);
    }
  }
  return out;
}

// phi holds on every trace from every initial state.
inline bool all_traces_hold(const KripkeStructure& k, const ltl::FormulaPtr& phi) {
  for (StateId q : k.initial) {
    std::vector<std::vector<StateId>> ps;
    std::vector<StateId> cur;
    paths_from(k, q, cur, ps);
    for (const auto& p : ps)
      if (!eval(phi, positions(k, p), 0, k.classes, k.fields)) return false;
  }
  return true;
}

// Every static single-packet trace of the configuration satisfies phi.
inline bool config_ok_by_traces(const Network& net, const ltl::FormulaPtr& phi) {
  try {
    auto classes = effective_classes(net);
    for (const auto& t : single_packet_traces(net))
      if (!eval(phi, t.positions(classes), 0, classes, net.fields)) return false;
    return true;
  } catch (const TraceLoopError&) {
    return false;
  }
}

// Switch-level one-hop forwarding by exhaustive lookup, closed with
// Floyd-Warshall.
inline std::map<SwitchId, std::set<SwitchId>> floyd_warshall_reach(const Network& net) {
  std::vector<SwitchId> ids;
  for (const auto& s : net.switches) ids.push_back(s.id);
  const std::size_t n = ids.size();
  auto ix = [&](SwitchId s) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), s) - ids.begin());
  };
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  std::vector<Packet> pkts;
  for (const auto& c : effective_classes(net))
    for (auto& p : class_representatives(net, c)) pkts.push_back(p);
  for (const auto& s : net.switches) {
    std::set<PortId> ports;
    for (const auto& l : net.links)
      if (!l.to.is_host() && l.to.id == s.id) ports.insert(l.to.port);
    for (PortId pt : ports)
      for (const auto& p : pkts)
        for (const auto& [q, out] : lookup(s.table, p, pt)) {
          const Link* l = net.link_from(Location::at(s.id, out));
          if (l && !l->to.is_host()) r[ix(s.id)][ix(l->to.id)] = 1;
        }
  }
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t a = 0; a < n; ++a)
      if (r[a][m])
        for (std::size_t b = 0; b < n; ++b)
          if (r[m][b]) r[a][b] = 1;
  std::map<SwitchId, std::set<SwitchId>> out;
  for (std::size_t a = 0; a < n; ++a) {
    out[ids[a]];
    for (std::size_t b = 0; b < n; ++b)
      if (r[a][b]) out[ids[a]].insert(ids[b]);
  }
  return out;
}

struct PermutationOracle {
  std::vector<std::vector<std::size_t>> valid;  // unit orders
  std::size_t orders = 0;
};

// All orders of the plan's units whose every prefix configuration is
// loop-free and satisfies phi, judged by a from-scratch model check.
inline PermutationOracle enumerate_orders(const UpdatePlan& plan, const ltl::FormulaPtr& phi) {
  const std::size_t n = plan.units.size();
  Checker checker(phi);
  std::map<std::vector<char>, bool> memo;
  auto good = [&](const std::vector<char>& applied) {
    auto it = memo.find(applied);
    if (it != memo.end()) return it->second;
    bool ok;
    try {
      ok = checker.model_check(build_kripke(plan.config(applied))).ok;
    } catch (const LoopError&) {
      ok = false;
    }
    memo[applied] = ok;
    return ok;
  };
  PermutationOracle res;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (!good(std::vector<char>(n, 0))) return res;
  do {
    ++res.orders;
    std::vector<char> applied(n, 0);
    bool ok = true;
    for (auto u : perm) {
      applied[u] = 1;
      if (!good(applied)) {
        ok = false;
        break;
      }
    }
    if (ok) res.valid.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return res;
}

// Unit order of a synthesized (update, wait)* sequence.
inline std::vector<std::size_t> unit_order(const UpdatePlan& plan, const std::vector<Command>& cmds) {
  std::vector<std::size_t> out;
  for (const auto& c : cmds) {
    if (!is_update(c)) continue;
    for (std::size_t u = 0; u < plan.units.size(); ++u) {
      bool same = false;
      if (auto* su = std::get_if<SwitchUpdate>(&c)) same = su->sw == plan.units[u].sw;
      if (auto* ru = std::get_if<RuleUpdate>(&c))
        same = ru->delta.sw == plan.units[u].sw &&
               ru->delta.removals == plan.units[u].delta.removals &&
               ru->delta.additions == plan.units[u].delta.additions;
      if (same && std::find(out.begin(), out.end(), u) == out.end()) {
        out.push_back(u);
        break;
      }
    }
  }
  return out;
}

}  // namespace oracle
