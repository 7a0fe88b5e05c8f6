#include "netupd/checker.hpp"

#include <algorithm>
#include <limits>

namespace netupd {

using ltl::FormulaPtr;
using ltl::Mcs;
using ltl::Op;

Checker::Checker(FormulaPtr phi) : phi_(std::move(phi)), closure_(phi_) {
  root_ = *closure_.find(phi_);
  atom_pairs_ = closure_.atom_pairs();
}

std::uint64_t Checker::atom_bits(const KripkeStructure& k, StateId q) const {
  std::uint64_t bits = 0;
  for (int i : atom_pairs_)
    if (k.atom_holds(q, closure_.pairs()[i].pos->atom())) bits |= std::uint64_t{1} << i;
  return bits;
}

bool Checker::holds0(const KripkeStructure& k, StateId q, const FormulaPtr& psi) const {
  if (!k.is_sink(q)) throw KripkeError("holds0 on a non-sink state");
  switch (psi->op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return k.atom_holds(q, psi->atom());
    case Op::NegAtom: return !k.atom_holds(q, psi->atom());
    case Op::And: return holds0(k, q, psi->lhs()) && holds0(k, q, psi->rhs());
    case Op::Or: return holds0(k, q, psi->lhs()) || holds0(k, q, psi->rhs());
    case Op::Next: return holds0(k, q, psi->arg());
    // The only continuation of a sink is itself, so both reduce to the
    // right operand.
    case Op::Until: return holds0(k, q, psi->rhs());
    case Op::Release: return holds0(k, q, psi->rhs());
  }
  return false;
}

bool Checker::holds_sink(const KripkeStructure& k, StateId q, Mcs m) const {
  const auto& pairs = closure_.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& f = ((m.bits >> i) & 1u) ? pairs[i].pos : pairs[i].neg;
    if (!holds0(k, q, f)) return false;
  }
  return true;
}

Mcs Checker::sink_mcs(const KripkeStructure& k, StateId q) const {
  if (!k.is_sink(q)) throw KripkeError("sink_mcs on a non-sink state");
  const auto& pairs = closure_.pairs();
  std::uint64_t bits = atom_bits(k, q);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    Mcs m{bits};
    bool v = false;
    switch (p.pos->op()) {
      case Op::True: v = true; break;
      case Op::Atom: continue;
      case Op::And: v = closure_.member(m, p.lhs, p.lhs_pol) && closure_.member(m, p.rhs, p.rhs_pol); break;
      case Op::Next: v = closure_.member(m, p.lhs, p.lhs_pol); break;
      case Op::Until: v = closure_.member(m, p.rhs, p.rhs_pol); break;
      default: break;
    }
    if (v) bits |= std::uint64_t{1} << i;
  }
  return Mcs{bits};
}

bool Checker::holds(const KripkeStructure& k, StateId q, Mcs m, const Labeling& lab) const {
  std::uint64_t mask = 0;
  for (int i : atom_pairs_) mask |= std::uint64_t{1} << i;
  if ((m.bits & mask) != atom_bits(k, q)) return false;
  for (StateId t : k.succ[q]) {
    if (!lab.valid[t]) throw KripkeError("successor label not computed");
    for (Mcs m2 : lab.labels[t])
      if (ltl::follows(closure_, m, m2)) return true;
  }
  return false;
}

Mcs Checker::predecessor(const KripkeStructure& k, StateId q, Mcs next) const {
  const auto& pairs = closure_.pairs();
  std::uint64_t bits = atom_bits(k, q);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    Mcs m{bits};
    bool v = false;
    switch (p.pos->op()) {
      case Op::True: v = true; break;
      case Op::Atom: continue;
      case Op::And: v = closure_.member(m, p.lhs, p.lhs_pol) && closure_.member(m, p.rhs, p.rhs_pol); break;
      case Op::Next: v = closure_.member(next, p.lhs, p.lhs_pol); break;
      case Op::Until:
        v = closure_.member(m, p.rhs, p.rhs_pol) ||
            (closure_.member(m, p.lhs, p.lhs_pol) && ((next.bits >> i) & 1u));
        break;
      default: break;
    }
    if (v) bits |= std::uint64_t{1} << i;
  }
  return Mcs{bits};
}

Label Checker::label_node(const KripkeStructure& k, StateId q, const Labeling& lab) const {
  if (k.is_sink(q)) return {sink_mcs(k, q)};
  // The follows constraints fix every temporal member of M from M' and the
  // atoms of q, so each successor MCS explains exactly one M.
  Label out;
  for (StateId t : k.succ[q]) {
    if (!lab.valid[t]) throw KripkeError("successor label not computed");
    for (Mcs m2 : lab.labels[t]) out.push_back(predecessor(k, q, m2));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t Checker::relabel(const KripkeStructure& k, Labeling& lab,
                             const std::vector<StateId>& v, std::size_t* ancestor_count,
                             LabelUndo* undo) const {
  if (lab.labels.size() != k.size()) {
    lab.labels.resize(k.size());
    lab.valid.resize(k.size(), 0);
  }
  if (v.empty()) {
    if (ancestor_count) *ancestor_count = 0;
    return 0;
  }
  auto anc = ancestors(k, v);
  if (ancestor_count) *ancestor_count = anc.size();
  auto order = topo_order(k, anc);
  std::vector<char> in_v(k.size(), 0), changed(k.size(), 0);
  for (StateId q : v) in_v[q] = 1;
  std::size_t count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    StateId q = *it;
    bool need = in_v[q] || !lab.valid[q];
    if (!need)
      for (StateId t : k.succ[q])
        if (t != q && changed[t]) {
          need = true;
          break;
        }
    if (!need) continue;
    Label fresh = label_node(k, q, lab);
    ++count;
    if (!lab.valid[q] || fresh != lab.labels[q]) {
      changed[q] = 1;
      if (undo) undo->entries.emplace_back(q, std::move(lab.labels[q]), lab.valid[q]);
      lab.labels[q] = std::move(fresh);
      lab.valid[q] = 1;
    }
  }
  return count;
}

bool Checker::check_init(const KripkeStructure& k, const Labeling& lab) const {
  for (StateId q : k.initial)
    for (Mcs m : lab.labels[q])
      if (!member_phi(m)) return false;
  return true;
}

CheckResult Checker::model_check(const KripkeStructure& k) const {
  CheckResult r;
  r.labeling = Labeling::empty(k.size());
  std::vector<StateId> all(k.size());
  for (StateId q = 0; q < k.size(); ++q) all[q] = q;
  r.relabeled = relabel(k, r.labeling, all, &r.ancestors);
  r.ok = check_init(k, r.labeling);
  if (!r.ok) r.counterexample = extract_counterexample(k, r.labeling);
  return r;
}

void LabelUndo::revert(Labeling& lab) {
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    lab.labels[std::get<0>(*it)] = std::move(std::get<1>(*it));
    lab.valid[std::get<0>(*it)] = std::get<2>(*it);
  }
  entries.clear();
}

CheckResult Checker::incr_model_check_in_place(const KripkeStructure& k, const UpdateDelta& u,
                                               Labeling& lab, LabelUndo* undo) const {
  if (lab.labels.size() != k.size()) throw KripkeError("labeling does not match structure");
  CheckResult r;
  r.relabeled = relabel(k, lab, u.changed, &r.ancestors, undo);
  r.ok = check_init(k, lab);
  if (!r.ok) r.counterexample = extract_counterexample(k, lab);
  return r;
}

CheckResult Checker::incr_model_check(const KripkeStructure& k, const UpdateDelta& u,
                                      Labeling lab) const {
  if (lab.labels.size() != k.size()) throw KripkeError("labeling does not match structure");
  CheckResult r;
  r.labeling = std::move(lab);
  r.relabeled = relabel(k, r.labeling, u.changed, &r.ancestors);
  r.ok = check_init(k, r.labeling);
  if (!r.ok) r.counterexample = extract_counterexample(k, r.labeling);
  return r;
}

std::vector<StateId> Checker::extract_counterexample(const KripkeStructure& k,
                                                     const Labeling& lab) const {
  std::optional<StateId> start;
  Mcs cur{};
  for (StateId q : k.initial) {
    for (Mcs m : lab.labels[q])
      if (!member_phi(m)) {
        start = q;
        cur = m;
        break;
      }
    if (start) break;
  }
  if (!start) return {};

  // Distance to a sink over the descendants of the start state.
  auto desc = std::vector<StateId>{};
  {
    std::vector<char> seen(k.size(), 0);
    std::vector<StateId> work{*start};
    seen[*start] = 1;
    while (!work.empty()) {
      StateId q = work.back();
      work.pop_back();
      desc.push_back(q);
      for (StateId t : k.succ[q])
        if (!seen[t]) {
          seen[t] = 1;
          work.push_back(t);
        }
    }
  }
  auto order = topo_order(k, desc);
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(k.size(), kInf);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    StateId q = *it;
    if (k.is_sink(q)) {
      dist[q] = 0;
      continue;
    }
    for (StateId t : k.succ[q])
      if (t != q && dist[t] != kInf) dist[q] = std::min(dist[q], dist[t] + 1);
  }

  std::vector<StateId> trace{*start};
  StateId q = *start;
  while (!k.is_sink(q)) {
    std::optional<StateId> best;
    Mcs best_m{};
    for (StateId t : k.succ[q]) {
      if (t == q) continue;
      for (Mcs m2 : lab.labels[t]) {
        if (predecessor(k, q, m2) != cur) continue;
        if (!best || dist[t] < dist[*best]) {
          best = t;
          best_m = m2;
        }
        break;
      }
    }
    if (!best) throw KripkeError("labeling does not explain the counterexample");
    q = *best;
    cur = best_m;
    trace.push_back(q);
  }
  return trace;
}

std::vector<ltl::Position> trace_positions(const KripkeStructure& k,
                                           const std::vector<StateId>& trace) {
  std::vector<ltl::Position> out;
  out.reserve(trace.size());
  for (StateId q : trace) out.push_back(k.states[q].position());
  return out;
}

}  // namespace netupd
