#include "netupd/synth.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace netupd {

Granularity parse_granularity(const std::string& s) {
  if (s == "switch") return Granularity::Switch;
  if (s == "rule") return Granularity::Rule;
  throw std::invalid_argument("unknown granularity: " + s);
}

std::string to_string(Granularity g) { return g == Granularity::Switch ? "switch" : "rule"; }

std::vector<std::size_t> UpdatePlan::units_of(SwitchId sw) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (units[i].sw == sw) out.push_back(i);
  return out;
}

Table UpdatePlan::table_for(SwitchId sw, const std::vector<char>& applied) const {
  const Switch* from = initial.find_switch(sw);
  if (!from) throw NetworkError("unknown switch " + std::to_string(sw));
  Table t = from->table;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (units[i].sw == sw && applied[i]) t = apply_rule_delta(t, units[i].delta);
  return t;
}

Network UpdatePlan::config(const std::vector<char>& applied) const {
  Network net = initial.configuration();
  for (SwitchId sw : switches) net.find_switch(sw)->table = table_for(sw, applied);
  return net;
}

Command UpdatePlan::command(std::size_t unit) const {
  const auto& u = units.at(unit);
  if (granularity == Granularity::Switch)
    return SwitchUpdate{u.sw, final_net.find_switch(u.sw)->table};
  return RuleUpdate{u.delta};
}

UpdatePlan make_plan(const Network& n_i, const Network& n_f, Granularity g) {
  UpdatePlan p;
  p.granularity = g;
  p.initial = n_i.configuration();
  p.final_net = n_f.configuration();
  ConfigDiff diff = config_diff(n_i, n_f);
  for (std::size_t i = 0; i < diff.updates.size(); ++i) {
    SwitchId sw = diff.updates[i].sw;
    p.switches.push_back(sw);
    if (g == Granularity::Switch) {
      p.units.push_back({sw, diff.deltas[i]});
    } else {
      for (auto& d : rule_units(sw, n_i.find_switch(sw)->table, n_f.find_switch(sw)->table))
        p.units.push_back({sw, std::move(d)});
    }
  }
  return p;
}

bool Cube::matches(const std::vector<char>& applied) const {
  for (auto [u, v] : lits)
    if (static_cast<bool>(applied[u]) != v) return false;
  return true;
}

namespace {
std::string key_of(const std::vector<char>& applied) {
  std::string s(applied.size(), '0');
  for (std::size_t i = 0; i < applied.size(); ++i)
    if (applied[i]) s[i] = '1';
  return s;
}
}  // namespace

void ConfigFormula::add(const Cube& c) {
  if (width_ > 0 && c.lits.size() == width_) {
    std::vector<char> a(width_);
    for (auto [u, v] : c.lits) a[u] = v;
    full_.insert(key_of(a));
    return;
  }
  if (std::find(partial_.begin(), partial_.end(), c) == partial_.end()) partial_.push_back(c);
}

bool ConfigFormula::matches(const std::vector<char>& applied) const {
  if (applied.size() == width_ && full_.count(key_of(applied))) return true;
  for (const auto& c : partial_)
    if (c.matches(applied)) return true;
  return false;
}

Cube make_config_formula(const std::vector<char>& applied) {
  Cube c;
  for (std::size_t i = 0; i < applied.size(); ++i) c.lits.push_back({i, applied[i] != 0});
  return c;
}

Cube make_cex_formula(const UpdatePlan& plan, const KripkeStructure& k,
                      const std::vector<StateId>& trace, const std::vector<char>& applied) {
  std::vector<SwitchId> sws;
  for (StateId q : trace) sws.push_back(k.states[q].sw);
  std::sort(sws.begin(), sws.end());
  sws.erase(std::unique(sws.begin(), sws.end()), sws.end());
  Cube c;
  for (std::size_t i = 0; i < plan.units.size(); ++i)
    if (std::binary_search(sws.begin(), sws.end(), plan.units[i].sw))
      c.lits.push_back({i, applied[i] != 0});
  return c;
}

void PrecedenceSolver::record_constraint(const Cube& cex) {
  std::vector<std::size_t> up, down;
  for (auto [u, v] : cex.lits) (v ? up : down).push_back(u);
  std::vector<std::pair<std::size_t, std::size_t>> clause;
  for (auto d : down)
    for (auto u : up) clause.push_back({d, u});
  add_clause(std::move(clause));
}

void PrecedenceSolver::add_clause(std::vector<std::pair<std::size_t, std::size_t>> clause) {
  std::sort(clause.begin(), clause.end());
  clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
  if (clause.empty()) contradiction_ = true;
  if (std::find(clauses_.begin(), clauses_.end(), clause) == clauses_.end()) {
    clauses_.push_back(std::move(clause));
    if (have_solution_ && !satisfied(clauses_.back())) have_solution_ = false;
  }
}

bool PrecedenceSolver::reaches(std::size_t from, std::size_t to) const {
  if (from == to) return true;
  std::vector<char> seen(n_, 0);
  std::vector<std::size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : graph_[v]) {
      if (w == to) return true;
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return false;
}

bool PrecedenceSolver::satisfied(const std::vector<std::pair<std::size_t, std::size_t>>& c) const {
  if (graph_.empty()) return false;
  for (auto [d, u] : c)
    if (d != u && reaches(d, u)) return true;
  return false;
}

bool PrecedenceSolver::search(std::vector<std::size_t>& open, std::size_t& steps) {
  if (++steps > budget_) {
    exhausted_ = true;
    return true;
  }
  // Most constrained open clause first.
  std::size_t best = SIZE_MAX, best_count = SIZE_MAX;
  std::vector<std::size_t> still;
  for (auto ci : open) {
    if (satisfied(clauses_[ci])) continue;
    still.push_back(ci);
    std::size_t cnt = 0;
    for (auto [d, u] : clauses_[ci])
      if (d != u && !reaches(u, d)) ++cnt;
    if (cnt < best_count) {
      best_count = cnt;
      best = ci;
    }
  }
  if (still.empty()) return true;
  if (best_count == 0) return false;
  for (auto [d, u] : clauses_[best]) {
    if (d == u || reaches(u, d)) continue;
    graph_[d].push_back(u);
    if (search(still, steps)) return true;
    graph_[d].pop_back();
    if (exhausted_) return true;
  }
  return false;
}

bool PrecedenceSolver::feasible() {
  if (contradiction_) return false;
  if (have_solution_) return true;
  graph_.assign(n_, {});
  std::vector<std::size_t> open(clauses_.size());
  for (std::size_t i = 0; i < open.size(); ++i) open[i] = i;
  std::size_t steps = 0;
  exhausted_ = false;
  bool ok = search(open, steps);
  if (ok && !exhausted_) have_solution_ = true;
  if (!ok) contradiction_ = true;
  return ok;
}

std::vector<std::size_t> possible_updates(const UpdatePlan& plan, const KripkeStructure& k,
                                          const std::vector<char>& applied) {
  std::vector<char> seen(k.size(), 0);
  std::deque<StateId> q;
  for (StateId s : k.initial) {
    seen[s] = 1;
    q.push_back(s);
  }
  while (!q.empty()) {
    StateId s = q.front();
    q.pop_front();
    for (StateId t : k.succ[s])
      if (!seen[t]) {
        seen[t] = 1;
        q.push_back(t);
      }
  }
  std::vector<SwitchId> reached;
  for (StateId s = 0; s < k.size(); ++s)
    if (seen[s]) reached.push_back(k.states[s].sw);
  std::sort(reached.begin(), reached.end());
  reached.erase(std::unique(reached.begin(), reached.end()), reached.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < plan.units.size(); ++i)
    if (!applied[i]) out.push_back(i);
  auto rank = [&](std::size_t i) {
    bool r = std::binary_search(reached.begin(), reached.end(), plan.units[i].sw);
    return std::make_tuple(r, plan.units[i].sw, i);
  };
  std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return rank(a) < rank(b); });
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Timeout {};
struct Infeasible {};

struct Node {
  Network net;
  KripkeStructure k;
  std::vector<char> applied;
};

class Search {
 public:
  Search(const UpdatePlan& plan, const ltl::FormulaPtr& phi, const SynthOptions& opts,
         SynthResult& res)
      : plan_(plan),
        checker_(phi),
        opts_(opts),
        res_(res),
        V_(plan.units.size()),
        W_(plan.units.size()),
        solver_(plan.units.size(), opts.precedence_budget),
        start_(Clock::now()) {}

  bool root(std::vector<Command>& out) {
    Node n;
    n.net = plan_.initial;
    n.applied.assign(plan_.units.size(), 0);
    n.k = build_kripke(n.net);
    ++res_.stats.nodes;
    CheckResult cr = timed_full(n.k);
    V_.add(make_config_formula(n.applied));
    if (!cr.ok) {
      res_.diagnostic = "initial configuration violates the property";
      return false;
    }
    lab_ = std::move(cr.labeling);
    return expand(n, out);
  }

 private:
  CheckResult timed_full(const KripkeStructure& k) {
    auto t0 = Clock::now();
    CheckResult cr = checker_.model_check(k);
    res_.stats.checker_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    ++res_.stats.checker_calls;
    return cr;
  }

  void check_time() {
    if (opts_.timeout_seconds > 0 &&
        std::chrono::duration<double>(Clock::now() - start_).count() > opts_.timeout_seconds)
      throw Timeout{};
  }

  void learn(const Cube& c) {
    if (opts_.prune) {
      W_.add(c);
      ++res_.stats.w_cubes;
    }
    if (opts_.early_term) {
      solver_.record_constraint(c);
      res_.stats.constraints = solver_.clauses();
      if (!solver_.feasible()) throw Infeasible{};
    }
  }

  bool expand(const Node& n, std::vector<Command>& out) {
    if (std::all_of(n.applied.begin(), n.applied.end(), [](char c) { return c != 0; })) {
      out.clear();
      return true;
    }
    for (std::size_t u : possible_updates(plan_, n.k, n.applied)) {
      std::vector<Command> rest;
      if (child(n, u, rest)) {
        out.clear();
        out.push_back(plan_.command(u));
        out.push_back(Wait{});
        out.insert(out.end(), rest.begin(), rest.end());
        return true;
      }
    }
    return false;
  }

  bool child(const Node& parent, std::size_t u, std::vector<Command>& out) {
    check_time();
    std::vector<char> applied = parent.applied;
    applied[u] = 1;
    if (V_.matches(applied)) {
      ++res_.stats.pruned;
      return false;
    }
    if (opts_.prune && W_.matches(applied)) {
      ++res_.stats.pruned;
      if (opts_.debug_check) confirm_wrong(applied);
      return false;
    }
    ++res_.stats.nodes;
    SwitchId sw = plan_.units[u].sw;
    Node n;
    n.applied = applied;
    UpdateDelta delta;
    try {
      SwUpdateResult r = sw_update(parent.net, parent.k, sw, plan_.table_for(sw, applied));
      n.net = std::move(r.net);
      n.k = std::move(r.k);
      delta = std::move(r.delta);
    } catch (const LoopError& e) {
      ++res_.stats.loops_rejected;
      V_.add(make_config_formula(applied));
      learn(make_cex_formula(plan_, parent.k, e.cycle, applied));
      return false;
    }
    CheckResult cr;
    LabelUndo undo;
    if (opts_.incremental) {
      auto t0 = Clock::now();
      cr = checker_.incr_model_check_in_place(n.k, delta, lab_, &undo);
      res_.stats.checker_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
      ++res_.stats.checker_calls;
      res_.stats.relabeled += cr.relabeled;
      res_.stats.ancestors += cr.ancestors;
      if (opts_.debug_check) {
        CheckResult full = checker_.model_check(n.k);
        ++res_.stats.debug_compared;
        if (full.ok != cr.ok) ++res_.stats.debug_mismatches;
        if (cr.relabeled > cr.ancestors) ++res_.stats.debug_relabel_excess;
      }
    } else {
      cr = timed_full(n.k);
      res_.stats.relabeled += cr.relabeled;
    }
    V_.add(make_config_formula(applied));
    if (!cr.ok) {
      undo.revert(lab_);
      learn(make_cex_formula(plan_, n.k, cr.counterexample, applied));
      return false;
    }
    if (expand(n, out)) return true;
    undo.revert(lab_);
    return false;
  }

  void confirm_wrong(const std::vector<char>& applied) {
    Network net = plan_.config(applied);
    bool bad = false;
    try {
      bad = !checker_.model_check(build_kripke(net)).ok;
    } catch (const LoopError&) {
      bad = true;
    }
    if (!bad) ++res_.stats.debug_w_false_positives;
  }

  const UpdatePlan& plan_;
  Checker checker_;
  const SynthOptions& opts_;
  SynthResult& res_;
  ConfigFormula V_, W_;
  PrecedenceSolver solver_;
  Labeling lab_;
  Clock::time_point start_;
};

}  // namespace

SynthResult order_update(const Network& n_i, const Network& n_f, const ltl::FormulaPtr& phi,
                         const SynthOptions& opts) {
  auto t0 = Clock::now();
  SynthResult res;
  UpdatePlan plan = make_plan(n_i, n_f, opts.granularity);
  build_kripke(plan.final_net);  // loop check on the target
  Search s(plan, phi, opts, res);
  try {
    res.ok = s.root(res.cmds);
    if (!res.ok && res.diagnostic.empty()) res.diagnostic = "no simple careful sequence exists";
  } catch (const Timeout&) {
    res.ok = false;
    res.timed_out = true;
    res.diagnostic = "timeout";
  } catch (const Infeasible&) {
    res.ok = false;
    res.early_terminated = true;
    res.diagnostic = "ordering constraints are contradictory";
  }
  if (!res.ok) res.cmds.clear();
  res.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

std::string stats_csv_header() {
  return "ok,nodes,checker_calls,pruned,relabeled,ancestors,loops_rejected,w_cubes,constraints,"
         "early_terminated,timed_out,checker_seconds,wall_seconds";
}

std::string stats_csv_row(const SynthResult& r) {
  std::ostringstream os;
  const auto& s = r.stats;
  os << (r.ok ? 1 : 0) << ',' << s.nodes << ',' << s.checker_calls << ',' << s.pruned << ','
     << s.relabeled << ',' << s.ancestors << ',' << s.loops_rejected << ',' << s.w_cubes << ','
     << s.constraints << ',' << (r.early_terminated ? 1 : 0) << ',' << (r.timed_out ? 1 : 0)
     << ',' << s.checker_seconds << ',' << s.wall_seconds;
  return os.str();
}

}  // namespace netupd
