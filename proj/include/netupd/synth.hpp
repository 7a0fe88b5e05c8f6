#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "netupd/checker.hpp"
#include "netupd/kripke.hpp"
#include "netupd/ltl.hpp"
#include "netupd/network.hpp"

namespace netupd {

enum class Granularity { Switch, Rule };
Granularity parse_granularity(const std::string& s);
std::string to_string(Granularity g);

// One step of the update: a whole switch, or a single rule change.
struct UpdateUnit {
  SwitchId sw = 0;
  RuleDelta delta;
};

struct UpdatePlan {
  Granularity granularity = Granularity::Switch;
  Network initial;
  Network final_net;
  std::vector<UpdateUnit> units;
  std::vector<SwitchId> switches;  // updated switches, ascending

  std::vector<std::size_t> units_of(SwitchId sw) const;
  // Table of sw with the applied units (unit-index order).
  Table table_for(SwitchId sw, const std::vector<char>& applied) const;
  Network config(const std::vector<char>& applied) const;
  Command command(std::size_t unit) const;
};

UpdatePlan make_plan(const Network& n_i, const Network& n_f, Granularity g);

// Partial assignment over unit "updated" flags.
struct Cube {
  std::vector<std::pair<std::size_t, bool>> lits;  // sorted by unit
  bool matches(const std::vector<char>& applied) const;
  bool operator==(const Cube& o) const { return lits == o.lits; }
};

class ConfigFormula {
 public:
  explicit ConfigFormula(std::size_t width = 0) : width_(width) {}
  void add(const Cube& c);
  bool matches(const std::vector<char>& applied) const;
  std::size_t size() const { return full_.size() + partial_.size(); }
  const std::vector<Cube>& partial_cubes() const { return partial_; }

 private:
  std::unordered_set<std::string> full_;
  std::size_t width_ = 0;
  std::vector<Cube> partial_;
};

Cube make_config_formula(const std::vector<char>& applied);
// Flags of every unit belonging to a switch on the trace.
Cube make_cex_formula(const UpdatePlan& plan, const KripkeStructure& k,
                      const std::vector<StateId>& trace, const std::vector<char>& applied);

// Clauses of precedence atoms (d before u) over unit indices.
class PrecedenceSolver {
 public:
  explicit PrecedenceSolver(std::size_t units, std::size_t budget = 200000)
      : n_(units), budget_(budget) {}
  void record_constraint(const Cube& cex);
  void add_clause(std::vector<std::pair<std::size_t, std::size_t>> clause);
  // Exhausting the search budget counts as feasible.
  bool feasible();
  std::size_t clauses() const { return clauses_.size(); }
  bool budget_exhausted() const { return exhausted_; }

 private:
  bool reaches(std::size_t from, std::size_t to) const;
  bool satisfied(const std::vector<std::pair<std::size_t, std::size_t>>& c) const;
  bool search(std::vector<std::size_t>& open, std::size_t& steps);

  std::size_t n_;
  std::size_t budget_;
  bool contradiction_ = false;
  bool exhausted_ = false;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> clauses_;
  std::vector<std::vector<std::size_t>> graph_;  // chosen atoms
  bool have_solution_ = false;
};

struct SynthOptions {
  Granularity granularity = Granularity::Switch;
  bool prune = true;         // W cubes from counterexamples
  bool early_term = true;    // precedence infeasibility
  bool incremental = true;   // false: model check from scratch at every node
  bool debug_check = false;  // compare incremental with monolithic
  double timeout_seconds = 0;
  std::size_t precedence_budget = 200000;
};

struct SynthStats {
  std::size_t nodes = 0;
  std::size_t checker_calls = 0;
  std::size_t pruned = 0;
  std::size_t relabeled = 0;
  std::size_t ancestors = 0;
  std::size_t loops_rejected = 0;
  std::size_t w_cubes = 0;
  std::size_t constraints = 0;
  double checker_seconds = 0;
  double wall_seconds = 0;
  // debug_check only
  std::size_t debug_compared = 0;
  std::size_t debug_mismatches = 0;
  std::size_t debug_relabel_excess = 0;
  std::size_t debug_w_false_positives = 0;
};

struct SynthResult {
  bool ok = false;
  std::vector<Command> cmds;
  SynthStats stats;
  bool early_terminated = false;
  bool timed_out = false;
  std::string diagnostic;
};

// Candidate units not yet applied: switches unreachable from the initial
// states first, then by switch id, then by unit index.
std::vector<std::size_t> possible_updates(const UpdatePlan& plan, const KripkeStructure& k,
                                          const std::vector<char>& applied);

// Simple careful sequence (update, wait)* or failure. Throws LoopError when
// either endpoint has a forwarding loop.
SynthResult order_update(const Network& n_i, const Network& n_f, const ltl::FormulaPtr& phi,
                         const SynthOptions& opts = {});

std::string stats_csv_header();
std::string stats_csv_row(const SynthResult& r);

}  // namespace netupd
