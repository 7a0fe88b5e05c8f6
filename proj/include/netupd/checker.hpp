#pragma once

#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "netupd/kripke.hpp"
#include "netupd/ltl.hpp"

namespace netupd {

// Sorted MCS set of one state.
using Label = std::vector<ltl::Mcs>;

struct Labeling {
  std::vector<Label> labels;
  std::vector<char> valid;

  static Labeling empty(std::size_t n) { return {std::vector<Label>(n), std::vector<char>(n, 0)}; }
};

// Previous labels of states overwritten by an in-place relabel.
struct LabelUndo {
  std::vector<std::tuple<StateId, Label, char>> entries;
  void revert(Labeling& lab);
};

struct CheckResult {
  bool ok = true;
  std::vector<StateId> counterexample;
  Labeling labeling;
  std::size_t relabeled = 0;
  std::size_t ancestors = 0;
};

class Checker {
 public:
  explicit Checker(ltl::FormulaPtr phi);

  const ltl::FormulaPtr& formula() const { return phi_; }
  const ltl::ExtendedClosure& closure() const { return closure_; }

  // Truth of psi on the stutter trace of sink q.
  bool holds0(const KripkeStructure& k, StateId q, const ltl::FormulaPtr& psi) const;
  bool holds_sink(const KripkeStructure& k, StateId q, ltl::Mcs m) const;
  // The unique MCS satisfied by sink q.
  ltl::Mcs sink_mcs(const KripkeStructure& k, StateId q) const;
  bool holds(const KripkeStructure& k, StateId q, ltl::Mcs m, const Labeling& lab) const;

  // The MCS with q's atoms whose successor is `next`.
  ltl::Mcs predecessor(const KripkeStructure& k, StateId q, ltl::Mcs next) const;
  Label label_node(const KripkeStructure& k, StateId q, const Labeling& lab) const;

  // Relabel ancestors of v in reverse topological order, stopping where a
  // label does not change. Returns the number of label_node calls.
  std::size_t relabel(const KripkeStructure& k, Labeling& lab, const std::vector<StateId>& v,
                      std::size_t* ancestor_count = nullptr, LabelUndo* undo = nullptr) const;

  bool check_init(const KripkeStructure& k, const Labeling& lab) const;

  CheckResult model_check(const KripkeStructure& k) const;
  CheckResult incr_model_check(const KripkeStructure& k, const UpdateDelta& u,
                               Labeling lab) const;
  // Same, updating lab in place; the result carries no labeling.
  CheckResult incr_model_check_in_place(const KripkeStructure& k, const UpdateDelta& u,
                                        Labeling& lab, LabelUndo* undo = nullptr) const;

  // Initial state to sink, following the children that explain a violating
  // MCS. Empty when every initial label satisfies the formula.
  std::vector<StateId> extract_counterexample(const KripkeStructure& k,
                                              const Labeling& lab) const;

  bool member_phi(ltl::Mcs m) const { return closure_.member(m, root_.first, root_.second); }

 private:
  std::uint64_t atom_bits(const KripkeStructure& k, StateId q) const;

  ltl::FormulaPtr phi_;
  ltl::ExtendedClosure closure_;
  std::pair<int, bool> root_;
  std::vector<int> atom_pairs_;
};

std::vector<ltl::Position> trace_positions(const KripkeStructure& k,
                                           const std::vector<StateId>& trace);

}  // namespace netupd
