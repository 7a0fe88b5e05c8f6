#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netupd/network.hpp"

namespace netupd::ltl {

class LtlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Atomic propositions over a packet position.
struct Atom {
  enum class Kind : std::uint8_t { Switch, Port, Field, Dropped, Prop };
  Kind kind = Kind::Switch;
  SwitchId sw = 0;
  PortId port = 0;
  std::string field;
  std::uint32_t value = 0;

  static Atom at_switch(SwitchId s) { return {Kind::Switch, s, 0, {}, 0}; }
  static Atom at_port(SwitchId s, PortId p) { return {Kind::Port, s, p, {}, 0}; }
  static Atom field_eq(std::string f, std::uint32_t v) {
    return {Kind::Field, 0, 0, std::move(f), v};
  }
  static Atom dropped() { return {Kind::Dropped, 0, 0, {}, 0}; }
  // Free proposition, for structures not derived from a network.
  static Atom prop(std::uint32_t idx) { return {Kind::Prop, 0, 0, {}, idx}; }

  std::string to_string() const;
  auto operator<=>(const Atom&) const = default;
};

enum class Op : std::uint8_t { True, False, Atom, NegAtom, And, Or, Next, Until, Release };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// NNF formula node. Negation appears only on atoms.
class Formula {
 public:
  Op op() const { return op_; }
  const Atom& atom() const { return atom_; }
  const FormulaPtr& lhs() const { return lhs_; }
  const FormulaPtr& rhs() const { return rhs_; }
  // Operand of X.
  const FormulaPtr& arg() const { return lhs_; }
  const std::string& key() const { return key_; }

  Formula(Op op, Atom atom, FormulaPtr lhs, FormulaPtr rhs);

 private:
  Op op_;
  Atom atom_;
  FormulaPtr lhs_, rhs_;
  std::string key_;  // canonical text, used for structural identity
};

FormulaPtr tt();
FormulaPtr ff();
FormulaPtr atom(Atom a);
FormulaPtr neg_atom(Atom a);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr next(FormulaPtr a);
FormulaPtr until(FormulaPtr a, FormulaPtr b);
FormulaPtr release(FormulaPtr a, FormulaPtr b);
FormulaPtr eventually(FormulaPtr a);  // true U a
FormulaPtr globally(FormulaPtr a);    // false R a
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
// NNF negation (De Morgan and U/R duality).
FormulaPtr negate(const FormulaPtr& f);

FormulaPtr conj_all(const std::vector<FormulaPtr>& fs);
FormulaPtr disj_all(const std::vector<FormulaPtr>& fs);

bool same(const FormulaPtr& a, const FormulaPtr& b);
std::string to_string(const FormulaPtr& f);
std::size_t formula_size(const FormulaPtr& f);
std::vector<Atom> atoms_of(const FormulaPtr& f);

// Parses `!, &, |, ->, X, U, R, F, G`, parentheses, `true`, `false`, and
// atoms `sw=N`, `port=sN:pM`, `port=ID` (global port id), `field NAME=N`,
// `drop`, `prop=N`. Numeric port ids are resolved against `net` when given.
FormulaPtr parse(const std::string& text, const Network* net = nullptr);

// Bits over the closure's formula pairs: bit i set iff the pair's canonical
// member is in the set, otherwise its negation is.
struct Mcs {
  std::uint64_t bits = 0;
  auto operator<=>(const Mcs&) const = default;
};

// Extended closure, stored as negation pairs in bottom-up order.
class ExtendedClosure {
 public:
  struct Pair {
    FormulaPtr pos;  // canonical member
    FormulaPtr neg;
    // Operand pairs with polarity (true = canonical member).
    int lhs = -1, rhs = -1;
    bool lhs_pol = true, rhs_pol = true;
  };

  explicit ExtendedClosure(const FormulaPtr& phi);

  const FormulaPtr& root() const { return root_; }
  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t size() const { return 2 * pairs_.size(); }
  std::vector<FormulaPtr> formulas() const;

  // (pair index, polarity) of a closure member.
  std::optional<std::pair<int, bool>> find(const FormulaPtr& f) const;
  bool contains(Mcs m, const FormulaPtr& f) const;
  bool member(Mcs m, int pair, bool pol) const {
    return (((m.bits >> pair) & 1u) != 0) == pol;
  }

  // Pairs whose truth is not forced by their operands.
  std::vector<int> free_pairs() const;
  std::vector<int> atom_pairs() const;
  std::vector<int> temporal_pairs() const;

 private:
  int intern(const FormulaPtr& f);
  FormulaPtr root_;
  std::vector<Pair> pairs_;
  std::vector<std::pair<std::string, std::pair<int, bool>>> index_;  // sorted by key
};

ExtendedClosure ecl(const FormulaPtr& phi);
std::vector<Mcs> max_consistent_sets(const ExtendedClosure& c);
bool follows(const ExtendedClosure& c, Mcs m1, Mcs m2);

// One packet position: the location, the traffic class, and whether the
// packet was dropped there.
struct Position {
  SwitchId sw = 0;
  PortId port = 0;
  std::uint32_t cls = 0;
  bool dropped = false;
  std::uint64_t props = 0;  // bit i = prop=i
  auto operator<=>(const Position&) const = default;
};

// Atom truth at a position. Field atoms must be decided by the class.
bool eval_atom(const Atom& a, const Position& p, const std::vector<TrafficClass>& classes,
               const FieldSchema& fields);

// Throws LtlError if a field atom is undecidable for some class.
void check_decidable(const FormulaPtr& phi, const std::vector<TrafficClass>& classes,
                     const FieldSchema& fields);

// LTL over the infinite extension repeating the final position.
bool eval_finite(const std::vector<Position>& trace, const FormulaPtr& phi,
                 const std::vector<TrafficClass>& classes, const FieldSchema& fields);

enum class PropertyKind { Reachability, Waypoint, ServiceChain };

PropertyKind parse_property_kind(const std::string& s);
std::string to_string(PropertyKind k);

// (src) => F dst; (src) => (!dst U (w & F dst)); (src) => way(W, dst).
// `guard`, when set, is conjoined to the antecedent.
FormulaPtr build_property(PropertyKind kind, const FormulaPtr& src, const FormulaPtr& dst,
                          const std::vector<FormulaPtr>& waypoints,
                          const FormulaPtr& guard = nullptr);

}  // namespace netupd::ltl
