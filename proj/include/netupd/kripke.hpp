#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netupd/ltl.hpp"
#include "netupd/network.hpp"

namespace netupd {

class KripkeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LoopError : public KripkeError {
 public:
  LoopError(const std::string& msg, std::vector<std::uint32_t> cycle)
      : KripkeError(msg), cycle(std::move(cycle)) {}
  std::vector<std::uint32_t> cycle;
};

using StateId = std::uint32_t;

struct KState {
  // Ingress: a packet arriving at (sw, port). Egress: leaving (sw, port)
  // towards a host. Drop: discarded by sw after arriving on port.
  enum class Role : std::uint8_t { Ingress, Egress, Drop, Abstract };
  Role role = Role::Abstract;
  SwitchId sw = 0;
  PortId port = 0;
  std::uint32_t cls = 0;
  std::uint64_t props = 0;

  ltl::Position position() const {
    return {sw, port, cls, role == Role::Drop, props};
  }
};

struct KripkeStructure {
  std::vector<KState> states;
  std::vector<std::vector<StateId>> succ;  // sorted
  std::vector<std::vector<StateId>> pred;  // sorted
  std::vector<StateId> initial;            // sorted
  std::vector<TrafficClass> classes;
  FieldSchema fields;

  // Ingress states of each switch, keyed by position in `switch_ids`.
  std::vector<SwitchId> switch_ids;
  std::vector<std::vector<StateId>> ingress_of;
  std::vector<std::vector<StateId>> drop_of;  // parallel to ingress_of
  // Switch-side link endpoints, sorted by `from`.
  std::vector<std::pair<Location, Location>> out_links;

  std::size_t size() const { return states.size(); }
  std::size_t edge_count() const;
  bool is_sink(StateId q) const { return succ[q].size() == 1 && succ[q][0] == q; }
  std::optional<StateId> find_state(KState::Role role, SwitchId sw, PortId pt,
                                    std::uint32_t cls) const;

  bool atom_holds(StateId q, const ltl::Atom& a) const;
};

// Structure from explicit states and edges. Sinks must carry a self-loop.
KripkeStructure make_kripke(std::vector<KState> states,
                            const std::vector<std::pair<StateId, StateId>>& edges,
                            std::vector<StateId> initial,
                            std::vector<TrafficClass> classes = {},
                            FieldSchema fields = {});

// Declared classes, or one class per full field valuation when none are
// declared (at most 256).
std::vector<TrafficClass> effective_classes(const Network& net);

// Throws LoopError on a forwarding loop and KripkeError when a set-field
// action moves a packet into another class.
KripkeStructure build_kripke(const Network& net);

// Non-self-loop cycle, if any.
std::optional<std::vector<StateId>> check_dag(const KripkeStructure& k);
// Cycle reachable from `roots`, if any.
std::optional<std::vector<StateId>> find_cycle_from(const KripkeStructure& k,
                                                    const std::vector<StateId>& roots);

struct UpdateDelta {
  std::vector<StateId> changed;  // sorted
};

// Recompute the out-edges of sw's states from `net`'s table for sw. Does
// not check for cycles.
UpdateDelta refresh_switch(KripkeStructure& k, const Network& net, SwitchId sw);

struct SwUpdateResult {
  Network net;
  KripkeStructure k;
  UpdateDelta delta;
};

// Throws LoopError when the update closes a loop.
SwUpdateResult sw_update(const Network& net, const KripkeStructure& k, SwitchId sw,
                         const Table& tbl);
SwUpdateResult sw_update(const Network& net, const KripkeStructure& k,
                         const RuleDelta& delta);

// All states that reach some state of v, v included.
std::vector<StateId> ancestors(const KripkeStructure& k, const std::vector<StateId>& v);

// Topological order of `subset` (sources first), ignoring self-loops.
// Throws LoopError on a cycle inside the subset.
std::vector<StateId> topo_order(const KripkeStructure& k, const std::vector<StateId>& subset);

std::string state_name(const KripkeStructure& k, StateId q);
std::string to_dot(const KripkeStructure& k);

}  // namespace netupd
