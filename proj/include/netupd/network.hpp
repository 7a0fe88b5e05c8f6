#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace netupd {

using SwitchId = std::uint32_t;
using PortId = std::uint32_t;
using HostId = std::uint32_t;

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Declared header-field universe: field i ranges over [0, max_values[i]].
struct FieldSchema {
  std::vector<std::string> names;
  std::vector<std::uint32_t> max_values;

  std::optional<std::size_t> index_of(const std::string& name) const;
  std::size_t size() const { return names.size(); }
  bool operator==(const FieldSchema&) const = default;
};

struct Packet {
  std::vector<std::uint32_t> fields;
  std::uint32_t epoch = 0;
  // Tracking id used by the simulator to rebuild single-packet traces. Not
  // part of packet identity.
  std::uint64_t tag = 0;

  bool operator==(const Packet& o) const {
    return fields == o.fields && epoch == o.epoch;
  }
};

struct FieldTest {
  std::size_t field = 0;
  std::uint32_t value = 0;
  auto operator<=>(const FieldTest&) const = default;
};

struct Pattern {
  std::optional<PortId> in_port;
  std::vector<FieldTest> fields;  // sorted by field index

  bool matches(const Packet& pkt, PortId pt) const;
  auto operator<=>(const Pattern&) const = default;
};

struct Action {
  enum class Kind : std::uint8_t { Forward, SetField };
  Kind kind = Kind::Forward;
  PortId port = 0;
  std::size_t field = 0;
  std::uint32_t value = 0;

  static Action forward(PortId pt) { return {Kind::Forward, pt, 0, 0}; }
  static Action set_field(std::size_t f, std::uint32_t v) {
    return {Kind::SetField, 0, f, v};
  }
  auto operator<=>(const Action&) const = default;
};

struct Rule {
  std::uint32_t priority = 0;
  Pattern pattern;
  std::vector<Action> actions;  // empty = drop

  auto operator<=>(const Rule&) const = default;
};

// Canonical rule order: descending priority, then structural order. The
// lookup tie-break among equal-priority matches is the first rule in this
// order, so a table's behavior depends only on its rule set.
bool canonical_less(const Rule& a, const Rule& b);

class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }
  std::size_t size() const { return rules_.size(); }
  bool contains(const Rule& r) const;

  bool operator==(const Table&) const = default;

 private:
  std::vector<Rule> rules_;
};

using PacketPort = std::pair<Packet, PortId>;

// Denotation of a table: the output multiset of the single selected rule.
std::vector<PacketPort> lookup(const Table& tbl, const Packet& pkt, PortId pt);

// Index of the rule lookup selects, if any.
std::optional<std::size_t> select_rule(const Table& tbl, const Packet& pkt,
                                       PortId pt);

struct Location {
  enum class Kind : std::uint8_t { Host, Port };
  Kind kind = Kind::Host;
  std::uint32_t id = 0;  // host id or switch id
  PortId port = 0;

  static Location host(HostId h) { return {Kind::Host, h, 0}; }
  static Location at(SwitchId sw, PortId pt) { return {Kind::Port, sw, pt}; }
  bool is_host() const { return kind == Kind::Host; }
  std::string to_string() const;
  static Location parse(const std::string& text);
  auto operator<=>(const Location&) const = default;
};

struct Switch {
  SwitchId id = 0;
  std::string name;
  Table table;
  std::vector<PacketPort> buffered;
};

struct Link {
  Location from;
  Location to;
  std::deque<Packet> packets;
};

struct RuleDelta {
  SwitchId sw = 0;
  std::vector<Rule> removals;
  std::vector<Rule> additions;
};

struct SwitchUpdate {
  SwitchId sw = 0;
  Table table;
};
struct RuleUpdate {
  RuleDelta delta;
};
struct Incr {};
struct Flush {};
// incr followed by flush.
struct Wait {};

using Command = std::variant<SwitchUpdate, RuleUpdate, Incr, Flush, Wait>;

bool is_update(const Command& c);
bool is_wait(const Command& c);
SwitchId command_switch(const Command& c);
std::string command_to_string(const Command& c);

struct Controller {
  std::vector<Command> cmds;
  std::uint32_t epoch = 0;
};

// A set of packets fixed by a partial valuation of header fields.
struct TrafficClass {
  std::uint32_t id = 0;
  std::string name;
  std::vector<FieldTest> constraint;  // sorted by field index

  bool contains(const Packet& pkt) const;
  std::optional<std::uint32_t> fixed_value(std::size_t field) const;
};

class Network {
 public:
  FieldSchema fields;
  std::vector<Switch> switches;  // sorted by id
  std::vector<Link> links;
  std::vector<HostId> hosts;
  Controller controller;
  std::vector<TrafficClass> classes;

  const Switch* find_switch(SwitchId id) const;
  Switch* find_switch(SwitchId id);
  std::size_t switch_index(SwitchId id) const;  // throws NetworkError

  // Link leaving / entering a switch port, if one exists.
  const Link* link_from(const Location& loc) const;
  const Link* link_to(const Location& loc) const;

  bool is_static() const { return controller.cmds.empty(); }
  bool is_stable() const;
  bool has_packets() const;
  // Same forwarding state with all packets removed and an empty controller.
  Network configuration() const;

  // Globally numbered switch ports: every (sw, pt) endpoint of some link,
  // sorted by (sw, pt). The index is the `port=ID` atom id.
  std::vector<std::pair<SwitchId, PortId>> global_ports() const;
  std::optional<std::uint32_t> global_port_id(SwitchId sw, PortId pt) const;

  void sort_switches();
};

// N[sw <- tbl]. Throws NetworkError on an unknown switch.
Network apply_switch_update(const Network& net, SwitchId sw, Table tbl);

// Removals (one equal rule each) then additions, atomically.
Table apply_rule_delta(const Table& tbl, const RuleDelta& delta);

struct ConfigDiff {
  std::vector<SwitchUpdate> updates;  // ascending switch id
  std::vector<RuleDelta> deltas;      // aggregate delta per updated switch
};

// Throws NetworkError when the switch sets differ.
ConfigDiff config_diff(const Network& initial, const Network& final_net);

// Split one switch's change into single-rule steps. A removal and an
// addition sharing priority and pattern form one in-place modification.
std::vector<RuleDelta> rule_units(SwitchId sw, const Table& from,
                                  const Table& to);

// Empty when every structural invariant holds.
std::vector<std::string> validate_network(const Network& net);

// Packets of a class that can be told apart by some pattern in the network:
// free fields range over the values any pattern tests plus one untested value.
std::vector<Packet> class_representatives(const Network& net,
                                          const TrafficClass& cls);

std::optional<std::size_t> class_of(const std::vector<TrafficClass>& classes,
                                    const Packet& pkt);

}  // namespace netupd
