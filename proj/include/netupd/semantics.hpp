#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netupd/ltl.hpp"
#include "netupd/network.hpp"

namespace netupd {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Observation {
  SwitchId sw = 0;
  PortId pt = 0;
  Packet pkt;
  bool operator==(const Observation& o) const {
    return sw == o.sw && pt == o.pt && pkt == o.pkt;
  }
};

enum class StepKind : std::uint8_t { In, Out, Process, Forward, Update, Incr, Flush };
std::string to_string(StepKind k);

struct LogEntry {
  StepKind kind = StepKind::In;
  std::optional<Observation> obs;
  std::uint64_t tag = 0;              // packet acted on
  std::vector<std::uint64_t> children;  // Process outputs
  bool discarded = false;             // Forward to an unlinked port
};

struct SimState {
  Network net;
  std::vector<LogEntry> log;
  std::uint64_t next_tag = 1;
};

// One enabled transition, addressed by element indices.
struct StepChoice {
  StepKind kind = StepKind::In;
  std::size_t element = 0;  // link or switch index
  std::size_t item = 0;     // representative packet or buffered pair
};

struct SinglePacketTrace {
  std::vector<Observation> obs;
  bool dropped = false;

  std::vector<ltl::Position> positions(const std::vector<TrafficClass>& classes) const;
  bool operator==(const SinglePacketTrace& o) const {
    return obs == o.obs && dropped == o.dropped;
  }
};

// In-able packets: the class representatives of every traffic class.
std::vector<Packet> ingress_packets(const Network& net);

std::vector<StepChoice> enabled_steps(const SimState& s, const std::vector<Packet>& universe,
                                      bool allow_in = true);
void apply_step(SimState& s, const StepChoice& c, const std::vector<Packet>& universe);
std::vector<std::pair<StepKind, SimState>> enumerate_steps(const SimState& s);

// Installs cmds on the controller (wait expands to incr; flush).
SimState make_sim_state(const Network& net, const std::vector<Command>& cmds);

struct SimOptions {
  std::uint64_t seed = 0;
  std::size_t max_steps = 100000;
  std::size_t inject = 16;  // In events available to the scheduler
};

struct SimResult {
  SimState state;
  std::vector<SinglePacketTrace> traces;
  std::size_t steps = 0;
};

// Random scheduler. Throws SimError when the step bound is hit.
SimResult run_commands(const Network& net, const std::vector<Command>& cmds,
                       const SimOptions& opts);

std::vector<SinglePacketTrace> traces_from_log(const std::vector<LogEntry>& log);

struct ExploreResult {
  std::vector<SinglePacketTrace> traces;  // distinct completed traces
  std::size_t states = 0;
  bool truncated = false;
};

// Every interleaving with at most `max_packets` injections.
ExploreResult explore_adversarial(const Network& net, const std::vector<Command>& cmds,
                                  std::size_t max_packets, std::size_t max_states = 500000);

class TraceLoopError : public SimError {
 public:
  TraceLoopError(const std::string& msg, SinglePacketTrace t)
      : SimError(msg), trace(std::move(t)) {}
  SinglePacketTrace trace;
};

// Exhaustive static traces from every host ingress and class
// representative. `bound` = 0 picks 2 * switches + 2 observations.
std::vector<SinglePacketTrace> single_packet_traces(const Network& net, std::size_t bound = 0);

bool is_careful(const std::vector<Command>& cmds);
bool is_simple(const std::vector<Command>& cmds);
std::vector<Command> make_careful(const std::vector<Command>& cmds);

struct OracleVerdict {
  bool ok = true;
  std::size_t config_index = 0;  // 1-based induced configuration or window
  SinglePacketTrace trace;
  bool loop = false;
  std::string message;
  std::size_t traces_checked = 0;
};

// Careful sequences only (throws SimError otherwise).
OracleVerdict oracle_verify(const Network& n_i, const std::vector<Command>& cmds,
                            const ltl::FormulaPtr& phi);

// Any sequence: windows between waits are checked with every monotone mix
// of the configurations inside the window.
OracleVerdict oracle_verify_windowed(const Network& n_i, const std::vector<Command>& cmds,
                                     const ltl::FormulaPtr& phi,
                                     std::size_t max_traces = 2000000);

// Network after applying one update command.
Network apply_command(const Network& net, const Command& c);

}  // namespace netupd
