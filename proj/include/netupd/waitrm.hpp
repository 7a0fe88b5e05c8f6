#pragma once

#include <string>
#include <vector>

#include "netupd/ltl.hpp"
#include "netupd/network.hpp"

namespace netupd {

// s0 -> s when a packet forwarded by s0 can later arrive at s.
struct ReachRelation {
  std::vector<SwitchId> switches;  // ascending
  std::vector<std::vector<char>> reach;

  bool reaches(SwitchId from, SwitchId to) const;
  std::vector<SwitchId> reached_from(SwitchId from) const;
};

// Transitive closure of the union of every class's forwarding graph.
ReachRelation inter_switch_reachability(const Network& net);

struct WaitRemovalOptions {
  bool verify_windows = true;
  std::size_t max_traces = 2000000;
};

struct WaitRemovalResult {
  std::vector<Command> cmds;
  std::size_t waits_before = 0;
  std::size_t removed = 0;
  std::size_t retained = 0;
  bool fallback = false;  // final verification failed, input returned
  std::string message;
  double seconds = 0;
};

WaitRemovalResult remove_waits(const Network& n_i, const std::vector<Command>& cmds,
                               const ltl::FormulaPtr& phi, const WaitRemovalOptions& opts = {});

}  // namespace netupd
