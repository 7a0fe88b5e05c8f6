#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netupd/ltl.hpp"
#include "netupd/network.hpp"
#include "netupd/topology.hpp"

namespace netupd {

// Two-pod example: cores C1, C2 (ids 1, 2), aggregation A1..A4 (3..6),
// top-of-rack T1..T4 (7..10) with hosts h1..h4 attached to T1..T4.
namespace example {
constexpr SwitchId C1 = 1, C2 = 2, A1 = 3, A2 = 4, A3 = 5, A4 = 6, T1 = 7, T2 = 8, T3 = 9,
                   T4 = 10;
Topology topology();
// No rules; one traffic class `h3` (dst = 3).
Network base_network();
Network red_config();    // T1-A1-C1-A3-T3
Network green_config();  // T1-A1-C2-A3-T3
Network blue_config();   // T1-A2-C1-A4-T3, A1/A3 keep their rules
// h1 reaches h3.
ltl::FormulaPtr reachability(const Network& net);
// h1 reaches h3 and passes A2 or A3 first.
ltl::FormulaPtr reachability_and_waypoint(const Network& net);
}  // namespace example

struct Scenario {
  std::string name;
  Network initial;
  Network final_net;
  ltl::FormulaPtr phi;
  ltl::PropertyKind kind = ltl::PropertyKind::Reachability;
  std::uint64_t seed = 0;
  std::size_t pairs = 0;
  bool double_diamond = false;
  std::vector<std::vector<SwitchId>> initial_paths, final_paths;
  std::vector<std::vector<SwitchId>> waypoints;  // per pair
};

struct DiamondOptions {
  std::size_t pairs = 1;
  ltl::PropertyKind kind = ltl::PropertyKind::Reachability;
  std::size_t chain_length = 2;  // waypoints for service chains
  bool double_diamond = false;
  std::uint64_t seed = 0;
  unsigned retries = 50;
  std::size_t min_interior = 1;  // interior nodes required on each path
};

// Two vertex-disjoint s-d paths avoiding `blocked`, or empty.
std::vector<std::vector<std::size_t>> disjoint_paths(const Topology& topo, std::size_t s,
                                                     std::size_t d,
                                                     const std::vector<char>& blocked,
                                                     std::uint64_t seed);

// Each pair is migrated from its initial path to a vertex-disjoint final
// path. Throws TopologyError when no pair admits disjoint paths.
Scenario gen_diamond_scenario(const Topology& topo, const DiamondOptions& opts);

}  // namespace netupd
