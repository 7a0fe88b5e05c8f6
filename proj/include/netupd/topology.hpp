#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netupd/network.hpp"

namespace netupd {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Undirected switch graph with host attachments.
struct Topology {
  std::string source;  // fattree(k), smallworld(n,k,p), gml(...), ...
  std::vector<std::string> names;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // a < b, sorted, unique
  std::vector<std::uint32_t> hosts;  // hosts attached per node

  std::size_t size() const { return names.size(); }
  std::size_t host_count() const;
  std::vector<std::vector<std::size_t>> adjacency() const;
  bool connected() const;
  void add_edge(std::size_t a, std::size_t b);  // ignores duplicates and self-loops
};

Topology gen_fattree(unsigned k);
Topology gen_smallworld(std::size_t n, std::size_t k, double p, std::uint64_t seed);

struct GmlResult {
  Topology topo;
  std::vector<std::string> warnings;
};

// Nodes flagged with `host 1`, or of degree one when none are flagged, get a
// host. Throws TopologyError with the line number on malformed input.
GmlResult parse_gml(const std::string& text);

// Switch i gets id i+1 and ports 1.. in neighbor order, then its host ports.
// Hosts are numbered 1.. in node order. Declares a single `dst` field.
Network to_network(const Topology& topo);

std::optional<PortId> port_toward(const Network& net, SwitchId from, SwitchId to);
std::optional<PortId> host_port(const Network& net, SwitchId sw, HostId h);
std::optional<SwitchId> host_switch(const Network& net, HostId h);
std::vector<HostId> hosts_at(const Network& net, SwitchId sw);

// Rules matching dst=h along `path`, ending at h's port on the last switch.
void install_route(Network& net, const std::vector<SwitchId>& path, HostId dst,
                   std::uint32_t priority = 1);
// Drops every rule matching dst=h on the given switches.
void remove_route(Network& net, const std::vector<SwitchId>& switches, HostId dst);

}  // namespace netupd
