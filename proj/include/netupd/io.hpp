#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "netupd/ltl.hpp"
#include "netupd/network.hpp"
#include "netupd/scenario.hpp"
#include "netupd/semantics.hpp"
#include "netupd/topology.hpp"

namespace netupd {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

json to_json(const Table& tbl, const FieldSchema& fields);
Table table_from_json(const json& j, const FieldSchema& fields);

json to_json(const Network& net);
Network network_from_json(const json& j);

json to_json(const Command& c, const FieldSchema& fields);
Command command_from_json(const json& j, const FieldSchema& fields);
json to_json(const std::vector<Command>& cmds, const FieldSchema& fields);
std::vector<Command> commands_from_json(const json& j, const FieldSchema& fields);

// {"formula": text} or {"kind", "src", "dst", "waypoints", "guard"}.
json property_to_json(const ltl::FormulaPtr& phi);
ltl::FormulaPtr property_from_json(const json& j, const Network& net);

json to_json(const SinglePacketTrace& t);
json to_json(const std::vector<SinglePacketTrace>& ts);

json to_json(const Topology& t);
Topology topology_from_json(const json& j);

json to_json(const Scenario& sc);
Scenario scenario_from_json(const json& j);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
std::string read_text_file(const std::string& path);

}  // namespace netupd
