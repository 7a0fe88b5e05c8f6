#include "netupd/io.hpp"

#include <fstream>
#include <sstream>

namespace netupd {

namespace {

std::size_t field_index(const FieldSchema& fs, const std::string& name) {
  auto i = fs.index_of(name);
  if (!i) throw FormatError("unknown field '" + name + "'");
  return *i;
}

json fields_json(const std::vector<FieldTest>& tests, const FieldSchema& fs) {
  json j = json::object();
  for (const auto& t : tests) j[fs.names.at(t.field)] = t.value;
  return j;
}

std::vector<FieldTest> fields_from(const json& j, const FieldSchema& fs) {
  std::vector<FieldTest> out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out.push_back({field_index(fs, it.key()), it.value().get<std::uint32_t>()});
  std::sort(out.begin(), out.end());
  return out;
}

json rule_json(const Rule& r, const FieldSchema& fs) {
  json m = json::object();
  if (r.pattern.in_port) m["in_port"] = *r.pattern.in_port;
  if (!r.pattern.fields.empty()) m["fields"] = fields_json(r.pattern.fields, fs);
  json acts = json::array();
  for (const auto& a : r.actions) {
    if (a.kind == Action::Kind::Forward)
      acts.push_back({{"forward", a.port}});
    else
      acts.push_back({{"set", fs.names.at(a.field)}, {"value", a.value}});
  }
  return {{"priority", r.priority}, {"match", m}, {"actions", acts}};
}

Rule rule_from(const json& j, const FieldSchema& fs) {
  Rule r;
  r.priority = j.value("priority", 0u);
  if (j.contains("match")) {
    const auto& m = j.at("match");
    if (m.contains("in_port")) r.pattern.in_port = m.at("in_port").get<PortId>();
    if (m.contains("fields")) r.pattern.fields = fields_from(m.at("fields"), fs);
  }
  for (const auto& a : j.value("actions", json::array())) {
    if (a.contains("forward"))
      r.actions.push_back(Action::forward(a.at("forward").get<PortId>()));
    else if (a.contains("set"))
      r.actions.push_back(Action::set_field(field_index(fs, a.at("set").get<std::string>()),
                                            a.at("value").get<std::uint32_t>()));
    else
      throw FormatError("action needs 'forward' or 'set'");
  }
  return r;
}

std::vector<Rule> rules_from(const json& j, const FieldSchema& fs) {
  std::vector<Rule> out;
  for (const auto& r : j) out.push_back(rule_from(r, fs));
  return out;
}

json rules_json(const std::vector<Rule>& rs, const FieldSchema& fs) {
  json a = json::array();
  for (const auto& r : rs) a.push_back(rule_json(r, fs));
  return a;
}

json path_list(const std::vector<std::vector<SwitchId>>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(p);
  return a;
}

}  // namespace

json to_json(const Table& tbl, const FieldSchema& fields) { return rules_json(tbl.rules(), fields); }

Table table_from_json(const json& j, const FieldSchema& fields) {
  return Table(rules_from(j, fields));
}

json to_json(const Network& net) {
  json fields = json::array();
  for (std::size_t i = 0; i < net.fields.size(); ++i)
    fields.push_back({{"name", net.fields.names[i]}, {"max", net.fields.max_values[i]}});
  json sws = json::array();
  for (const auto& s : net.switches) {
    json js = {{"id", s.id}, {"rules", to_json(s.table, net.fields)}};
    if (!s.name.empty()) js["name"] = s.name;
    sws.push_back(js);
  }
  json links = json::array();
  for (const auto& l : net.links)
    links.push_back({{"from", l.from.to_string()}, {"to", l.to.to_string()}});
  json classes = json::array();
  for (const auto& c : net.classes)
    classes.push_back({{"id", c.id}, {"name", c.name}, {"match", fields_json(c.constraint, net.fields)}});
  json j = {{"fields", fields}, {"switches", sws}, {"links", links}, {"hosts", net.hosts}};
  if (!net.classes.empty()) j["classes"] = classes;
  return j;
}

Network network_from_json(const json& j) {
  try {
    Network net;
    for (const auto& f : j.value("fields", json::array())) {
      net.fields.names.push_back(f.at("name").get<std::string>());
      net.fields.max_values.push_back(f.at("max").get<std::uint32_t>());
    }
    for (const auto& s : j.at("switches")) {
      Switch sw;
      sw.id = s.at("id").get<SwitchId>();
      sw.name = s.value("name", std::string{});
      sw.table = table_from_json(s.value("rules", json::array()), net.fields);
      net.switches.push_back(std::move(sw));
    }
    net.sort_switches();
    for (const auto& l : j.value("links", json::array()))
      net.links.push_back({Location::parse(l.at("from").get<std::string>()),
                           Location::parse(l.at("to").get<std::string>()),
                           {}});
    net.hosts = j.value("hosts", std::vector<HostId>{});
    for (const auto& c : j.value("classes", json::array()))
      net.classes.push_back({c.at("id").get<std::uint32_t>(), c.value("name", std::string{}),
                             fields_from(c.value("match", json::object()), net.fields)});
    auto problems = validate_network(net);
    if (!problems.empty()) throw FormatError("invalid network: " + problems.front());
    return net;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad network JSON: ") + e.what());
  }
}

json to_json(const Command& c, const FieldSchema& fields) {
  if (auto* u = std::get_if<SwitchUpdate>(&c))
    return {{"op", "update"}, {"switch", u->sw}, {"rules", to_json(u->table, fields)}};
  if (auto* r = std::get_if<RuleUpdate>(&c))
    return {{"op", "rule-update"},
            {"switch", r->delta.sw},
            {"remove", rules_json(r->delta.removals, fields)},
            {"add", rules_json(r->delta.additions, fields)}};
  if (std::holds_alternative<Incr>(c)) return {{"op", "incr"}};
  if (std::holds_alternative<Flush>(c)) return {{"op", "flush"}};
  return {{"op", "wait"}};
}

Command command_from_json(const json& j, const FieldSchema& fields) {
  try {
    auto op = j.at("op").get<std::string>();
    if (op == "update")
      return SwitchUpdate{j.at("switch").get<SwitchId>(), table_from_json(j.at("rules"), fields)};
    if (op == "rule-update") {
      RuleDelta d;
      d.sw = j.at("switch").get<SwitchId>();
      d.removals = rules_from(j.value("remove", json::array()), fields);
      d.additions = rules_from(j.value("add", json::array()), fields);
      return RuleUpdate{d};
    }
    if (op == "wait") return Wait{};
    if (op == "incr") return Incr{};
    if (op == "flush") return Flush{};
    throw FormatError("unknown command op '" + op + "'");
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad command JSON: ") + e.what());
  }
}

json to_json(const std::vector<Command>& cmds, const FieldSchema& fields) {
  json a = json::array();
  for (const auto& c : cmds) a.push_back(to_json(c, fields));
  return a;
}

std::vector<Command> commands_from_json(const json& j, const FieldSchema& fields) {
  const json& arr = j.is_object() ? j.at("commands") : j;
  std::vector<Command> out;
  for (const auto& c : arr) out.push_back(command_from_json(c, fields));
  return out;
}

json property_to_json(const ltl::FormulaPtr& phi) { return {{"formula", ltl::to_string(phi)}}; }

ltl::FormulaPtr property_from_json(const json& j, const Network& net) {
  if (j.is_string()) return ltl::parse(j.get<std::string>(), &net);
  if (j.contains("formula")) return ltl::parse(j.at("formula").get<std::string>(), &net);
  try {
    auto kind = ltl::parse_property_kind(j.at("kind").get<std::string>());
    auto src = ltl::parse(j.at("src").get<std::string>(), &net);
    auto dst = ltl::parse(j.at("dst").get<std::string>(), &net);
    std::vector<ltl::FormulaPtr> ways;
    for (const auto& w : j.value("waypoints", json::array()))
      ways.push_back(ltl::parse(w.get<std::string>(), &net));
    ltl::FormulaPtr guard;
    if (j.contains("guard")) guard = ltl::parse(j.at("guard").get<std::string>(), &net);
    return ltl::build_property(kind, src, dst, ways, guard);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad property JSON: ") + e.what());
  }
}

json to_json(const SinglePacketTrace& t) {
  json obs = json::array();
  for (const auto& o : t.obs) obs.push_back({{"sw", o.sw}, {"pt", o.pt}, {"pkt", o.pkt.fields}});
  return {{"obs", obs}, {"dropped", t.dropped}};
}

json to_json(const std::vector<SinglePacketTrace>& ts) {
  json a = json::array();
  for (const auto& t : ts) a.push_back(to_json(t));
  return a;
}

json to_json(const Topology& t) {
  json edges = json::array();
  for (auto [a, b] : t.edges) edges.push_back({a, b});
  return {{"source", t.source}, {"names", t.names}, {"edges", edges}, {"hosts", t.hosts}};
}

Topology topology_from_json(const json& j) {
  try {
    Topology t;
    t.source = j.value("source", std::string{});
    t.names = j.at("names").get<std::vector<std::string>>();
    for (const auto& e : j.at("edges")) t.add_edge(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
    t.hosts = j.value("hosts", std::vector<std::uint32_t>(t.size(), 0));
    if (t.hosts.size() != t.size()) throw FormatError("hosts list does not match node count");
    return t;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad topology JSON: ") + e.what());
  }
}

json to_json(const Scenario& sc) {
  return {{"name", sc.name},
          {"kind", ltl::to_string(sc.kind)},
          {"seed", sc.seed},
          {"pairs", sc.pairs},
          {"double_diamond", sc.double_diamond},
          {"initial", to_json(sc.initial)},
          {"final", to_json(sc.final_net)},
          {"property", property_to_json(sc.phi)},
          {"initial_paths", path_list(sc.initial_paths)},
          {"final_paths", path_list(sc.final_paths)},
          {"waypoints", path_list(sc.waypoints)}};
}

Scenario scenario_from_json(const json& j) {
  try {
    Scenario sc;
    sc.name = j.value("name", std::string{});
    if (j.contains("kind")) sc.kind = ltl::parse_property_kind(j.at("kind").get<std::string>());
    sc.seed = j.value("seed", std::uint64_t{0});
    sc.pairs = j.value("pairs", std::size_t{0});
    sc.double_diamond = j.value("double_diamond", false);
    sc.initial = network_from_json(j.at("initial"));
    sc.final_net = network_from_json(j.at("final"));
    sc.phi = property_from_json(j.at("property"), sc.initial);
    using Paths = std::vector<std::vector<SwitchId>>;
    sc.initial_paths = j.value("initial_paths", Paths{});
    sc.final_paths = j.value("final_paths", Paths{});
    sc.waypoints = j.value("waypoints", Paths{});
    return sc;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad scenario JSON: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace netupd
