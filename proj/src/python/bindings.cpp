#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netupd/checker.hpp"
#include "netupd/io.hpp"
#include "netupd/kripke.hpp"
#include "netupd/scenario.hpp"
#include "netupd/semantics.hpp"
#include "netupd/synth.hpp"
#include "netupd/topology.hpp"
#include "netupd/waitrm.hpp"

namespace py = pybind11;
using namespace netupd;

// Everything crosses the boundary as JSON text; the Python package wraps
// these with json.loads / json.dumps.
namespace {

Network net_of(const std::string& text) { return network_from_json(json::parse(text)); }

ltl::FormulaPtr phi_of(const std::string& text, const Network& net) {
  auto t = text.find_first_not_of(" \t\n");
  if (t != std::string::npos && (text[t] == '{' || text[t] == '"'))
    return property_from_json(json::parse(text), net);
  return ltl::parse(text, &net);
}

json stats_json(const SynthStats& s) {
  return {{"nodes", s.nodes},
          {"checker_calls", s.checker_calls},
          {"pruned", s.pruned},
          {"relabeled", s.relabeled},
          {"ancestors", s.ancestors},
          {"loops_rejected", s.loops_rejected},
          {"w_cubes", s.w_cubes},
          {"constraints", s.constraints},
          {"checker_seconds", s.checker_seconds},
          {"wall_seconds", s.wall_seconds}};
}

std::string order_update_json(const std::string& initial, const std::string& final_net,
                              const std::string& property, const std::string& granularity,
                              bool prune, bool early_term, bool incremental, double timeout) {
  Network n_i = net_of(initial), n_f = net_of(final_net);
  SynthOptions o;
  o.granularity = parse_granularity(granularity);
  o.prune = prune;
  o.early_term = early_term;
  o.incremental = incremental;
  o.timeout_seconds = timeout;
  auto phi = phi_of(property, n_i);
  SynthResult r;
  {
    py::gil_scoped_release nogil;
    r = order_update(n_i, n_f, phi, o);
  }
  json j = {{"ok", r.ok},
            {"commands", to_json(r.cmds, n_i.fields)},
            {"early_terminated", r.early_terminated},
            {"timed_out", r.timed_out},
            {"diagnostic", r.diagnostic},
            {"stats", stats_json(r.stats)}};
  return j.dump();
}

std::string model_check_json(const std::string& network, const std::string& property) {
  Network net = net_of(network);
  auto phi = phi_of(property, net);
  json j;
  try {
    auto k = build_kripke(net);
    auto r = Checker(phi).model_check(k);
    json cex = json::array();
    for (auto q : r.counterexample) cex.push_back(state_name(k, q));
    j = {{"ok", r.ok}, {"loop", false}, {"states", k.size()}, {"counterexample", cex}};
  } catch (const LoopError&) {
    j = {{"ok", false}, {"loop", true}, {"states", 0}, {"counterexample", json::array()}};
  }
  return j.dump();
}

std::string remove_waits_json(const std::string& initial, const std::string& cmds,
                              const std::string& property) {
  Network n_i = net_of(initial);
  auto c = commands_from_json(json::parse(cmds), n_i.fields);
  auto r = remove_waits(n_i, c, phi_of(property, n_i));
  return json{{"commands", to_json(r.cmds, n_i.fields)},
              {"waits_before", r.waits_before},
              {"removed", r.removed},
              {"retained", r.retained},
              {"fallback", r.fallback},
              {"seconds", r.seconds}}
      .dump();
}

std::string verify_json(const std::string& initial, const std::string& cmds,
                        const std::string& property) {
  Network n_i = net_of(initial);
  auto c = commands_from_json(json::parse(cmds), n_i.fields);
  auto phi = phi_of(property, n_i);
  auto v = is_careful(c) ? oracle_verify(n_i, c, phi) : oracle_verify_windowed(n_i, c, phi);
  return json{{"ok", v.ok},
              {"config_index", v.config_index},
              {"loop", v.loop},
              {"message", v.message},
              {"traces_checked", v.traces_checked},
              {"trace", to_json(v.trace)}}
      .dump();
}

std::string simulate_json(const std::string& network, const std::string& cmds, std::uint64_t seed,
                          std::size_t inject) {
  Network net = net_of(network);
  auto c = commands_from_json(json::parse(cmds), net.fields);
  SimOptions o;
  o.seed = seed;
  o.inject = inject;
  auto r = run_commands(net, c, o);
  return json{{"steps", r.steps}, {"traces", to_json(r.traces)}, {"final", to_json(r.state.net.configuration())}}
      .dump();
}

std::string diamond_json(std::size_t n, std::size_t k, double p, const std::string& kind,
                         std::size_t pairs, bool double_diamond, std::uint64_t seed) {
  DiamondOptions o;
  o.kind = ltl::parse_property_kind(kind);
  o.pairs = pairs;
  o.double_diamond = double_diamond;
  o.seed = seed;
  return to_json(gen_diamond_scenario(gen_smallworld(n, k, p, seed), o)).dump();
}

std::string example_json(bool waypoint) {
  Network red = example::red_config();
  Scenario sc;
  sc.name = "two-pod example";
  sc.initial = red;
  sc.final_net = waypoint ? example::blue_config() : example::green_config();
  sc.phi = waypoint ? example::reachability_and_waypoint(red) : example::reachability(red);
  sc.kind = waypoint ? ltl::PropertyKind::Waypoint : ltl::PropertyKind::Reachability;
  return to_json(sc).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<TopologyError>(m, "TopologyError", PyExc_ValueError);
  py::register_exception<ltl::LtlError>(m, "LtlError", PyExc_ValueError);
  py::register_exception<KripkeError>(m, "KripkeError", PyExc_RuntimeError);
  py::register_exception<LoopError>(m, "LoopError", PyExc_RuntimeError);
  py::register_exception<NetworkError>(m, "NetworkError", PyExc_ValueError);
  py::register_exception<SimError>(m, "SimError", PyExc_RuntimeError);

  m.def("order_update", &order_update_json, py::arg("initial"), py::arg("final"), py::arg("property"),
        py::arg("granularity") = "switch", py::arg("prune") = true, py::arg("early_term") = true,
        py::arg("incremental") = true, py::arg("timeout") = 0.0);
  m.def("model_check", &model_check_json, py::arg("network"), py::arg("property"));
  m.def("remove_waits", &remove_waits_json, py::arg("initial"), py::arg("commands"), py::arg("property"));
  m.def("verify", &verify_json, py::arg("initial"), py::arg("commands"), py::arg("property"));
  m.def("simulate", &simulate_json, py::arg("network"), py::arg("commands"), py::arg("seed") = 0,
        py::arg("inject") = 16);
  m.def("diamond", &diamond_json, py::arg("n"), py::arg("k") = 4, py::arg("p") = 0.1,
        py::arg("kind") = "reachability", py::arg("pairs") = 1, py::arg("double_diamond") = false,
        py::arg("seed") = 0);
  m.def("example", &example_json, py::arg("waypoint") = false);
  m.def("fattree", [](unsigned k) { return to_json(gen_fattree(k)).dump(); }, py::arg("k"));
  m.def("smallworld",
        [](std::size_t n, std::size_t k, double p, std::uint64_t seed) {
          return to_json(gen_smallworld(n, k, p, seed)).dump();
        },
        py::arg("n"), py::arg("k") = 4, py::arg("p") = 0.1, py::arg("seed") = 0);
  m.def("parse_gml", [](const std::string& text) {
    auto r = parse_gml(text);
    return json{{"topology", to_json(r.topo)}, {"warnings", r.warnings}}.dump();
  });
  m.def("normalize_formula", [](const std::string& text) { return ltl::to_string(ltl::parse(text)); });
}
