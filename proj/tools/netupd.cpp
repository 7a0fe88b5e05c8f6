#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "netupd/bench.hpp"
#include "netupd/checker.hpp"
#include "netupd/io.hpp"
#include "netupd/kripke.hpp"
#include "netupd/scenario.hpp"
#include "netupd/semantics.hpp"
#include "netupd/synth.hpp"
#include "netupd/topology.hpp"
#include "netupd/waitrm.hpp"

using namespace netupd;
namespace fs = std::filesystem;

namespace {

ltl::FormulaPtr load_property(const std::string& arg, const Network& net) {
  if (fs::exists(arg)) {
    std::string text = read_text_file(arg);
    try {
      json j = json::parse(text);
      if (j.is_object() && j.contains("property")) return property_from_json(j.at("property"), net);
      return property_from_json(j, net);
    } catch (const json::parse_error&) {
      return ltl::parse(text, &net);
    }
  }
  return ltl::parse(arg, &net);
}

Network load_network(const std::string& path) {
  json j = read_json_file(path);
  if (j.contains("initial") && !j.contains("switches")) return network_from_json(j.at("initial"));
  return network_from_json(j);
}

void emit(const std::string& path, const json& j) {
  if (path.empty() || path == "-")
    std::cout << j.dump(2) << "\n";
  else
    write_json_file(path, j);
}

Topology make_topology(const std::string& type, unsigned k, std::size_t n, double p,
                       std::uint64_t seed, const std::string& gml) {
  if (type == "fattree") return gen_fattree(k);
  if (type == "smallworld") return gen_smallworld(n, k, p, seed);
  if (type == "gml") {
    auto r = parse_gml(read_text_file(gml));
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    return r.topo;
  }
  if (type == "example") return example::topology();
  throw std::invalid_argument("unknown topology type '" + type + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network update synthesis toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate topologies, networks and scenarios");
  std::string g_what = "scenario", g_type = "smallworld", g_kind = "reachability", g_gml, g_out = "-";
  unsigned g_k = 4;
  std::size_t g_n = 50, g_pairs = 1, g_chain = 2;
  double g_p = 0.1;
  std::uint64_t g_seed = 0;
  bool g_double = false;
  gen->add_option("what", g_what, "topology | network | scenario | example")
      ->check(CLI::IsMember({"topology", "network", "scenario", "example"}));
  gen->add_option("--type", g_type, "smallworld | fattree | gml | example");
  gen->add_option("--k", g_k, "small-world degree or fat-tree arity");
  gen->add_option("--n", g_n, "small-world node count");
  gen->add_option("--p", g_p, "small-world rewiring probability");
  gen->add_option("--gml", g_gml, "GML input file");
  gen->add_option("--kind", g_kind, "reachability | waypoint | service-chain");
  gen->add_option("--pairs", g_pairs, "diamond pairs");
  gen->add_option("--chain-length", g_chain, "service-chain waypoints");
  gen->add_flag("--double", g_double, "stack an opposite-direction diamond");
  gen->add_option("--seed", g_seed);
  gen->add_option("-o,--out", g_out, "output file (default stdout)");

  // synth
  auto* syn = app.add_subcommand("synth", "Synthesize an update command sequence");
  std::string s_initial, s_final, s_property, s_scenario, s_gran = "switch", s_cmds, s_stats;
  bool s_no_prune = false, s_no_et = false, s_keep_waits = false, s_batch = false;
  double s_timeout = default_timeout_seconds();
  std::uint64_t s_seed = 0;
  syn->add_option("--scenario", s_scenario, "scenario JSON (initial, final, property)");
  syn->add_option("--initial", s_initial, "initial network JSON");
  syn->add_option("--final", s_final, "final network JSON");
  syn->add_option("--property", s_property, "property file or formula text");
  syn->add_option("--granularity", s_gran)->check(CLI::IsMember({"switch", "rule"}));
  syn->add_flag("--no-prune", s_no_prune, "disable counterexample pruning");
  syn->add_flag("--no-early-term", s_no_et, "disable early search termination");
  syn->add_flag("--batch", s_batch, "model check from scratch at every node");
  syn->add_flag("--keep-waits", s_keep_waits, "skip wait removal");
  syn->add_option("--emit-cmds", s_cmds, "write the command sequence as JSON");
  syn->add_option("--stats", s_stats, "append a CSV stats row");
  syn->add_option("--timeout", s_timeout, "seconds (env NETUPD_TIMEOUT)");
  syn->add_option("--seed", s_seed, "unused; synthesis is deterministic");

  // check
  auto* chk = app.add_subcommand("check", "Model check a static configuration");
  std::string c_config, c_property, c_mode = "checker", c_cex, c_dot;
  chk->add_option("--config", c_config, "network JSON")->required();
  chk->add_option("--property", c_property, "property file or formula text")->required();
  chk->add_option("--mode", c_mode, "checker | oracle")->check(CLI::IsMember({"checker", "oracle"}));
  chk->add_option("--emit-cex", c_cex, "write the counterexample as JSON");
  chk->add_option("--emit-dot", c_dot, "write the Kripke structure as DOT");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run commands on the operational semantics");
  std::string m_config, m_cmds, m_property, m_out = "-";
  std::uint64_t m_seed = 0;
  std::size_t m_steps = 100000, m_packets = 2, m_inject = 16;
  bool m_adv = false;
  sim->add_option("--config", m_config, "network JSON")->required();
  sim->add_option("--cmds", m_cmds, "command JSON");
  sim->add_option("--property", m_property, "check every completed trace");
  sim->add_option("--seed", m_seed);
  sim->add_option("--max-steps", m_steps);
  sim->add_option("--inject", m_inject, "packets injected by the random scheduler");
  sim->add_flag("--adversarial", m_adv, "enumerate every interleaving");
  sim->add_option("--max-packets", m_packets, "injections in adversarial mode");
  sim->add_option("-o,--out", m_out, "trace output (default stdout)");

  // bench
  auto* ben = app.add_subcommand("bench", "Run a benchmark suite");
  std::string b_suite, b_out = "-";
  std::size_t b_workers = 0;
  double b_timeout = -1;
  std::uint64_t b_seed = 0;
  ben->add_option("--suite", b_suite, "suite JSON")->required();
  ben->add_option("-o,--out", b_out, "CSV output (default stdout)");
  ben->add_option("--workers", b_workers);
  ben->add_option("--timeout", b_timeout, "per-run seconds (env NETUPD_TIMEOUT)");
  auto* seed_opt = ben->add_option("--seed", b_seed, "override every run's seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (g_what == "example") {
        Network red = example::red_config();
        json j = {{"name", "two-pod example"},
                  {"initial", to_json(red)},
                  {"final", to_json(example::green_config())},
                  {"blue", to_json(example::blue_config())},
                  {"property", property_to_json(example::reachability(red))},
                  {"waypoint_property", property_to_json(example::reachability_and_waypoint(red))}};
        emit(g_out, j);
        return 0;
      }
      Topology topo = make_topology(g_type, g_k, g_n, g_p, g_seed, g_gml);
      if (g_what == "topology") {
        emit(g_out, to_json(topo));
      } else if (g_what == "network") {
        emit(g_out, to_json(to_network(topo)));
      } else {
        DiamondOptions o;
        o.pairs = g_pairs;
        o.kind = ltl::parse_property_kind(g_kind);
        o.chain_length = g_chain;
        o.double_diamond = g_double;
        o.seed = g_seed;
        emit(g_out, to_json(gen_diamond_scenario(topo, o)));
      }
      return 0;
    }

    if (*syn) {
      Network n_i, n_f;
      ltl::FormulaPtr phi;
      if (!s_scenario.empty()) {
        Scenario sc = scenario_from_json(read_json_file(s_scenario));
        n_i = sc.initial;
        n_f = sc.final_net;
        phi = sc.phi;
      }
      if (!s_initial.empty()) n_i = load_network(s_initial);
      if (!s_final.empty()) n_f = network_from_json(read_json_file(s_final));
      if (!s_property.empty()) phi = load_property(s_property, n_i);
      if (!phi || n_i.switches.empty() || n_f.switches.empty()) {
        std::cerr << "synth needs --scenario or --initial, --final and --property\n";
        return 2;
      }
      SynthOptions so;
      so.granularity = parse_granularity(s_gran);
      so.prune = !s_no_prune;
      so.early_term = !s_no_et;
      so.incremental = !s_batch;
      so.timeout_seconds = s_timeout;
      SynthResult r = order_update(n_i, n_f, phi, so);
      std::vector<Command> cmds = r.cmds;
      std::size_t waits_before = 0, waits_after = 0;
      for (const auto& c : cmds) waits_before += is_wait(c);
      waits_after = waits_before;
      if (r.ok && !s_keep_waits) {
        auto w = remove_waits(n_i, cmds, phi);
        if (w.fallback) std::cerr << "wait removal: " << w.message << "\n";
        cmds = w.cmds;
        waits_after = w.retained;
      }
      if (!s_stats.empty()) {
        bool fresh = !fs::exists(s_stats);
        std::ofstream out(s_stats, std::ios::app);
        if (fresh) out << stats_csv_header() << ",waits_before,waits_after\n";
        out << stats_csv_row(r) << ',' << waits_before << ',' << waits_after << "\n";
      }
      if (!r.ok) {
        std::cerr << "no update: " << r.diagnostic << "\n";
        if (!s_cmds.empty()) emit(s_cmds, json::array());
        return 1;
      }
      if (!s_cmds.empty()) emit(s_cmds, to_json(cmds, n_i.fields));
      for (const auto& c : cmds) std::cout << command_to_string(c) << "\n";
      std::cerr << "nodes " << r.stats.nodes << ", checker calls " << r.stats.checker_calls
                << ", waits " << waits_before << " -> " << waits_after << ", "
                << r.stats.wall_seconds << " s\n";
      return 0;
    }

    if (*chk) {
      Network net = load_network(c_config);
      auto phi = load_property(c_property, net);
      if (c_mode == "oracle") {
        auto v = oracle_verify(net, {}, phi);
        if (!c_cex.empty() && !v.ok) emit(c_cex, to_json(v.trace));
        std::cout << (v.ok ? "holds" : "violated") << " (" << v.traces_checked << " traces)\n";
        return v.ok ? 0 : 1;
      }
      KripkeStructure k = build_kripke(net);
      if (!c_dot.empty()) {
        std::ofstream out(c_dot);
        out << to_dot(k);
      }
      Checker checker(phi);
      CheckResult r = checker.model_check(k);
      if (!r.ok && !c_cex.empty()) {
        json states = json::array();
        for (auto q : r.counterexample) states.push_back(state_name(k, q));
        emit(c_cex, {{"states", states}});
      }
      std::cout << (r.ok ? "holds" : "violated") << " (" << k.size() << " states)\n";
      if (!r.ok) {
        for (auto q : r.counterexample) std::cout << "  " << state_name(k, q) << "\n";
      }
      return r.ok ? 0 : 1;
    }

    if (*sim) {
      Network net = load_network(m_config);
      std::vector<Command> cmds;
      if (!m_cmds.empty()) cmds = commands_from_json(read_json_file(m_cmds), net.fields);
      std::vector<SinglePacketTrace> traces;
      if (m_adv) {
        auto r = explore_adversarial(net, cmds, m_packets);
        traces = r.traces;
        std::cerr << r.states << " states" << (r.truncated ? " (truncated)" : "") << "\n";
      } else {
        SimOptions o;
        o.seed = m_seed;
        o.max_steps = m_steps;
        o.inject = m_inject;
        auto r = run_commands(net, cmds, o);
        traces = r.traces;
        std::cerr << r.steps << " steps\n";
      }
      emit(m_out, to_json(traces));
      if (!m_property.empty()) {
        auto phi = load_property(m_property, net);
        auto classes = effective_classes(net);
        std::size_t bad = 0;
        for (const auto& t : traces)
          if (!ltl::eval_finite(t.positions(classes), phi, classes, net.fields)) ++bad;
        std::cerr << bad << " of " << traces.size() << " traces violate the property\n";
        return bad == 0 ? 0 : 1;
      }
      return 0;
    }

    if (*ben) {
      json suite = read_json_file(b_suite);
      if (b_workers) suite["workers"] = b_workers;
      if (b_timeout >= 0) suite["timeout_seconds"] = b_timeout;
      if (seed_opt->count() > 0)
        for (auto& r : suite["runs"]) {
          r.erase("seeds");
          r["seed"] = b_seed;
        }
      std::string csv = bench_csv(run_benchmark(suite));
      if (b_out == "-")
        std::cout << csv;
      else
        std::ofstream(b_out) << csv;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
