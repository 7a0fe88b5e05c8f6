#include "netupd/bench.hpp"

#include <atomic>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "netupd/scenario.hpp"
#include "netupd/semantics.hpp"
#include "netupd/topology.hpp"
#include "netupd/waitrm.hpp"

namespace netupd {

std::vector<BenchJob> expand_suite(const json& suite) {
  std::vector<BenchJob> jobs;
  for (const auto& r : suite.value("runs", json::array())) {
    BenchJob base;
    base.topology = r.value("topology", std::string("smallworld"));
    base.n = r.value("n", base.n);
    base.k = r.value("k", base.topology == "fattree" ? std::size_t{4} : base.k);
    base.p = r.value("p", base.p);
    base.gml_path = r.value("gml", std::string{});
    base.kind = ltl::parse_property_kind(r.value("kind", std::string("reachability")));
    base.pairs = r.value("pairs", base.pairs);
    base.chain_length = r.value("chain_length", base.chain_length);
    base.double_diamond = r.value("double_diamond", false);
    base.granularity = parse_granularity(r.value("granularity", std::string("switch")));
    auto seeds = r.value("seeds", std::vector<std::uint64_t>{r.value("seed", std::uint64_t{0})});
    auto modes = r.value("modes", std::vector<std::string>{r.value("mode", std::string("incremental"))});
    for (auto seed : seeds)
      for (const auto& m : modes) {
        if (m != "incremental" && m != "batch") throw FormatError("unknown mode '" + m + "'");
        BenchJob j = base;
        j.seed = seed;
        j.incremental = m == "incremental";
        jobs.push_back(j);
      }
  }
  return jobs;
}

double default_timeout_seconds() {
  if (const char* e = std::getenv("NETUPD_TIMEOUT")) {
    try {
      return std::stod(e);
    } catch (...) {
    }
  }
  return 600;
}

namespace {

Topology make_topology(const BenchJob& job) {
  if (job.topology == "smallworld") return gen_smallworld(job.n, job.k, job.p, job.seed);
  if (job.topology == "fattree") return gen_fattree(static_cast<unsigned>(job.k));
  if (job.topology == "gml") return parse_gml(read_text_file(job.gml_path)).topo;
  throw FormatError("unknown topology '" + job.topology + "'");
}

std::size_t rule_count(const Network& net) {
  std::size_t n = 0;
  for (const auto& s : net.switches) n += s.table.size();
  return n;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

BenchRow run_job(const BenchJob& job, double timeout_seconds, std::size_t verify_max_switches) {
  BenchRow row;
  row.job = job;
  try {
    Topology topo = make_topology(job);
    DiamondOptions o;
    o.pairs = job.pairs;
    o.kind = job.kind;
    o.chain_length = job.chain_length;
    o.double_diamond = job.double_diamond;
    o.seed = job.seed;
    Scenario sc = gen_diamond_scenario(topo, o);
    row.switches = sc.initial.switches.size();
    row.rules = rule_count(sc.initial);
    SynthOptions so;
    so.granularity = job.granularity;
    so.incremental = job.incremental;
    so.timeout_seconds = timeout_seconds;
    row.synth = order_update(sc.initial, sc.final_net, sc.phi, so);
    if (row.synth.timed_out) {
      row.verdict = "timeout";
    } else if (!row.synth.ok) {
      row.verdict = "eps";
    } else {
      row.verdict = "ok";
      for (const auto& c : row.synth.cmds) row.waits_before += is_wait(c);
      auto w = remove_waits(sc.initial, row.synth.cmds, sc.phi);
      row.waits_after = w.retained;
      row.verified = "skipped";
      if (row.switches <= verify_max_switches)
        row.verified = oracle_verify(sc.initial, row.synth.cmds, sc.phi).ok ? "yes" : "no";
    }
  } catch (const std::exception& e) {
    row.verdict = "error";
    row.error = e.what();
  }
  return row;
}

std::vector<BenchRow> run_benchmark(const json& suite) {
  auto jobs = expand_suite(suite);
  double timeout = suite.value("timeout_seconds", default_timeout_seconds());
  std::size_t verify_max = suite.value("verify_max_switches", std::size_t{50});
  std::size_t workers = suite.value("workers", std::size_t{0});
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(1, jobs.size()));
  std::vector<BenchRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < jobs.size();) rows[i] = run_job(jobs[i], timeout, verify_max);
    });
  for (auto& t : pool) t.join();
  return rows;
}

std::string bench_csv_header() {
  return "# netupd bench csv v1\n"
         "topology,n,switches,rules,property,pairs,double_diamond,granularity,mode,seed,verdict,"
         "early_terminated,synth_seconds,checker_seconds,checker_calls,nodes,relabeled,"
         "waits_before,waits_after,verified,error";
}

std::string bench_csv_row(const BenchRow& r) {
  std::ostringstream os;
  const auto& j = r.job;
  const auto& s = r.synth.stats;
  os << j.topology << ',' << (j.topology == "fattree" ? j.k : j.n) << ',' << r.switches << ','
     << r.rules << ',' << ltl::to_string(j.kind) << ',' << j.pairs << ','
     << (j.double_diamond ? 1 : 0) << ',' << to_string(j.granularity) << ','
     << (j.incremental ? "incremental" : "batch") << ',' << j.seed << ',' << r.verdict << ','
     << (r.synth.early_terminated ? 1 : 0) << ',' << s.wall_seconds << ',' << s.checker_seconds
     << ',' << s.checker_calls << ',' << s.nodes << ',' << s.relabeled << ',' << r.waits_before
     << ',' << r.waits_after << ',' << r.verified << ',' << csv_field(r.error);
  return os.str();
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = bench_csv_header() + "\n";
  for (const auto& r : rows) out += bench_csv_row(r) + "\n";
  return out;
}

}  // namespace netupd
