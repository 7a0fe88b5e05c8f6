#pragma once

#include <string>
#include <vector>

#include "netupd/io.hpp"
#include "netupd/synth.hpp"

namespace netupd {

struct BenchJob {
  std::string topology;  // smallworld | fattree | gml
  std::size_t n = 50;    // smallworld nodes
  std::size_t k = 4;     // smallworld degree or fat-tree arity
  double p = 0.1;
  std::string gml_path;
  ltl::PropertyKind kind = ltl::PropertyKind::Reachability;
  std::size_t pairs = 1;
  std::size_t chain_length = 2;
  bool double_diamond = false;
  Granularity granularity = Granularity::Switch;
  bool incremental = true;
  std::uint64_t seed = 0;
};

struct BenchRow {
  BenchJob job;
  std::size_t switches = 0;
  std::size_t rules = 0;
  SynthResult synth;
  std::size_t waits_before = 0;
  std::size_t waits_after = 0;
  std::string verdict;  // ok | eps | timeout | error
  std::string verified;  // yes | no | skipped
  std::string error;
};

// Suite: {"runs": [...], "timeout_seconds", "workers", "verify_max_switches"}.
// Each run entry may list "seeds" and "modes" (incremental, batch).
std::vector<BenchJob> expand_suite(const json& suite);

double default_timeout_seconds();  // NETUPD_TIMEOUT, else 600

BenchRow run_job(const BenchJob& job, double timeout_seconds, std::size_t verify_max_switches);

std::vector<BenchRow> run_benchmark(const json& suite);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& r);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace netupd
