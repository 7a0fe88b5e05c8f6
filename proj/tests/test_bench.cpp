#include "doctest.h"
#include "netupd/bench.hpp"

using namespace netupd;

TEST_CASE("empty suite gives a header-only CSV") {
  auto rows = run_benchmark(json::object());
  CHECK(rows.empty());
  auto csv = bench_csv(rows);
  CHECK(csv.rfind("# netupd bench csv", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("suite expansion crosses seeds and modes") {
  json suite = {{"runs", {{{"topology", "smallworld"}, {"n", 30}, {"seeds", {1, 2, 3}},
                           {"modes", {"incremental", "batch"}}},
                          {{"topology", "fattree"}, {"kind", "waypoint"}}}}};
  auto jobs = expand_suite(suite);
  REQUIRE(jobs.size() == 7);
  CHECK(jobs[0].seed == 1);
  CHECK(jobs[0].incremental);
  CHECK_FALSE(jobs[1].incremental);
  CHECK(jobs[6].topology == "fattree");
  CHECK(jobs[6].k == 4);
  CHECK(jobs[6].kind == ltl::PropertyKind::Waypoint);
  CHECK_THROWS_AS(expand_suite({{"runs", {{{"modes", {"fast"}}}}}}), FormatError);
}

TEST_CASE("benchmark rows") {
  json suite = {{"workers", 2},
                {"runs",
                 {{{"topology", "smallworld"}, {"n", 40}, {"seeds", {1, 2}}, {"modes", {"incremental", "batch"}}},
                  {{"topology", "smallworld"}, {"n", 24}, {"double_diamond", true}, {"seed", 1}}}}};
  auto rows = run_benchmark(suite);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rows[i].verdict == "ok");
    CHECK(rows[i].verified == "yes");
    CHECK(rows[i].waits_after <= rows[i].waits_before);
  }
  // Both checker modes find the same sequence.
  CHECK(bench_csv_row(rows[0]).find(",ok,") != std::string::npos);
  CHECK(rows[0].synth.cmds.size() == rows[1].synth.cmds.size());
  CHECK(rows[4].verdict == "eps");
  auto header = bench_csv_header();
  auto cols = header.substr(header.find('\n') + 1);
  for (const auto& r : rows) {
    auto row = bench_csv_row(r);
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(cols.begin(), cols.end(), ','));
  }
}
