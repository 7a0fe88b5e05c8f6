#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "netupd/ltl.hpp"
#include "netupd/scenario.hpp"
#include "oracles.hpp"

using namespace netupd;
using namespace netupd::ltl;

TEST_CASE("parser round-trips printed formulas") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    auto f = testgen::random_formula(rng, 4);
    auto g = parse(to_string(f));
    CHECK(same(f, g));
  }
  auto f = parse("sw=3 -> F (port=s9:p3 & !drop)");
  CHECK(to_string(f) == "(!sw=3 | (true U (port=s9:p3 & !drop)))");
  CHECK(same(parse("G !field dst=2"), globally(neg_atom(Atom::field_eq("dst", 2)))));
  CHECK_THROWS_AS(parse("sw=1 &"), LtlError);
  CHECK_THROWS_AS(parse("(sw=1"), LtlError);
}

TEST_CASE("global port ids resolve against the network") {
  Network net = example::red_config();
  auto ports = net.global_ports();
  REQUIRE(!ports.empty());
  auto [sw, pt] = ports[3];
  CHECK(same(parse("port=3", &net), atom(Atom::at_port(sw, pt))));
  CHECK_THROWS_AS(parse("port=100000", &net), LtlError);
}

TEST_CASE("negation is an involution in NNF") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto f = testgen::random_formula(rng, 4);
    CHECK(same(negate(negate(f)), f));
  }
}

TEST_CASE("maximal consistent sets match the subset filter") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto f = testgen::bounded_formula(rng, 16, 4);
    ExtendedClosure c(f);
    auto lib = max_consistent_sets(c);
    auto ref = oracle::brute_mcs(c);
    std::sort(lib.begin(), lib.end());
    CHECK(lib == ref);
  }
}

TEST_CASE("closure holds both members of each pair") {
  auto f = parse("prop=0 U (X prop=1)");
  ExtendedClosure c(f);
  for (const auto& p : c.pairs()) CHECK(same(negate(p.pos), p.neg));
  CHECK(c.find(f).has_value());
  CHECK(c.find(negate(f)).has_value());
}

TEST_CASE("finite evaluation agrees with the recursive definition") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    auto f = testgen::random_formula(rng, 4);
    std::vector<Position> tr(1 + rng() % 6);
    for (auto& p : tr) p.props = rng() & 7;
    CHECK(eval_finite(tr, f, {}, {}) == oracle::eval(f, tr, 0, {}, {}));
  }
}

TEST_CASE("release at the final position reduces to its right operand") {
  std::vector<Position> tr(1);
  tr[0].props = 2;  // prop=1 only
  auto r = release(atom(Atom::prop(0)), atom(Atom::prop(1)));
  CHECK(eval_finite(tr, r, {}, {}));
  tr[0].props = 1;
  CHECK_FALSE(eval_finite(tr, r, {}, {}));
}

TEST_CASE("follows relates Next to the successor set") {
  auto f = next(atom(Atom::prop(0)));
  ExtendedClosure c(f);
  auto sets = max_consistent_sets(c);
  auto holds = [&](Mcs m, const FormulaPtr& g) { return c.contains(m, g); };
  for (auto m1 : sets)
    for (auto m2 : sets)
      CHECK(follows(c, m1, m2) == (holds(m1, f) == holds(m2, atom(Atom::prop(0)))));
}

TEST_CASE("property builders") {
  auto s = atom(Atom::prop(0)), d = atom(Atom::prop(1)), w = atom(Atom::prop(2));
  auto reach = build_property(PropertyKind::Reachability, s, d, {});
  CHECK(same(reach, implies(s, eventually(d))));
  auto way = build_property(PropertyKind::Waypoint, s, d, {w});
  CHECK(same(way, implies(s, until(negate(d), conj(w, eventually(d))))));
  auto g = atom(Atom::prop(3));
  auto guarded = build_property(PropertyKind::Reachability, s, d, {}, g);
  CHECK(same(guarded, implies(conj(s, g), eventually(d))));

  auto w2 = atom(Atom::prop(3));
  auto chain = build_property(PropertyKind::ServiceChain, s, d, {w, w2});
  auto pos = [](std::initializer_list<int> ps) {
    std::vector<Position> tr;
    for (int p : ps) tr.push_back(Position{0, 0, 0, false, static_cast<std::uint64_t>(p)});
    return tr;
  };
  // bits: 1 = s, 2 = d, 4 = w, 8 = w2
  CHECK(eval_finite(pos({1, 0, 4, 0, 8, 2}), chain, {}, {}));
  CHECK_FALSE(eval_finite(pos({1, 8, 4, 2}), chain, {}, {}));
  CHECK_FALSE(eval_finite(pos({1, 4, 2, 8}), chain, {}, {}));
  CHECK_FALSE(eval_finite(pos({1, 4, 8}), chain, {}, {}));
  CHECK(eval_finite(pos({0, 4}), chain, {}, {}));
  CHECK(parse_property_kind("service-chain") == PropertyKind::ServiceChain);
  CHECK_THROWS(parse_property_kind("bogus"));
}

TEST_CASE("field atoms need a deciding class") {
  FieldSchema fs{{"dst"}, {4}};
  std::vector<TrafficClass> cls{{0, "all", {}}, {1, "d2", {{0, 2}}}};
  auto f = atom(Atom::field_eq("dst", 2));
  CHECK_THROWS_AS(check_decidable(f, cls, fs), LtlError);
  std::vector<TrafficClass> ok{{0, "d2", {{0, 2}}}};
  CHECK_NOTHROW(check_decidable(f, ok, fs));
  Position p;
  p.cls = 0;
  CHECK(eval_atom(f.get()->atom(), p, ok, fs));
}
