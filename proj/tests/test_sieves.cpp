#include <algorithm>

#include "doctest.h"
#include "ecdsheaf/sieves.hpp"
#include "ecdsheaf/zoo.hpp"

using namespace ecdsheaf;

namespace {

std::vector<std::string> member_ids(const FinCategory& c, const Sieve& s) {
  std::vector<std::string> out;
  for (int m : sieve_members(c, s)) out.push_back(c.mor_id(m));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("sieve generation closes under precomposition") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  SUBCASE("the identity generates the maximal sieve") {
    auto s = sieve_generated(c, c.obj("S"), {c.id_mor[static_cast<size_t>(c.obj("S"))]});
    CHECK(s.size() == static_cast<int>(c.arrows_into[static_cast<size_t>(c.obj("S"))].size()));
  }
  SUBCASE("the empty family generates the empty sieve") {
    auto s = sieve_generated(c, c.initial, {});
    CHECK(s.size() == 0);
  }
  SUBCASE("the Zariski cover closure") {
    auto s = sieve_generated(c, c.obj("S"), {c.mor("U_S"), c.mor("V_S")});
    CHECK(member_ids(c, s) == std::vector<std::string>{"O_S", "UV_S", "U_S", "V_S"});
  }
  SUBCASE("mixed targets are rejected") {
    CHECK_THROWS_AS(sieve_generated(c, c.obj("S"), {c.mor("UV_U")}), EngineError);
  }
  SUBCASE("every sieve is closed") {
    for (int x = 0; x < c.n_obj(); ++x)
      for (const auto& s : all_sieves(c, x)) CHECK(sieve_closed(c, s));
  }
}

TEST_CASE("sieve pullbacks") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  auto cover = sieve_generated(c, c.obj("S"), {c.mor("U_S"), c.mor("V_S")});
  SUBCASE("pullback along the identity is the identity") {
    auto p = pullback_sieve(c, cover, c.id_mor[static_cast<size_t>(c.obj("S"))]);
    CHECK(p == cover);
  }
  SUBCASE("pullback of the cover along a member is maximal") {
    auto p = pullback_sieve(c, cover, c.mor("U_S"));
    CHECK(p.size() == static_cast<int>(c.arrows_into[static_cast<size_t>(c.obj("U"))].size()));
  }
  SUBCASE("pullback of the empty sieve along a non-factoring morphism is empty") {
    auto p = pullback_sieve(c, empty_sieve(c, c.initial),
                            c.id_mor[static_cast<size_t>(c.initial)]);
    CHECK(p.size() == 0);
  }
}

TEST_CASE("generated topologies pass the axiom checker on every fixture") {
  for (auto name : fixture_names()) {
    Fixture fx = build_fixture(name);
    auto rep = check_topology_axioms(fx.t());
    INFO(name);
    CHECK(rep.ok);
  }
}

TEST_CASE("generated topology of the empty structure is trivial") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  EcdStructure empty;
  Topology t = generate_topology(c, empty);
  for (int x = 0; x < c.n_obj(); ++x) {
    size_t expected = x == c.initial ? 2 : 1;  // maximal (+ empty at the initial object)
    CHECK(t.covers[static_cast<size_t>(x)].size() == expected);
  }
}

TEST_CASE("Z3 generates exactly one nontrivial cover") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  auto at_s = covering_sieves(z3.t(), c.obj("S"));
  REQUIRE(at_s.size() == 2);
  CHECK(member_ids(c, at_s[1]) == std::vector<std::string>{"O_S", "UV_S", "U_S", "V_S"});
  for (auto obj : {"UV", "U", "V"})
    CHECK(covering_sieves(z3.t(), c.obj(obj)).size() == 1);
}

TEST_CASE("the Galois square covers the point") {
  Fixture gs = build_fixture("GS");
  const FinCategory& c = gs.c();
  auto at_pt = covering_sieves(gs.t(), c.obj("PT"));
  REQUIRE(at_pt.size() == 2);
  CHECK(member_ids(c, at_pt[1]) == std::vector<std::string>{"f", "o_PT"});
}

TEST_CASE("monotonicity and join of generated topologies") {
  Fixture prod = build_fixture("PRODUCT(Z3,GS+)");
  const FinCategory& c = prod.c();
  EcdStructure p1 = validate_ecd(c, {prod.ecd.squares[0]});                  // zariski part
  EcdStructure p2 = validate_ecd(c, {prod.ecd.squares[1], prod.ecd.squares[2]});  // galois part
  Topology t1 = generate_topology(c, p1);
  Topology t2 = generate_topology(c, p2);
  Topology tu = generate_topology(c, prod.ecd);
  SUBCASE("every cover of a substructure covers in the union") {
    for (int x = 0; x < c.n_obj(); ++x) {
      for (const auto& r : t1.covers[static_cast<size_t>(x)]) CHECK(tu.covering(r));
      for (const auto& r : t2.covers[static_cast<size_t>(x)]) CHECK(tu.covering(r));
    }
  }
  SUBCASE("the union topology is the join") {
    Topology join = join_topologies(t1, t2);
    for (int x = 0; x < c.n_obj(); ++x) {
      CHECK(join.covers[static_cast<size_t>(x)].size() == tu.covers[static_cast<size_t>(x)].size());
      for (const auto& r : tu.covers[static_cast<size_t>(x)]) CHECK(join.covering(r));
    }
  }
}

TEST_CASE("saturation is independent of processing order") {
  for (auto name : {"Z3", "GS+", "ADD2"}) {
    Fixture fx = build_fixture(name);
    for (unsigned long seed : {1ul, 7ul, 1234ul}) {
      Topology t = generate_topology(fx.c(), fx.ecd, seed);
      for (int x = 0; x < fx.c().n_obj(); ++x) {
        REQUIRE(t.covers[static_cast<size_t>(x)].size() ==
                fx.t().covers[static_cast<size_t>(x)].size());
        for (const auto& r : fx.t().covers[static_cast<size_t>(x)]) CHECK(t.covering(r));
      }
    }
  }
}

TEST_CASE("simple cover recognition") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  int depth = default_simple_cover_depth(c);
  SUBCASE("the identity is a simple cover") {
    auto v = is_simple_cover(c, {c.id_mor[static_cast<size_t>(c.obj("S"))]}, z3.ecd, 1);
    CHECK(v.is_simple);
  }
  SUBCASE("the Zariski family is a depth-1 simple cover") {
    auto v = is_simple_cover(c, {c.mor("U_S"), c.mor("V_S")}, z3.ecd, 1);
    CHECK(v.is_simple);
  }
  SUBCASE("the intersection alone never refines a simple cover") {
    auto v = is_simple_cover(c, {c.mor("UV_S")}, z3.ecd, depth);
    CHECK_FALSE(v.is_simple);
    CHECK_FALSE(v.bound_reached);  // the search saturated, the answer is exact
  }
}

TEST_CASE("covering sieves are listed largest first") {
  Fixture gs = build_fixture("GS");
  auto at_pt = covering_sieves(gs.t(), gs.c().obj("PT"));
  for (size_t i = 1; i < at_pt.size(); ++i) CHECK(at_pt[i - 1].size() >= at_pt[i].size());
}
