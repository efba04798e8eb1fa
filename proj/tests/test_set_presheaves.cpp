#include <set>
#include "doctest.h"
#include "ecdsheaf/random_gen.hpp"
#include "ecdsheaf/set_presheaf.hpp"
#include "ecdsheaf/zoo.hpp"

using namespace ecdsheaf;

TEST_CASE("representables") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  SetPresheaf rho_u = representable(c, c.obj("U"));
  CHECK(rho_u.size(c.obj("V")) == 0);
  CHECK(rho_u.size(c.obj("UV")) == 1);
  SetPresheaf rho_s = representable(c, c.obj("S"));
  CHECK(rho_s.size(c.obj("S")) == 1);  // the identity
  CHECK_FALSE(rho_u.check_functorial());
}

TEST_CASE("set sheafification matches hand computations") {
  SUBCASE("only the value at the initial object is normalized under the trivial topology") {
    Fixture z3 = build_fixture("Z3");
    const FinCategory& c = z3.c();
    EcdStructure empty;
    Topology t0 = generate_topology(c, empty);
    Rng rng(5);
    SetPresheaf f = random_set_presheaf(c, rng);
    auto sh = sheafify_set(f, t0);
    CHECK(sh.out.size(c.initial) == 1);
    for (int x = 0; x < c.n_obj(); ++x)
      if (x != c.initial) CHECK(sh.out.size(x) == f.size(x));
  }
  SUBCASE("the representable of U has no sections over S after sheafification") {
    Fixture z3 = build_fixture("Z3");
    const FinCategory& c = z3.c();
    auto sh = sheafify_set(representable(c, c.obj("U")), z3.t());
    CHECK(sh.out.size(c.obj("S")) == 0);
  }
  SUBCASE("a two-element swap with no fixed points has empty sections at the point") {
    Fixture gs = build_fixture("GS");
    const FinCategory& c = gs.c();
    // F(T) = {a,b} swapped by sg, F(PT) = {z}, F(O) = {*}
    SetPresheaf f;
    f.cat = &c;
    f.at = {{"*"}, {"a", "b"}, {"z"}};
    f.restr.resize(static_cast<size_t>(c.n_mor()));
    f.restr[static_cast<size_t>(c.mor("id_O"))] = {0};
    f.restr[static_cast<size_t>(c.mor("id_T"))] = {0, 1};
    f.restr[static_cast<size_t>(c.mor("id_PT"))] = {0};
    f.restr[static_cast<size_t>(c.mor("sg"))] = {1, 0};
    f.restr[static_cast<size_t>(c.mor("o_T"))] = {0, 0};
    f.restr[static_cast<size_t>(c.mor("o_PT"))] = {0};
    f.restr[static_cast<size_t>(c.mor("f"))] = {0};
    REQUIRE_FALSE(f.check_functorial());
    auto sh = sheafify_set(f, gs.t());
    CHECK(sh.out.size(c.obj("PT")) == 0);
    CHECK(sh.out.size(c.obj("T")) == 2);
  }
}

TEST_CASE("sheafification is idempotent and the unit detects sheaves") {
  for (auto name : {"Z3", "GS", "ADD2"}) {
    Fixture fx = build_fixture(name);
    Rng rng(11);
    for (int i = 0; i < 8; ++i) {
      SetPresheaf f = random_set_presheaf(fx.c(), rng);
      auto sh = sheafify_set(f, fx.t());
      CHECK(is_sheaf(sh.out, fx.t()));
      auto sh2 = sheafify_set(sh.out, fx.t());
      CHECK(set_presheaves_isomorphic(sh.out, sh2.out));
      // the unit is a bijection exactly on sheaves
      bool unit_bijective = true;
      for (int x = 0; x < fx.c().n_obj(); ++x) {
        if (f.size(x) != sh.out.size(x)) unit_bijective = false;
        std::set<int> img(sh.unit.comp[static_cast<size_t>(x)].begin(),
                          sh.unit.comp[static_cast<size_t>(x)].end());
        if (static_cast<int>(img.size()) != f.size(x)) unit_bijective = false;
      }
      CHECK(unit_bijective == is_sheaf(f, fx.t()));
    }
  }
}

TEST_CASE("group quotient sheaf of the Galois fixture") {
  Fixture gs = build_fixture("GS");
  const FinCategory& c = gs.c();
  auto q = group_quotient_sheaf(c, c.obj("T"), gs.ecd.squares[0].act_X, gs.t());
  // one orbit {id, sg} over T
  CHECK(q.sheaf.size(c.obj("T")) == 1);
  // sheafification glues the orbit class into a section over the point
  CHECK(q.sheaf.size(c.obj("PT")) == 1);
  // the canonical representative is the lexicographic minimum
  CHECK(q.quotient_presheaf.at[static_cast<size_t>(c.obj("T"))][0] == "id_T");
  // the pre-sheafification unit is pointwise surjective
  for (int x = 0; x < c.n_obj(); ++x) {
    std::set<int> img(q.quotient_unit.comp[static_cast<size_t>(x)].begin(),
                      q.quotient_unit.comp[static_cast<size_t>(x)].end());
    CHECK(static_cast<int>(img.size()) == q.quotient_presheaf.size(x));
  }
  // and the sheaf-level map is an epimorphism
  CHECK(is_epi(q.epi, gs.t()));
}

TEST_CASE("local surjectivity") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  SUBCASE("identity maps are epi") {
    auto sh = sheafify_set(representable(c, c.obj("S")), z3.t());
    SetMap id;
    id.src = sh.out;
    id.tgt = sh.out;
    for (int x = 0; x < c.n_obj(); ++x) {
      std::vector<int> v(static_cast<size_t>(sh.out.size(x)));
      for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
      id.comp.push_back(v);
    }
    CHECK(is_epi(id, z3.t()));
  }
  SUBCASE("the Galois cover map is locally surjective") {
    Fixture gs = build_fixture("GS");
    auto rho_t = sheafify_set(representable(gs.c(), gs.c().obj("T")), gs.t());
    auto rho_pt = sheafify_set(representable(gs.c(), gs.c().obj("PT")), gs.t());
    SetMap f = sheafify_set_map(representable_map(gs.c(), gs.c().mor("f")), rho_t, rho_pt, gs.t());
    CHECK(is_epi(f, gs.t()));
  }
  SUBCASE("the intersection does not cover") {
    auto rho_uv = sheafify_set(representable(c, c.obj("UV")), z3.t());
    auto rho_s = sheafify_set(representable(c, c.obj("S")), z3.t());
    SetMap m = sheafify_set_map(representable_map(c, c.mor("UV_S")), rho_uv, rho_s, z3.t());
    CHECK_FALSE(is_epi(m, z3.t()));
  }
  SUBCASE("non-sheaf inputs are rejected") {
    SetMap junk;
    junk.src = representable(c, c.initial);  // value at the initial object is not a singleton? it is; use a presheaf failing normalization
    SetPresheaf f = representable(c, c.obj("S"));
    // representable of S is not a sheaf for t_P (missing glued sections are
    // impossible here; rho(S) actually is a sheaf) — use rho(U) at S instead
    SetPresheaf g = representable(c, c.obj("U"));
    junk.src = g;
    junk.tgt = g;
    junk.comp.resize(static_cast<size_t>(c.n_obj()));
    for (int x = 0; x < c.n_obj(); ++x) {
      std::vector<int> v(static_cast<size_t>(g.size(x)));
      for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
      junk.comp[static_cast<size_t>(x)] = v;
    }
    CHECK_THROWS_AS(is_epi(junk, z3.t()), EngineError);
  }
}

TEST_CASE("regularity comparison map") {
  SUBCASE("trivial identity square gives a bijective comparison") {
    Fixture z3 = build_fixture("Z3");
    const FinCategory& c = z3.c();
    EquivariantSquare q;
    q.name = "identity";
    q.Xp = q.X = q.Sp = q.S = c.obj("S");
    int id = c.id_mor[static_cast<size_t>(c.obj("S"))];
    q.gp = q.fp = q.g = q.f = id;
    q.act_X = trivial_action(c, q.X, q.f);
    q.act_Xp = trivial_action(c, q.Xp, q.fp);
    auto r = regularity_map(c, q, z3.t());
    CHECK(is_epi(r.comparison, z3.t()));
    for (int x = 0; x < c.n_obj(); ++x) CHECK(r.lhs.size(x) >= r.rhs.size(x));
  }
  SUBCASE("the Zariski-like square is certified by enumeration") {
    Fixture z3 = build_fixture("Z3");
    auto r = regularity_map(z3.c(), z3.ecd.squares[0], z3.t());
    CHECK(is_epi(r.comparison, z3.t()));
  }
  SUBCASE("the Galois square comparison is onto") {
    Fixture gs = build_fixture("GS");
    auto r = regularity_map(gs.c(), gs.ecd.squares[0], gs.t());
    CHECK(is_epi(r.comparison, gs.t()));
  }
  SUBCASE("preconditions are enforced") {
    Fixture add2 = build_fixture("ADD2");
    const FinCategory& c = add2.c();
    EquivariantSquare q = add2.ecd.squares[0];
    q.g = c.mor("O_AB");  // no longer Cartesian with these corners
    CHECK_THROWS_WITH_AS(regularity_map(c, q, add2.t()),
                         doctest::Contains("NotCartesian"), EngineError);
  }
}

TEST_CASE("sheaf sections over a square are Cartesian (sets)") {
  for (auto name : {"Z3", "GS+", "ADD2", "CL3"}) {
    Fixture fx = build_fixture(name);
    Rng rng(23);
    for (int i = 0; i < 6; ++i) {
      SetPresheaf f = random_set_sheaf(fx.c(), fx.t(), rng);
      for (const auto& q : fx.ecd.squares) {
        INFO(name);
        CHECK(cartesian_sets_check(f, q, fx.t()));
      }
    }
  }
}

TEST_CASE("quotient squares are coCartesian") {
  for (auto name : {"Z3", "GS+", "ADD2", "CL3"}) {
    Fixture fx = build_fixture(name);
    for (const auto& q : fx.ecd.squares) {
      INFO(name, " ", q.name);
      CHECK(cocartesian_check(fx.c(), q, fx.t()));
    }
  }
}
