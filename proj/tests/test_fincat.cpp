#include "doctest.h"
#include "ecdsheaf/fincat.hpp"
#include "ecdsheaf/zoo.hpp"

using namespace ecdsheaf;

namespace {

RawCategory one_object_raw() {
  RawCategory raw;
  raw.objects = {"pt"};
  raw.initial = "pt";
  raw.morphisms = {{"id", "pt", "pt"}};
  raw.identities = {{"pt", "id"}};
  raw.compose = {{"id", "id", "id"}};
  return raw;
}

}  // namespace

TEST_CASE("one-object category validates with itself as initial object") {
  auto res = validate_category(one_object_raw());
  REQUIRE(std::holds_alternative<FinCategory>(res));
  const auto& c = std::get<FinCategory>(res);
  CHECK(c.initial == 0);
  CHECK(is_mono(c, 0));
}

TEST_CASE("the Z3 poset validates and revalidation is stable") {
  Fixture fx = build_fixture("Z3");
  const FinCategory& c = fx.c();
  CHECK(c.n_obj() == 5);
  CHECK(c.n_mor() == 14);
  // validation is idempotent: revalidating the serialized form reproduces it
  auto raw = c.to_raw();
  auto res = validate_category(raw);
  REQUIRE(std::holds_alternative<FinCategory>(res));
  CHECK(std::get<FinCategory>(res).to_raw().compose == raw.compose);
}

TEST_CASE("deleting a composite entry is reported as MalformedComposition") {
  Fixture fx = build_fixture("Z3");
  auto raw = fx.c().to_raw();
  // drop the UV -> S composite entry
  for (auto it = raw.compose.begin(); it != raw.compose.end(); ++it)
    if ((*it)[0] == "U_S" && (*it)[1] == "UV_U") {
      raw.compose.erase(it);
      break;
    }
  auto res = validate_category(raw);
  REQUIRE(std::holds_alternative<std::vector<Violation>>(res));
  const auto& bad = std::get<std::vector<Violation>>(res);
  CHECK(bad.front().code == "MalformedComposition");
  CHECK(bad.front().detail.find("U_S") != std::string::npos);
}

TEST_CASE("an object without a unique map from the initial is NotInitial") {
  RawCategory raw;
  raw.objects = {"a", "b"};
  raw.initial = "a";
  raw.morphisms = {{"id_a", "a", "a"}, {"id_b", "b", "b"}};
  raw.identities = {{"a", "id_a"}, {"b", "id_b"}};
  raw.compose = {{"id_a", "id_a", "id_a"}, {"id_b", "id_b", "id_b"}};
  auto res = validate_category(raw);
  REQUIRE(std::holds_alternative<std::vector<Violation>>(res));
  CHECK(std::get<std::vector<Violation>>(res).front().code == "NotInitial");
}

TEST_CASE("monomorphism detection") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  CHECK(is_mono(c, c.id_mor[0]));
  CHECK(is_mono(c, c.mor("UV_U")));
  Fixture gs = build_fixture("GS");
  // T -> pt collapses the parallel pair (id, sg)
  CHECK_FALSE(is_mono(gs.c(), gs.c().mor("f")));
  // mono(f∘g) implies mono(g) across all fixtures
  for (auto name : fixture_names()) {
    Fixture fx = build_fixture(name);
    const FinCategory& cc = fx.c();
    for (int g = 0; g < cc.n_mor(); ++g)
      for (int f = 0; f < cc.n_mor(); ++f) {
        if (!cc.composable(f, g)) continue;
        if (is_mono(cc, cc.compose(f, g))) CHECK(is_mono(cc, g));
      }
  }
}

TEST_CASE("pullbacks by exhaustive cone search") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  SUBCASE("pullback along the identity returns the source") {
    auto pb = pullback(c, c.id_mor[static_cast<size_t>(c.obj("S"))], c.mor("V_S"));
    REQUIRE(pb);
    CHECK(pb->apex == c.obj("V"));
  }
  SUBCASE("the Zariski-like intersection") {
    auto pb = pullback(c, c.mor("U_S"), c.mor("V_S"));
    REQUIRE(pb);
    CHECK(pb->apex == c.obj("UV"));
    // mediators were recorded for every cone
    CHECK_FALSE(pb->mediators.empty());
  }
  SUBCASE("no product of T with itself exists in GS") {
    Fixture gs = build_fixture("GS");
    CHECK_FALSE(pullback(gs.c(), gs.c().mor("f"), gs.c().mor("f")));
  }
  SUBCASE("GS+ adjoins exactly that product") {
    Fixture gsp = build_fixture("GS+");
    auto pb = pullback(gsp.c(), gsp.c().mor("f"), gsp.c().mor("f"));
    REQUIRE(pb);
    CHECK(pb->apex == gsp.c().obj("TT"));
  }
  SUBCASE("uniqueness up to isomorphism") {
    auto a = pullback(c, c.mor("U_S"), c.mor("V_S"));
    auto b = pullback(c, c.mor("V_S"), c.mor("U_S"));
    REQUIRE(a);
    REQUIRE(b);
    CHECK_FALSE(c.isos_between(a->apex, b->apex).empty());
  }
}

TEST_CASE("coproducts by exhaustive cocone search") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  SUBCASE("unary coproduct is the object") {
    auto cp = coproduct(c, {c.obj("U")});
    REQUIRE(cp);
    CHECK(cp->obj == c.obj("U"));
  }
  SUBCASE("empty coproduct is the initial object") {
    auto cp = coproduct(c, {});
    REQUIRE(cp);
    CHECK(cp->obj == c.initial);
  }
  SUBCASE("the join of U and V in the poset is their coproduct") {
    // cocone enumeration: S is the only upper bound and mediates uniquely
    auto cp = coproduct(c, {c.obj("U"), c.obj("V")});
    REQUIRE(cp);
    CHECK(cp->obj == c.obj("S"));
  }
  SUBCASE("GS+ has the two-fold coproduct of T") {
    Fixture gsp = build_fixture("GS+");
    auto cp = coproduct(gsp.c(), {gsp.c().obj("T"), gsp.c().obj("T")});
    REQUIRE(cp);
    CHECK(cp->obj == gsp.c().obj("TT"));
  }
}

TEST_CASE("group validation and actions") {
  auto c2 = FinGroup::cyclic(2);
  CHECK(c2.validate().empty());
  auto c3 = FinGroup::cyclic(3);
  CHECK(c3.validate().empty());
  auto s3 = FinGroup::symmetric3();
  CHECK(s3.validate().empty());

  Fixture gs = build_fixture("GS");
  const FinCategory& c = gs.c();
  SUBCASE("trivial action is valid") {
    auto a = trivial_action(c, c.obj("T"), c.mor("f"));
    CHECK(validate_group_action(c, a).empty());
  }
  SUBCASE("the C2 swap on T over PT is valid") {
    GroupAction a;
    a.group = std::make_shared<FinGroup>(c2);
    a.carrier = c.obj("T");
    a.over = c.mor("f");
    a.act = {c.mor("id_T"), c.mor("sg")};
    CHECK(validate_group_action(c, a).empty());
  }
  SUBCASE("a non-identity unit is NotHomomorphism") {
    GroupAction a;
    a.group = std::make_shared<FinGroup>(c2);
    a.carrier = c.obj("T");
    a.over = c.mor("f");
    a.act = {c.mor("sg"), c.mor("id_T")};
    auto bad = validate_group_action(c, a);
    REQUIRE_FALSE(bad.empty());
    CHECK(bad.front().code == "NotHomomorphism");
  }
  SUBCASE("an action that moves the structural morphism is NotOver") {
    // C2 on T over T via id_T as the structural morphism would need sg to fix
    // id, which fails
    GroupAction a;
    a.group = std::make_shared<FinGroup>(c2);
    a.carrier = c.obj("T");
    a.over = c.mor("id_T");
    a.act = {c.mor("id_T"), c.mor("sg")};
    auto bad = validate_group_action(c, a);
    REQUIRE_FALSE(bad.empty());
    CHECK(bad.front().code == "NotOver");
  }
}
