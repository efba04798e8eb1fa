#include "doctest.h"
#include "ecdsheaf/qpresheaf.hpp"
#include "ecdsheaf/random_gen.hpp"
#include "ecdsheaf/zoo.hpp"

using namespace ecdsheaf;

TEST_CASE("free linear presheaves count hom-sets") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  QPresheaf lam_u = free_linear(c, c.obj("U"));
  CHECK(lam_u.d(c.obj("V")) == 0);
  CHECK(lam_u.d(c.obj("UV")) == 1);
  CHECK(free_linear(c, c.obj("S")).d(c.obj("S")) >= 1);
  Fixture gs = build_fixture("GS");
  CHECK(free_linear(gs.c(), gs.c().obj("T")).d(gs.c().obj("T")) == 2);
  CHECK_FALSE(lam_u.check_functorial());
}

TEST_CASE("linear sheafification values") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  SUBCASE("trivial topology only kills the initial value") {
    EcdStructure empty;
    Topology t0 = generate_topology(c, empty);
    auto sh = sheafify_linear(free_linear(c, c.obj("S")), t0);
    CHECK(sh.out->d(c.initial) == 0);
    for (int x = 0; x < c.n_obj(); ++x)
      if (x != c.initial) CHECK(sh.out->d(x) == 1);
  }
  SUBCASE("sections of the free presheaf on U vanish over S") {
    auto sh = sheafify_linear(free_linear(c, c.obj("U")), z3.t());
    CHECK(sh.out->d(c.obj("S")) == 0);
  }
  SUBCASE("matching pairs over the Zariski cover glue to one dimension") {
    auto sh = sheafify_linear(free_linear(c, c.obj("S")), z3.t());
    CHECK(sh.out->d(c.obj("S")) == 1);
    CHECK(is_linear_sheaf(*sh.out, z3.t()));
  }
}

TEST_CASE("sheafify_linear commutes with direct sums") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  auto a = share(free_linear(c, c.obj("U")));
  auto b = share(free_linear(c, c.obj("S")));
  auto sum = direct_sum({a, b});
  auto sh_sum = sheafify_linear(*sum.sum, z3.t());
  auto sh_a = sheafify_linear(*a, z3.t());
  auto sh_b = sheafify_linear(*b, z3.t());
  for (int x = 0; x < c.n_obj(); ++x)
    CHECK(sh_sum.out->d(x) == sh_a.out->d(x) + sh_b.out->d(x));
  // the canonical map a(A) (+) a(B) -> a(A (+) B) is a natural isomorphism
  LinearMap ia = sheafify_linear_map(sum.in[0], sh_a, sh_sum, z3.t());
  LinearMap ib = sheafify_linear_map(sum.in[1], sh_b, sh_sum, z3.t());
  for (int x = 0; x < c.n_obj(); ++x)
    CHECK(rank_of(hcat({ia.at(x), ib.at(x)})) == sh_sum.out->d(x));
}

TEST_CASE("averaging projectors") {
  SUBCASE("trivial group fixes everything") {
    GModule m;
    m.group = std::make_shared<FinGroup>(FinGroup::trivial());
    m.dim = 3;
    m.act = {Mat::Identity(3, 3)};
    auto fp = fixed_points(m);
    CHECK(fp.basis.cols() == 3);
  }
  SUBCASE("the C2 swap averages to the halves matrix") {
    GModule m;
    m.group = std::make_shared<FinGroup>(FinGroup::cyclic(2));
    m.dim = 2;
    Mat swap(2, 2);
    swap << 0, 1, 1, 0;
    m.act = {Mat::Identity(2, 2), swap};
    auto fp = fixed_points(m);
    Mat expect(2, 2);
    expect << rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2);
    CHECK(fp.projector == expect);
    CHECK(fp.basis.cols() == 1);
  }
  SUBCASE("the cyclic rotation of Q^3 has a one-dimensional fixed space") {
    GModule m;
    m.group = std::make_shared<FinGroup>(FinGroup::cyclic(3));
    m.dim = 3;
    Mat rot = Mat::Zero(3, 3);
    rot(1, 0) = 1;
    rot(2, 1) = 1;
    rot(0, 2) = 1;
    m.act = {Mat::Identity(3, 3), rot, rot * rot};
    auto fp = fixed_points(m);
    CHECK(fp.basis.cols() == 1);
  }
  SUBCASE("rank of p plus rank of 1-p is the dimension, and p commutes with G") {
    Rng rng(3);
    for (auto g : {FinGroup::cyclic(2), FinGroup::cyclic(3), FinGroup::symmetric3()})
      for (Eigen::Index dim : {2, 4, 6}) {
        GModule m = random_gmodule(g, rng, dim);
        auto fp = fixed_points(m);
        Mat co = Mat::Identity(dim, dim) - fp.projector;
        CHECK(rank_of(fp.projector) + rank_of(co) == dim);
        for (const auto& a : m.act) {
          CHECK(a * fp.projector == fp.projector);
          CHECK(fp.projector * a == fp.projector);
        }
      }
  }
}

TEST_CASE("linear group quotients") {
  Fixture gs = build_fixture("GS");
  const FinCategory& c = gs.c();
  auto lq = linear_group_quotient(c, c.obj("T"), gs.ecd.squares[0].act_X, gs.t());
  CHECK(lq.sheaf.out->d(c.obj("T")) == 1);
  CHECK(lq.sheaf.out->d(c.initial) == 0);
  CHECK(lq.sheaf.out->d(c.obj("PT")) == 1);
  // trivial group: the quotient is the free sheaf itself
  auto triv = linear_group_quotient(c, c.obj("T"), trivial_action(c, c.obj("T"), c.mor("f")), gs.t());
  for (int x = 0; x < c.n_obj(); ++x) CHECK(triv.sheaf.out->d(x) == triv.free_sheaf.out->d(x));
}

TEST_CASE("torsion parts") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  SUBCASE("sheaves have no torsion") {
    auto sh = sheafify_linear(free_linear(c, c.obj("S")), z3.t());
    auto tp = torsion_part(*sh.out, z3.t());
    CHECK(tp.sub->total_dim() == 0);
  }
  SUBCASE("a presheaf supported at the initial object is pure torsion") {
    QPresheaf m = QPresheaf::zero(c);
    m.dim[static_cast<size_t>(c.initial)] = 3;
    for (int f = 0; f < c.n_mor(); ++f)
      m.restr[static_cast<size_t>(f)] =
          Mat::Zero(m.d(c.src(f)), m.d(c.tgt(f)));
    m.restr[static_cast<size_t>(c.id_mor[static_cast<size_t>(c.initial)])] = Mat::Identity(3, 3);
    auto tp = torsion_part(m, z3.t());
    CHECK(tp.sub->d(c.initial) == 3);
    CHECK(tp.sub->total_dim() == 3);
  }
  SUBCASE("torsion parts sheafify to zero") {
    Rng rng(17);
    for (int i = 0; i < 6; ++i) {
      QPresheaf m = random_qpresheaf(c, rng);
      auto tp = torsion_part(m, z3.t());
      CHECK(is_torsion(*tp.sub, z3.t()));
    }
  }
}

TEST_CASE("free presheaves represent sections") {
  // linear maps Lambda(S) -> F correspond to F(S)
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  Rng rng(29);
  for (int i = 0; i < 4; ++i) {
    QPresheaf f = random_qpresheaf(c, rng);
    for (int s = 0; s < c.n_obj(); ++s) {
      auto homs = hom_space(share(free_linear(c, s)), share(f));
      CHECK(static_cast<Eigen::Index>(homs.size()) == f.d(s));
    }
  }
}

TEST_CASE("short exact sheaf sequences of the squares") {
  SUBCASE("the identity square splits") {
    Fixture z3 = build_fixture("Z3");
    const FinCategory& c = z3.c();
    EquivariantSquare q;
    q.name = "identity";
    q.Xp = q.X = q.Sp = q.S = c.obj("S");
    int id = c.id_mor[static_cast<size_t>(c.obj("S"))];
    q.gp = q.fp = q.g = q.f = id;
    q.act_X = trivial_action(c, q.X, q.f);
    q.act_Xp = trivial_action(c, q.Xp, q.fp);
    auto mv = mv_sequence(c, q, z3.t());
    CHECK(mv.exact);
  }
  SUBCASE("every fixture square yields an exact sequence") {
    for (auto name : fixture_names()) {
      Fixture fx = build_fixture(name);
      for (const auto& q : fx.ecd.squares) {
        auto mv = mv_sequence(fx.c(), q, fx.t());
        INFO(name, " ", q.name, " ", mv.witness);
        CHECK(mv.exact);
      }
    }
  }
  SUBCASE("the Galois sequence identifies the quotient with the base") {
    Fixture gs = build_fixture("GS");
    auto mv = mv_sequence(gs.c(), gs.ecd.squares[0], gs.t());
    REQUIRE(mv.exact);
    // 0 -> 0 -> Lambda_t(T)_C2 -> Lambda_t(PT) -> 0
    CHECK(mv.first.src->total_dim() == 0);
    for (size_t x = 0; x < mv.second.comp.size(); ++x)
      CHECK(rank_of(mv.second.at(static_cast<int>(x))) == mv.second.tgt->d(static_cast<int>(x)));
  }
}
