#include "doctest.h"
#include "ecdsheaf/homological.hpp"
#include "ecdsheaf/random_gen.hpp"
#include "ecdsheaf/zoo.hpp"

using namespace ecdsheaf;

namespace {

/// Two-object-cover oracle for the Zariski-like poset: cohomology over S of a
/// sheaf is the cohomology of F(U) (+) F(V) -> F(UV).
std::pair<Eigen::Index, Eigen::Index> cech_oracle_z3(const FinCategory& c, const QPresheaf& f) {
  Mat d(f.d(c.obj("UV")), f.d(c.obj("U")) + f.d(c.obj("V")));
  d << f.r(c.mor("UV_U")), -f.r(c.mor("UV_V"));
  Eigen::Index h0 = f.d(c.obj("U")) + f.d(c.obj("V")) - rank_of(d);
  Eigen::Index h1 = f.d(c.obj("UV")) - rank_of(d);
  return {h0, h1};
}

/// Averaging oracle for the Galois fixture: sections at the point are the
/// C2-invariants of the value at T, and higher cohomology vanishes.
Eigen::Index averaging_oracle_gs(const FinCategory& c, const QPresheaf& sheaf) {
  Mat p = (sheaf.r(c.mor("id_T")) + sheaf.r(c.mor("sg"))) * rat(1, 2);
  return rank_of(p);
}

PresheafComplex shifted_single(QPresheafPtr f, int degree) {
  return PresheafComplex::single(std::move(f), degree);
}

}  // namespace

TEST_CASE("injective envelopes") {
  SUBCASE("the zero presheaf has a zero envelope") {
    Fixture z3 = build_fixture("Z3");
    auto env = injective_envelope(QPresheaf::zero(z3.c()));
    CHECK(env.e.pres->total_dim() == 0);
  }
  SUBCASE("over a one-object site every module is its own envelope") {
    RawCategory raw;
    raw.objects = {"pt"};
    raw.initial = "pt";
    raw.morphisms = {{"id", "pt", "pt"}};
    raw.identities = {{"pt", "id"}};
    raw.compose = {{"id", "id", "id"}};
    static FinCategory one = validate_category_or_throw(raw);
    QPresheaf m;
    m.cat = &one;
    m.dim = {4};
    m.restr = {Mat::Identity(4, 4)};
    auto env = injective_envelope(m);
    CHECK(env.e.pres->total_dim() == 4);
  }
  SUBCASE("the envelope of a free presheaf is certified") {
    Fixture z3 = build_fixture("Z3");
    auto env = injective_envelope(free_linear(z3.c(), z3.c().obj("UV")));
    CHECK(env.e.pres->total_dim() >= 3);
    CHECK(lifting_certificate(*env.e.pres));
  }
  SUBCASE("envelopes embed essentially on random presheaves") {
    Fixture gsp = build_fixture("GS+");
    Rng rng(7);
    for (int i = 0; i < 5; ++i) {
      QPresheaf m = random_qpresheaf(gsp.c(), rng);
      auto env = injective_envelope(m);  // certificates throw on failure
      for (int x = 0; x < gsp.c().n_obj(); ++x)
        CHECK(rank_of(env.embed.at(x)) == m.d(x));
    }
  }
}

TEST_CASE("injective sheaf resolutions") {
  SUBCASE("an injective sheaf resolves in length zero") {
    Fixture gs = build_fixture("GS");
    auto lpt = sheafify_linear(free_linear(gs.c(), gs.c().obj("PT")), gs.t());
    auto res = sheaf_injective_resolution(*lpt.out, gs.t(), 4);
    CHECK(res.actual_length == 0);
  }
  SUBCASE("resolutions certify terms as sheaves and injectives") {
    Fixture z3 = build_fixture("Z3");
    auto sh = sheafify_linear(free_linear(z3.c(), z3.c().obj("U")), z3.t());
    auto res = sheaf_injective_resolution(*sh.out, z3.t(), 4);
    CHECK(res.certificates_ok);
    for (const auto& term : res.terms) CHECK(is_linear_sheaf(*term.pres, z3.t()));
    // exactness: homology of the resolution is torsion in positive steps
    if (res.d.size() >= 2) {
      SubPresheaf ker = kernel_presheaf(res.d[1]);
      SubPresheaf img = image_presheaf(res.d[0]);
      for (int x = 0; x < z3.c().n_obj(); ++x)
        CHECK(span_contains(ker.basis[static_cast<size_t>(x)], img.basis[static_cast<size_t>(x)]));
    }
  }
  SUBCASE("non-sheaf input is rejected") {
    Fixture z3 = build_fixture("Z3");
    CHECK_THROWS_AS(sheaf_injective_resolution(free_linear(z3.c(), z3.c().obj("U")), z3.t(), 2),
                    EngineError);
  }
}

TEST_CASE("sheaf cohomology against independent oracles") {
  SUBCASE("one-object site: sections are exact") {
    RawCategory raw;
    raw.objects = {"pt"};
    raw.initial = "pt";
    raw.morphisms = {{"id", "pt", "pt"}};
    raw.identities = {{"pt", "id"}};
    raw.compose = {{"id", "id", "id"}};
    static FinCategory one = validate_category_or_throw(raw);
    EcdStructure empty;
    Topology t = generate_topology(one, empty);
    QPresheaf m;
    m.cat = &one;
    m.dim = {3};
    m.restr = {Mat::Identity(3, 3)};
    auto rep = sheaf_cohomology(one, 0, m, t, 3);
    CHECK(rep.dims == std::vector<Eigen::Index>{3, 0, 0, 0});
  }
  SUBCASE("Zariski-like fixture against the two-object cover oracle") {
    Fixture z3 = build_fixture("Z3");
    const FinCategory& c = z3.c();
    auto lam = sheafify_linear(free_linear(c, c.obj("S")), z3.t());
    auto rep = sheaf_cohomology(c, c.obj("S"), *lam.out, z3.t(), 3);
    auto [h0, h1] = cech_oracle_z3(c, *lam.out);
    CHECK(rep.dims[0] == h0);
    CHECK(rep.dims[1] == h1);
    CHECK(rep.dims == std::vector<Eigen::Index>{1, 0, 0, 0});
    Rng rng(31);
    for (int i = 0; i < 6; ++i) {
      auto f = random_linear_sheaf(c, z3.t(), rng);
      auto r2 = sheaf_cohomology(c, c.obj("S"), *f, z3.t(), 2);
      auto [o0, o1] = cech_oracle_z3(c, *f);
      INFO(i);
      CHECK(r2.dims[0] == o0);
      CHECK(r2.dims[1] == o1);
      CHECK(r2.dims[2] == 0);
    }
  }
  SUBCASE("Galois fixture against the averaging oracle") {
    Fixture gs = build_fixture("GS");
    const FinCategory& c = gs.c();
    // the swap representation with zero sections at the point
    Rng rng(37);
    for (int i = 0; i < 6; ++i) {
      auto f = random_linear_sheaf(c, gs.t(), rng);
      auto rep = sheaf_cohomology(c, c.obj("PT"), *f, gs.t(), 3);
      INFO(i);
      CHECK(rep.dims[0] == averaging_oracle_gs(c, *f));
      CHECK(rep.dims[1] == 0);
      CHECK(rep.dims[2] == 0);
      CHECK(rep.dims[3] == 0);
    }
  }
}

TEST_CASE("local replacement") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  SUBCASE("a complex of injective sheaves has a quasi-isomorphic unit") {
    auto lam = sheafify_linear(free_linear(c, c.obj("S")), z3.t());
    auto res = sheaf_injective_resolution(*lam.out, z3.t(), 1);
    PresheafComplex k = shifted_single(res.terms[0].pres, 0);
    auto lr = local_replacement(k, z3.t(), 2);
    for (int x = 0; x < c.n_obj(); ++x) CHECK(induces_homology_iso(lr.unit, x, 0, 2));
  }
  SUBCASE("the free presheaf on U replaces to its sheafification") {
    PresheafComplex k = shifted_single(share(free_linear(c, c.obj("U"))), 0);
    auto lr = local_replacement(k, z3.t(), 2);
    auto sh = sheafify_linear(free_linear(c, c.obj("U")), z3.t());
    for (int x = 0; x < c.n_obj(); ++x) {
      auto h = homology_dims(lr.l, x);
      CHECK(h[0] == sh.out->d(x));
      for (int n = 1; n <= 2; ++n) CHECK(h[n] == 0);
    }
  }
  SUBCASE("a presheaf supported at the initial object replaces to zero") {
    QPresheaf m = QPresheaf::zero(c);
    m.dim[static_cast<size_t>(c.initial)] = 2;
    for (int f = 0; f < c.n_mor(); ++f)
      m.restr[static_cast<size_t>(f)] = Mat::Zero(m.d(c.src(f)), m.d(c.tgt(f)));
    m.restr[static_cast<size_t>(c.id_mor[static_cast<size_t>(c.initial)])] = Mat::Identity(2, 2);
    auto lr = local_replacement(shifted_single(share(m), 0), z3.t(), 2);
    for (int x = 0; x < c.n_obj(); ++x)
      for (auto& [deg, dim] : homology_dims(lr.l, x)) CHECK(dim == 0);
  }
}

TEST_CASE("locality verdicts") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  SUBCASE("local replacements are local (idempotence)") {
    Rng rng(41);
    PresheafComplex k = random_complex(c, rng, 2, 3);
    auto lr = local_replacement(k, z3.t(), 1);
    auto v = is_t_local(lr.l, z3.t(), 1, true);
    CHECK(v.verdict == Locality::Local);
  }
  SUBCASE("the free presheaf on U fails at the initial object") {
    auto v = is_t_local(shifted_single(share(free_linear(c, c.obj("U"))), 0), z3.t(), 2, true);
    REQUIRE(v.verdict == Locality::NotLocal);
    CHECK(v.witness_obj == c.initial);
    CHECK(v.witness_deg == 0);
  }
  SUBCASE("sheafified complexes of injectives are local") {
    auto lam = sheafify_linear(free_linear(c, c.obj("S")), z3.t());
    auto res = sheaf_injective_resolution(*lam.out, z3.t(), 1);
    auto v = is_t_local(shifted_single(res.terms[0].pres, 0), z3.t(), 1, true);
    CHECK(v.verdict == Locality::Local);
  }
  SUBCASE("an insufficient range is reported as inconclusive") {
    auto lam = sheafify_linear(free_linear(c, c.obj("S")), z3.t());
    auto v = is_t_local(shifted_single(lam.out, 0), z3.t(), 1, false);
    CHECK(v.verdict == Locality::Inconclusive);
    CHECK_FALSE(v.definitive);
  }
}

TEST_CASE("connecting sequences") {
  SUBCASE("identity square: the sequence splits with zero connecting maps") {
    Fixture z3 = build_fixture("Z3");
    const FinCategory& c = z3.c();
    EquivariantSquare q;
    q.name = "identity";
    q.Xp = q.X = q.Sp = q.S = c.obj("S");
    int id = c.id_mor[static_cast<size_t>(c.obj("S"))];
    q.gp = q.fp = q.g = q.f = id;
    q.act_X = trivial_action(c, q.X, q.f);
    q.act_Xp = trivial_action(c, q.Xp, q.fp);
    auto lam = sheafify_linear(free_linear(c, c.obj("S")), z3.t());
    auto les = connecting_sequence(c, q, PresheafComplex::single(lam.out, 0), z3.t(), 2);
    CHECK(les.exact);
    for (const auto& conn : les.connecting)
      CHECK(rank_of(conn) == 0);
  }
  SUBCASE("the Galois square with base coefficients is an isomorphism in degree zero") {
    Fixture gs = build_fixture("GS");
    const FinCategory& c = gs.c();
    auto lam = sheafify_linear(free_linear(c, c.obj("PT")), gs.t());
    auto les = connecting_sequence(c, gs.ecd.squares[0], PresheafComplex::single(lam.out, 0),
                                   gs.t(), 2);
    REQUIRE(les.exact);
    CHECK(les.h_s[0] == 1);
    CHECK(les.h_mid[0] == 1);
    for (const auto& conn : les.connecting) CHECK(rank_of(conn) == 0);
  }
  SUBCASE("the Zariski-like square balances ranks") {
    Fixture z3 = build_fixture("Z3");
    auto lam = sheafify_linear(free_linear(z3.c(), z3.c().obj("S")), z3.t());
    auto les = connecting_sequence(z3.c(), z3.ecd.squares[0],
                                   PresheafComplex::single(lam.out, 0), z3.t(), 2);
    CHECK(les.exact);
    // alternating sums over any exact window vanish; check the recorded dims
    // through the exactness flag plus a spot identity in degree 0
    CHECK(les.h_s[0] == 1);
    CHECK(les.h_mid[0] == 2);
    CHECK(les.h_corner[0] == 1);
  }
  SUBCASE("naturality under the identity morphism of squares") {
    Fixture z3 = build_fixture("Z3");
    const FinCategory& c = z3.c();
    const auto& q = z3.ecd.squares[0];
    SquareMorphism m;
    m.xp = c.id_mor[static_cast<size_t>(q.Xp)];
    m.x = c.id_mor[static_cast<size_t>(q.X)];
    m.sp = c.id_mor[static_cast<size_t>(q.Sp)];
    m.s = c.id_mor[static_cast<size_t>(q.S)];
    auto lam = sheafify_linear(free_linear(c, c.obj("S")), z3.t());
    CHECK(connecting_natural(c, q, q, m, PresheafComplex::single(lam.out, 0), z3.t(), 2));
  }
}

TEST_CASE("certificate bookkeeping") {
  reset_certificate_stats();
  Fixture z3 = build_fixture("Z3");
  auto lam = sheafify_linear(free_linear(z3.c(), z3.c().obj("S")), z3.t());
  sheaf_injective_resolution(*lam.out, z3.t(), 2);
  auto stats = certificate_stats();
  CHECK(stats.resolutions >= 1);
  CHECK(stats.envelopes >= 1);
}
