// Acceptance suite: one pass/fail line per criterion, exact arithmetic
// throughout (tolerance zero everywhere). Exit code 0 iff all criteria pass.

#include <chrono>
#include <iostream>
#include <set>
#include <vector>

#include "ecdsheaf/descent.hpp"
#include "ecdsheaf/io.hpp"
#include "ecdsheaf/random_gen.hpp"
#include "ecdsheaf/zoo.hpp"

using namespace ecdsheaf;
using Clock = std::chrono::steady_clock;

namespace {

struct Harness {
  int failures = 0;
  Clock::time_point t0 = Clock::now();

  void report(int number, const std::string& what, bool pass, const std::string& detail = "") {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << number << ": " << what
              << (detail.empty() ? "" : " — " + detail) << " (" << ms << "ms elapsed)"
              << std::endl;
    if (!pass) ++failures;
  }
};

bool unit_is_bijective_set(const SetMap& unit) {
  const FinCategory& c = *unit.src.cat;
  for (int x = 0; x < c.n_obj(); ++x) {
    if (unit.src.size(x) != unit.tgt.size(x)) return false;
    std::set<int> image(unit.comp[static_cast<size_t>(x)].begin(),
                        unit.comp[static_cast<size_t>(x)].end());
    if (static_cast<int>(image.size()) != unit.src.size(x)) return false;
  }
  return true;
}

bool unit_is_iso_linear(const LinearMap& unit) {
  const FinCategory& c = *unit.src->cat;
  for (int x = 0; x < c.n_obj(); ++x) {
    if (unit.src->d(x) != unit.tgt->d(x)) return false;
    if (rank_of(unit.at(x)) != unit.src->d(x)) return false;
  }
  return true;
}

}  // namespace

int main() {
  Harness h;
  reset_certificate_stats();
  std::vector<Fixture> zoo;
  for (auto name : fixture_names()) zoo.push_back(build_fixture(name));
  auto fixture = [&](const std::string& name) -> Fixture& {
    for (auto& fx : zoo)
      if (fx.name == name) return fx;
    throw EngineError("UnknownFixture", name);
  };

  // 1. topology axioms, exhaustively over the sieve lattice
  {
    bool ok = true;
    std::string detail;
    for (auto& fx : zoo) {
      auto rep = check_topology_axioms(fx.t());
      if (!rep.ok) {
        ok = false;
        detail = fx.name + ": " + rep.violations.front().detail;
      }
    }
    h.report(1, "generated topologies satisfy all axioms on every fixture", ok, detail);
  }

  // 2. sheafification soundness, 100 seeded random presheaves per fixture
  {
    bool ok = true;
    std::string detail;
    for (auto& fx : zoo) {
      Rng rng(1000);
      for (int i = 0; i < 100 && ok; ++i) {
        if (i % 2 == 0) {
          SetPresheaf f = random_set_presheaf(fx.c(), rng);
          auto sh = sheafify_set(f, fx.t());  // verifies the sheaf condition
          if (!is_sheaf(sh.out, fx.t())) ok = false;
          if (unit_is_bijective_set(sh.unit) != is_sheaf(f, fx.t())) ok = false;
          auto sh2 = sheafify_set(sh.out, fx.t());
          if (!unit_is_bijective_set(sh2.unit)) ok = false;  // idempotence
        } else {
          QPresheaf f = random_qpresheaf(fx.c(), rng);
          auto sh = sheafify_linear(f, fx.t());
          if (!is_linear_sheaf(*sh.out, fx.t())) ok = false;
          if (unit_is_iso_linear(sh.unit) != is_linear_sheaf(f, fx.t())) ok = false;
          auto sh2 = sheafify_linear(*sh.out, fx.t());
          if (!unit_is_iso_linear(sh2.unit)) ok = false;
        }
        if (!ok) detail = fx.name + " sample " + std::to_string(i);
      }
    }
    h.report(2, "sheafification is sound, unit detects sheaves, idempotent", ok, detail);
  }

  // 3. sections over squares are Cartesian; quotient squares are coCartesian
  {
    bool ok = true;
    std::string detail;
    for (auto name : {"Z3", "GS+", "ADD2", "CL3"}) {
      Fixture& fx = fixture(name);
      Rng rng(2000);
      for (const auto& q : fx.ecd.squares) {
        for (int i = 0; i < 50 && ok; ++i) {
          SetPresheaf f = random_set_sheaf(fx.c(), fx.t(), rng);
          if (!cartesian_sets_check(f, q, fx.t())) {
            ok = false;
            detail = fx.name + "/" + q.name + " sample " + std::to_string(i);
          }
        }
        if (ok && !cocartesian_check(fx.c(), q, fx.t())) {
          ok = false;
          detail = fx.name + "/" + q.name + " pushout";
        }
      }
    }
    h.report(3, "sheaf sections Cartesian and quotient squares coCartesian", ok, detail);
  }

  // 4. the short exact sheaf sequence of every square of every regular fixture
  {
    bool ok = true;
    std::string detail;
    for (auto& fx : zoo) {
      if (!check_regular(fx.c(), fx.ecd, fx.t()).all_regular) continue;
      for (const auto& q : fx.ecd.squares) {
        auto mv = mv_sequence(fx.c(), q, fx.t());
        if (!mv.exact) {
          ok = false;
          detail = fx.name + "/" + q.name + ": " + mv.witness;
        }
      }
    }
    h.report(4, "Mayer-Vietoris sheaf sequences exact on every regular square", ok, detail);
  }

  // 5. vanishing above the density dimension, 20 random sheaves per fixture
  {
    bool ok = true;
    std::string detail;
    for (auto name : {"Z3", "ADD2", "CL3", "GS", "GS+"}) {
      Fixture& fx = fixture(name);
      Rng rng(3000);
      for (int i = 0; i < 20 && ok; ++i) {
        auto f = random_linear_sheaf(fx.c(), fx.t(), rng);
        auto rep = check_vanishing(fx.c(), fx.ecd, fx.density, fx.t(), *f);
        if (!rep.hypotheses_pass || !rep.ok) {
          ok = false;
          detail = fx.name + " sample " + std::to_string(i) + ": " + rep.witness;
        }
      }
    }
    h.report(5, "cohomology vanishes above the density dimension", ok, detail);
  }

  // 6. square-locality equivalence on 100 seeded complexes for Z3 and GS+,
  //    plus the forward direction on every local replacement
  {
    bool ok = true;
    std::string detail;
    for (auto name : {"Z3", "GS+"}) {
      Fixture& fx = fixture(name);
      auto hyp = check_hypotheses(fx.c(), fx.ecd, fx.density, fx.t());
      if (!hyp.all_pass()) {
        ok = false;
        detail = fx.name + ": hypotheses not certified";
        break;
      }
      std::vector<EquivariantSquare> squares = fx.ecd.squares;
      for (const auto& q : fx.ecd.squares)
        for (auto& b : base_change_squares(fx.c(), q))
          if (fx.ecd.member(fx.c(), b)) squares.push_back(b);
      int n = std::max(1, max_dim_d(fx.c(), fx.density));
      Rng rng(4000);
      for (int i = 0; i < 100 && ok; ++i) {
        PresheafComplex k = random_complex(fx.c(), rng, 3, 4);
        bool all_squares = initial_cover_acyclic(k);
        for (const auto& q : squares) all_squares = all_squares && homotopy_cartesian_square(k, q);
        LocalReplacement lr = local_replacement(k, fx.t(), n);
        bool local = true;
        if (!k.empty())
          for (int x = 0; x < fx.c().n_obj() && local; ++x)
            local = induces_homology_iso(lr.unit, x, k.lo, k.hi + n);
        if (local != all_squares) {
          ok = false;
          detail = fx.name + " sample " + std::to_string(i) + " disagrees (local=" +
                   std::to_string(local) + ")";
        }
        // forward direction: the replacement is local, so its squares must pass
        for (const auto& q : squares)
          if (ok && !homotopy_cartesian_square(lr.l, q)) {
            ok = false;
            detail = fx.name + " sample " + std::to_string(i) + " forward square " + q.name;
          }
      }
    }
    h.report(6, "square-wise descent agrees with locality on 100 seeded complexes", ok, detail);
  }

  // 7. union equivalence with the derived structure on 50 seeded complexes
  {
    bool ok = true;
    std::string detail;
    Fixture& fx = fixture("GS+");
    DerivePrimeResult dp = derive_prime(fx.c(), fx.ecd);
    Topology t_union = generate_topology(fx.c(), dp.with_original);
    int n = std::max(1, max_dim_d(fx.c(), fx.density));
    Rng rng(5000);
    for (int i = 0; i < 50 && ok; ++i) {
      PresheafComplex k = random_complex(fx.c(), rng, 3, 4);
      bool side_squares = true;
      for (const auto& q : dp.prime.squares)
        side_squares = side_squares && homotopy_cartesian_square(k, q);
      auto base_local = is_t_local(k, fx.t(), n, true);
      auto union_local = is_t_local(k, t_union, n, true);
      bool side_i = base_local.verdict == Locality::Local && side_squares;
      bool side_ii = union_local.verdict == Locality::Local;
      if (side_i != side_ii) {
        ok = false;
        detail = "sample " + std::to_string(i);
      }
    }
    h.report(7, "union-with-derived-structure locality equivalence, 50 complexes", ok, detail);
  }

  // 8. homological certificates: no CertificationFailed anywhere above
  {
    auto stats = certificate_stats();
    bool ok = stats.envelopes > 0 && stats.resolutions > 0;
    h.report(8, "all lifting/essentiality/sheaf certificates passed",
             ok,
             std::to_string(stats.envelopes) + " envelopes, " +
                 std::to_string(stats.resolutions) + " resolutions, " +
                 std::to_string(stats.lifting_checks) + " lifting checks");
  }

  // 9. group machinery: projectors and the averaging oracle for the Galois site
  {
    bool ok = true;
    std::string detail;
    Rng rng(6000);
    for (auto g : {FinGroup::cyclic(2), FinGroup::cyclic(3), FinGroup::symmetric3()})
      for (Eigen::Index dim = 1; dim <= 6 && ok; ++dim) {
        GModule m = random_gmodule(g, rng, dim);
        auto fp = fixed_points(m);  // certifies p*p = p and G-invariance
        if (fp.projector * fp.projector != fp.projector) ok = false;
      }
    if (!ok) detail = "projector failure";
    Fixture& gs = fixture("GS");
    const FinCategory& c = gs.c();
    for (int i = 0; i < 20 && ok; ++i) {
      auto f = random_linear_sheaf(c, gs.t(), rng);
      auto rep = sheaf_cohomology(c, c.obj("PT"), *f, gs.t(), 3);
      Mat p = (f->r(c.mor("id_T")) + f->r(c.mor("sg"))) * rat(1, 2);
      Eigen::Index oracle = rank_of(p);
      if (rep.dims[0] != oracle || rep.dims[1] != 0 || rep.dims[2] != 0 || rep.dims[3] != 0) {
        ok = false;
        detail = "Galois cohomology sample " + std::to_string(i);
      }
    }
    h.report(9, "fixed-point projectors and the averaging cohomology oracle", ok, detail);
  }

  // 10. checker transport across the union and its slices
  {
    bool ok = true;
    std::string detail;
    Fixture& prod = fixture("PRODUCT(Z3,GS+)");
    const FinCategory& c = prod.c();
    EcdStructure zar = validate_ecd(c, {prod.ecd.squares[0]});
    EcdStructure gal = validate_ecd(c, {prod.ecd.squares[1], prod.ecd.squares[2]});
    Topology tz = generate_topology(c, zar);
    Topology tg = generate_topology(c, gal);
    auto expect = [&](const EcdStructure& p, const Topology& t, const DensityStructure& d,
                      const FinCategory& cc, const std::string& which) {
      bool pass = check_complete(cc, p, t).passed() && check_regular(cc, p, t).all_regular &&
                  check_bounded(cc, p, d).bounded;
      if (!pass) {
        ok = false;
        detail = which;
      }
    };
    expect(zar, tz, prod.density, c, "zariski component");
    expect(gal, tg, prod.density, c, "galois component");
    expect(prod.ecd, prod.t(), prod.density, c, "union");
    auto slice = localize_ecd(c, prod.ecd, prod.density, c.obj("S"));
    Topology ts = generate_topology(slice.cat, slice.ecd);
    expect(slice.ecd, ts, slice.density, slice.cat, "slice at the Zariski base");
    auto slice2 = localize_ecd(c, prod.ecd, prod.density, c.obj("PT"));
    Topology ts2 = generate_topology(slice2.cat, slice2.ecd);
    expect(slice2.ecd, ts2, slice2.density, slice2.cat, "slice at the Galois base");
    h.report(10, "union and slice structures reproduce the component verdicts", ok, detail);
  }

  auto total = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - h.t0).count();
  std::cout << (h.failures == 0 ? "all criteria passed" : "FAILURES: " + std::to_string(h.failures))
            << " in " << total << "ms" << std::endl;
  return h.failures == 0 ? 0 : 1;
}
