#include "ecdsheaf/descent.hpp"

#include <algorithm>

namespace ecdsheaf {

bool homotopy_cartesian_square(const PresheafComplex& k, const EquivariantSquare& q,
                               int* witness_degree) {
  if (k.empty()) return true;
  const FinCategory& c = *k.cat;
  SectionComplex a = sections_at(k, q.S);
  SectionComplex bs = sections_at(k, q.Sp);
  // fixed-point section complexes with bases for the connecting maps
  std::vector<Mat> bx, bxp;
  SectionComplex fx, fxp;
  fx.lo = fxp.lo = k.lo;
  fx.hi = fxp.hi = k.hi;
  for (int d = k.lo; d <= k.hi; ++d) {
    const QPresheaf& term = *k.term(d);
    auto proj = [&](const GroupAction& act) {
      Mat p = Mat::Zero(term.d(act.carrier), term.d(act.carrier));
      for (int g = 0; g < act.group->n(); ++g) p += term.r(act.act[static_cast<size_t>(g)]);
      p *= rat(1, act.group->n());
      return image_basis(p);
    };
    bx.push_back(proj(q.act_X));
    bxp.push_back(proj(q.act_Xp));
    fx.dims.push_back(bx.back().cols());
    fxp.dims.push_back(bxp.back().cols());
  }
  for (int d = k.lo; d < k.hi; ++d) {
    fx.d.push_back(coords_in(bx[static_cast<size_t>(d + 1 - k.lo)],
                             k.diff(d).at(q.X) * bx[static_cast<size_t>(d - k.lo)]));
    fxp.d.push_back(coords_in(bxp[static_cast<size_t>(d + 1 - k.lo)],
                              k.diff(d).at(q.Xp) * bxp[static_cast<size_t>(d - k.lo)]));
  }
  SectionComplex mid = section_sum(fx, bs);
  std::vector<Mat> alpha, beta;
  for (int d = k.lo; d <= k.hi; ++d) {
    const QPresheaf& term = *k.term(d);
    Mat ax = coords_in(bx[static_cast<size_t>(d - k.lo)], term.r(q.f));
    alpha.push_back(vcat({ax, term.r(q.g)}));
    Mat b1 = coords_in(bxp[static_cast<size_t>(d - k.lo)],
                       term.r(q.gp) * bx[static_cast<size_t>(d - k.lo)]);
    Mat b2 = coords_in(bxp[static_cast<size_t>(d - k.lo)], term.r(q.fp));
    beta.push_back(hcat({b1, -b2}));
  }
  ThreeTermTotal tot = three_term_total(a, mid, fxp, alpha, beta, k.lo);
  if (witness_degree) *witness_degree = tot.witness_degree;
  (void)c;
  return tot.acyclic;
}

bool initial_cover_acyclic(const PresheafComplex& k, int* witness_degree) {
  if (k.empty()) return true;
  SectionComplex s = sections_at(k, k.cat->initial);
  for (int d = k.lo; d <= k.hi; ++d)
    if (s.homology_dim(d) != 0) {
      if (witness_degree) *witness_degree = d;
      return false;
    }
  return true;
}

HypothesisReport check_hypotheses(const FinCategory& c, const EcdStructure& p,
                                  const DensityStructure& d, const Topology& t) {
  HypothesisReport rep;
  rep.complete = check_complete(c, p, t);
  rep.regular = check_regular(c, p, t);
  rep.bounded = check_bounded(c, p, d);
  return rep;
}

DescentVerdict check_square_locality_equivalence(const FinCategory& c, const EcdStructure& p,
                                                 const DensityStructure& d, const Topology& t,
                                                 const PresheafComplex& k) {
  DescentVerdict v;
  HypothesisReport hyp = check_hypotheses(c, p, d, t);
  v.conditional = !hyp.all_pass() ||
                  hyp.complete.status == CompleteStatus::Inconclusive;
  // squares of P plus existing base changes that are again members
  std::vector<EquivariantSquare> squares = p.squares;
  for (const auto& q : p.squares)
    for (auto& b : base_change_squares(c, q))
      if (p.member(c, b)) squares.push_back(b);
  for (const auto& q : squares) {
    bool ok = homotopy_cartesian_square(k, q);
    v.square_table.push_back({q.name, ok});
    v.all_squares = v.all_squares && ok;
  }
  bool empt = initial_cover_acyclic(k);
  v.square_table.push_back({"empty-cover(initial)", empt});
  v.all_squares = v.all_squares && empt;
  int n = std::max(1, max_dim_d(c, d));
  v.locality = is_t_local(k, t, n, hyp.all_pass());
  if (v.locality.verdict != Locality::Inconclusive)
    v.agreement = (v.locality.verdict == Locality::Local) == v.all_squares;
  return v;
}

VanishingReport check_vanishing(const FinCategory& c, const EcdStructure& p,
                                const DensityStructure& d, const Topology& t,
                                const QPresheaf& f) {
  VanishingReport rep;
  HypothesisReport hyp = check_hypotheses(c, p, d, t);
  rep.hypotheses_pass = hyp.all_pass();
  rep.conditional = !rep.hypotheses_pass;
  for (int s = 0; s < c.n_obj(); ++s) {
    VanishingReport::Row row;
    row.object = s;
    row.dim = dim_d(c, d, s);
    CohomologyReport cr = sheaf_cohomology(c, s, f, t, row.dim + 2);
    row.dims = cr.dims;
    for (int n = row.dim + 1; n <= row.dim + 2; ++n)
      if (cr.dims[static_cast<size_t>(n)] != 0) {
        rep.ok = false;
        rep.witness = "H^" + std::to_string(n) + "(" + c.objects[static_cast<size_t>(s)] +
                      ") has dimension " + std::to_string(cr.dims[static_cast<size_t>(n)]) +
                      (rep.hypotheses_pass ? " with all hypotheses certified"
                                           : " (hypotheses not certified)");
      }
    rep.table.push_back(std::move(row));
  }
  return rep;
}

UnionPrimeReport check_union_prime_equivalence(const FinCategory& c, const EcdStructure& p,
                                               const DensityStructure& d, const Topology& t,
                                               const PresheafComplex& k) {
  UnionPrimeReport rep;
  for (const auto& q : p.squares)
    if (!is_mono(c, q.g))
      throw EngineError("NotMono", "union equivalence requires monomorphism base edges");
  DerivePrimeResult dp = derive_prime(c, p);
  Topology t_union = generate_topology(c, dp.with_original);
  int n = std::max(1, max_dim_d(c, d));
  for (const auto& q : dp.prime.squares)
    rep.side_squares = rep.side_squares && homotopy_cartesian_square(k, q);
  rep.base_local = is_t_local(k, t, n, true);
  rep.union_local = is_t_local(k, t_union, n, true);
  rep.side_i = rep.base_local.verdict == Locality::Local && rep.side_squares;
  rep.side_ii = rep.union_local.verdict == Locality::Local;
  rep.agree = rep.side_i == rep.side_ii;
  return rep;
}

}  // namespace ecdsheaf
