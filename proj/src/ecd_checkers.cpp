#include "ecdsheaf/ecd_checkers.hpp"

#include <algorithm>
#include <set>

namespace ecdsheaf {

namespace {

/// Mediating morphism into a certified pullback: the unique m with
/// to_x∘m = a and to_y∘m = b.
int mediate(const FinCategory& c, const PullbackResult& pb, int from, int a, int b) {
  for (int m : c.hom[static_cast<size_t>(from)][static_cast<size_t>(pb.apex)])
    if (c.compose(pb.to_x, m) == a && c.compose(pb.to_y, m) == b) return m;
  throw EngineError("MissingPullback", "no mediating morphism into a pullback");
}

/// Mediating morphism out of a certified coproduct.
int comediate(const FinCategory& c, const CoproductResult& cp, int to, const std::vector<int>& legs) {
  for (int m : c.hom[static_cast<size_t>(cp.obj)][static_cast<size_t>(to)]) {
    bool ok = true;
    for (size_t i = 0; i < legs.size(); ++i)
      if (c.compose(m, cp.injections[i]) != legs[i]) {
        ok = false;
        break;
      }
    if (ok) return m;
  }
  throw EngineError("MissingCoproduct", "no mediating morphism out of a coproduct");
}

bool is_cartesian(const FinCategory& c, const EquivariantSquare& q) {
  auto pb = pullback(c, q.f, q.g);
  if (!pb) return false;
  for (int iso : c.isos_between(q.Xp, pb->apex))
    if (c.compose(pb->to_x, iso) == q.gp && c.compose(pb->to_y, iso) == q.fp) return true;
  return false;
}

}  // namespace

DerivePrimeResult derive_prime(const FinCategory& c, const EcdStructure& p) {
  std::vector<EquivariantSquare> derived;
  for (const auto& q : p.squares) {
    if (!is_mono(c, q.g))
      throw EngineError("NotMono", "derived structure requires a monomorphism on the base edge");
    auto xx = pullback(c, q.f, q.f);
    auto xpxp = pullback(c, q.fp, q.fp);
    if (!xx || !xpxp)
      throw EngineError("MissingPullback", "self-pullback missing for square " + q.name);
    int n = q.act_X.group->n();
    auto gx = coproduct(c, std::vector<int>(static_cast<size_t>(n), q.X));
    auto gxp = coproduct(c, std::vector<int>(static_cast<size_t>(n), q.Xp));
    if (!gx || !gxp)
      throw EngineError("MissingCoproduct", "group product missing for square " + q.name);
    EquivariantSquare d;
    d.name = q.name + "'";
    d.Xp = gxp->obj;
    d.X = gx->obj;
    d.Sp = xpxp->apex;
    d.S = xx->apex;
    // u: G x X -> X x_S X, copy g |-> (id, sigma_g); same on the primed side
    std::vector<int> legs_u, legs_up, legs_vp;
    for (int g = 0; g < n; ++g) {
      legs_u.push_back(mediate(c, *xx, q.X, c.id_mor[static_cast<size_t>(q.X)],
                               q.act_X.act[static_cast<size_t>(g)]));
      legs_up.push_back(mediate(c, *xpxp, q.Xp, c.id_mor[static_cast<size_t>(q.Xp)],
                                q.act_Xp.act[static_cast<size_t>(g)]));
      legs_vp.push_back(c.compose(gx->injections[static_cast<size_t>(g)], q.gp));
    }
    d.f = comediate(c, *gx, xx->apex, legs_u);
    d.fp = comediate(c, *gxp, xpxp->apex, legs_up);
    d.gp = comediate(c, *gxp, gx->obj, legs_vp);
    d.g = mediate(c, *xx, xpxp->apex, c.compose(q.gp, xpxp->to_x), c.compose(q.gp, xpxp->to_y));
    d.act_X = trivial_action(c, d.X, d.f);
    d.act_Xp = trivial_action(c, d.Xp, d.fp);
    auto bad = validate_square(c, d);
    if (!bad.empty())
      throw EngineError(bad.front().code, "derived square invalid: " + bad.front().detail);
    derived.push_back(std::move(d));
  }
  DerivePrimeResult res;
  res.prime = validate_ecd(c, derived);
  res.with_original = union_ecd(c, p, res.prime);
  return res;
}

std::optional<EquivariantSquare> base_change_along(const FinCategory& c,
                                                   const EquivariantSquare& q, int y) {
  if (c.tgt(y) != q.S) return std::nullopt;
  int yobj = c.src(y);
  auto px = pullback(c, q.f, y);
  auto psp = pullback(c, q.g, y);
  auto pxp = pullback(c, c.compose(q.f, q.gp), y);
  if (!px || !psp || !pxp) return std::nullopt;
  EquivariantSquare b;
  b.name = q.name + "x" + c.mor_id(y);
  b.X = px->apex;
  b.Sp = psp->apex;
  b.Xp = pxp->apex;
  b.S = yobj;
  b.f = px->to_y;
  b.g = psp->to_y;
  try {
    b.gp = mediate(c, *px, b.Xp, c.compose(q.gp, pxp->to_x), pxp->to_y);
    b.fp = mediate(c, *psp, b.Xp, c.compose(q.fp, pxp->to_x), pxp->to_y);
    int ng = q.act_X.group->n();
    b.act_X.group = q.act_X.group;
    b.act_X.carrier = b.X;
    b.act_X.over = b.f;
    b.act_Xp.group = q.act_Xp.group;
    b.act_Xp.carrier = b.Xp;
    b.act_Xp.over = b.fp;
    for (int g = 0; g < ng; ++g) {
      b.act_X.act.push_back(mediate(c, *px, b.X,
                                    c.compose(q.act_X.act[static_cast<size_t>(g)], px->to_x),
                                    px->to_y));
      b.act_Xp.act.push_back(mediate(c, *pxp, b.Xp,
                                     c.compose(q.act_Xp.act[static_cast<size_t>(g)], pxp->to_x),
                                     pxp->to_y));
    }
  } catch (const EngineError&) {
    return std::nullopt;
  }
  if (!validate_square(c, b).empty()) return std::nullopt;
  return b;
}

std::vector<EquivariantSquare> base_change_squares(const FinCategory& c,
                                                   const EquivariantSquare& q) {
  std::vector<EquivariantSquare> out;
  for (int y = 0; y < c.n_mor(); ++y) {
    if (c.tgt(y) != q.S) continue;
    if (auto b = base_change_along(c, q, y)) out.push_back(std::move(*b));
  }
  return out;
}

CompleteVerdict check_complete(const FinCategory& c, const EcdStructure& p, const Topology& t,
                               BaseChangeReading reading) {
  CompleteVerdict v;
  // sufficient route
  bool into_initial_iso = true;
  for (int m = 0; m < c.n_mor(); ++m)
    if (c.tgt(m) == c.initial && !c.is_iso(m)) into_initial_iso = false;
  bool closed = true;
  for (const auto& q : p.squares) {
    std::vector<int> along;
    if (reading == BaseChangeReading::IntoBase) {
      for (int y = 0; y < c.n_mor(); ++y)
        if (c.tgt(y) == q.S) along.push_back(y);
    } else {
      for (int y = 0; y < c.n_mor(); ++y)
        if (c.tgt(y) == q.X) along.push_back(c.compose(q.f, y));
    }
    for (int y : along) {
      auto b = base_change_along(c, q, y);
      if (!b || !p.member(c, *b)) {
        closed = false;
        break;
      }
    }
    if (!closed) break;
  }
  v.sufficient_route = into_initial_iso && closed;
  // direct route: every covering sieve of a non-initial object contains a
  // sieve generated by a simple cover
  bool inconclusive = false;
  bool all_ok = true;
  std::string witness;
  int depth = default_simple_cover_depth(c);
  for (int x = 0; x < c.n_obj() && all_ok; ++x) {
    int into = c.hom[static_cast<size_t>(c.initial)][static_cast<size_t>(x)][0];
    if (c.is_iso(into)) continue;  // the initial object itself
    for (const auto& r : t.covers[static_cast<size_t>(x)]) {
      auto sv = is_simple_cover(c, sieve_members(c, r), p, depth);
      if (sv.is_simple) continue;
      if (sv.bound_reached) {
        inconclusive = true;
      } else {
        all_ok = false;
        witness = "covering sieve of " + c.objects[static_cast<size_t>(x)] +
                  " contains no simple-cover sieve";
        break;
      }
    }
  }
  v.direct_route = all_ok && !inconclusive;
  v.witness = witness;
  if (v.sufficient_route)
    v.status = CompleteStatus::CompleteSufficient;
  else if (v.direct_route)
    v.status = CompleteStatus::CompleteDirect;
  else if (!all_ok)
    v.status = CompleteStatus::Incomplete;
  else
    v.status = CompleteStatus::Inconclusive;
  return v;
}

RegularVerdict check_regular(const FinCategory& c, const EcdStructure& p, const Topology& t) {
  RegularVerdict out;
  for (const auto& q : p.squares) {
    RegularSquareVerdict v;
    v.square = q.name;
    v.cartesian = is_cartesian(c, q);
    v.mono = is_mono(c, q.g);
    if (v.cartesian && v.mono) {
      try {
        auto cmpr = regularity_map(c, q, t);
        SetMap phi = cmpr.comparison;
        v.comparison_epi = is_epi(phi, t);
      } catch (const EngineError& e) {
        v.detail = e.what();
      }
    } else {
      v.detail = !v.cartesian ? "square is not Cartesian" : "base edge is not a monomorphism";
    }
    // pullback-family cover route
    auto xx = pullback(c, q.f, q.f);
    auto xpxp = pullback(c, q.fp, q.fp);
    int n = q.act_X.group->n();
    auto gx = coproduct(c, std::vector<int>(static_cast<size_t>(n), q.X));
    if (xx && xpxp && gx) {
      v.cover_route_available = true;
      try {
        std::vector<int> legs_u;
        for (int g = 0; g < n; ++g)
          legs_u.push_back(mediate(c, *xx, q.X, c.id_mor[static_cast<size_t>(q.X)],
                                   q.act_X.act[static_cast<size_t>(g)]));
        int u = comediate(c, *gx, xx->apex, legs_u);
        int vmor = mediate(c, *xx, xpxp->apex, c.compose(q.gp, xpxp->to_x),
                           c.compose(q.gp, xpxp->to_y));
        Sieve fam = sieve_generated(c, xx->apex, {vmor, u});
        v.cover_route = t.covering(fam);
      } catch (const EngineError& e) {
        v.cover_route_available = false;
        v.detail += std::string(" cover route: ") + e.what();
      }
    }
    v.regular = v.cartesian && v.mono && (v.comparison_epi || v.cover_route);
    out.all_regular = out.all_regular && v.regular;
    out.squares.push_back(std::move(v));
  }
  return out;
}

namespace {

bool in_level(const DensityStructure& d, int obj, int level, int mor) {
  const auto& l = d.level(obj, level);
  return std::find(l.begin(), l.end(), mor) != l.end();
}

/// Morphisms of distinguished squares cand -> q with the group identified by
/// phi; returns tuples (mxp, mx, msp, ms).
std::vector<std::array<int, 4>> square_morphisms(const FinCategory& c,
                                                 const EquivariantSquare& cand,
                                                 const EquivariantSquare& q) {
  std::vector<std::array<int, 4>> out;
  for (const auto& phi : group_isomorphisms(*cand.act_X.group, *q.act_X.group)) {
    for (int mx : c.hom[static_cast<size_t>(cand.X)][static_cast<size_t>(q.X)]) {
      bool eq = true;
      for (int h = 0; h < cand.act_X.group->n() && eq; ++h)
        if (c.compose(mx, cand.act_X.act[static_cast<size_t>(h)]) !=
            c.compose(q.act_X.act[static_cast<size_t>(phi[static_cast<size_t>(h)])], mx))
          eq = false;
      if (!eq) continue;
      for (int mxp : c.hom[static_cast<size_t>(cand.Xp)][static_cast<size_t>(q.Xp)]) {
        bool eqp = true;
        for (int h = 0; h < cand.act_Xp.group->n() && eqp; ++h)
          if (c.compose(mxp, cand.act_Xp.act[static_cast<size_t>(h)]) !=
              c.compose(q.act_Xp.act[static_cast<size_t>(phi[static_cast<size_t>(h)])], mxp))
            eqp = false;
        if (!eqp) continue;
        if (c.compose(q.gp, mxp) != c.compose(mx, cand.gp)) continue;
        for (int msp : c.hom[static_cast<size_t>(cand.Sp)][static_cast<size_t>(q.Sp)]) {
          if (c.compose(q.fp, mxp) != c.compose(msp, cand.fp)) continue;
          for (int ms : c.hom[static_cast<size_t>(cand.S)][static_cast<size_t>(q.S)]) {
            if (c.compose(q.f, mx) != c.compose(ms, cand.f)) continue;
            if (c.compose(q.g, msp) != c.compose(ms, cand.g)) continue;
            out.push_back({mxp, mx, msp, ms});
          }
        }
      }
    }
  }
  return out;
}

bool factors_through(const FinCategory& c, int m, int through) {
  // m = through ∘ w for some w
  if (c.tgt(m) != c.tgt(through)) return false;
  for (int w : c.hom[static_cast<size_t>(c.src(m))][static_cast<size_t>(c.src(through))])
    if (c.compose(through, w) == m) return true;
  return false;
}

}  // namespace

ReducingVerdict is_reducing(const FinCategory& c, const EquivariantSquare& q,
                            const DensityStructure& d, const EcdStructure& p,
                            ReducingCorner corner) {
  ReducingVerdict v;
  int maxn = 0;
  for (int obj : {q.X, q.Sp, q.Xp, q.S}) maxn = std::max(maxn, d.n_levels(obj));
  // precompute candidate square morphisms once per candidate square
  std::vector<std::pair<const EquivariantSquare*, std::vector<std::array<int, 4>>>> cands;
  for (const auto& cq : p.squares) cands.push_back({&cq, square_morphisms(c, cq, q)});
  for (int i = 0; i <= maxn; ++i) {
    int up = i + 1;
    int corner_level = corner == ReducingCorner::SameLevel ? i + 1 : i;
    for (int x0 : d.level(q.X, up))
      for (int sp0 : d.level(q.Sp, up))
        for (int xp0 : d.level(q.Xp, corner_level)) {
          bool found = false;
          for (const auto& [cq, morphs] : cands) {
            for (const auto& m : morphs) {
              // m = (mxp, mx, msp, ms)
              if (!in_level(d, q.S, up, m[3])) continue;
              if (!factors_through(c, m[1], x0)) continue;
              if (!factors_through(c, m[2], sp0)) continue;
              if (!factors_through(c, m[0], xp0)) continue;
              found = true;
              break;
            }
            if (found) break;
          }
          if (!found) {
            v.reducing = false;
            v.witness = "level " + std::to_string(i) + ": (" + c.mor_id(x0) + ", " +
                        c.mor_id(sp0) + ", " + c.mor_id(xp0) + ")";
            return v;
          }
        }
  }
  return v;
}

BoundedVerdict check_bounded(const FinCategory& c, const EcdStructure& p,
                             const DensityStructure& d, ReducingCorner corner) {
  BoundedVerdict v;
  // dimensions must be finite
  for (int x = 0; x < c.n_obj(); ++x) dim_d(c, d, x);  // throws InfiniteDimension
  for (const auto& q : p.squares) {
    bool ok = false;
    std::string last;
    for (const auto& cq : p.squares) {
      // refinements: morphisms of squares cq -> q that are isos on the base
      for (const auto& m : square_morphisms(c, cq, q)) {
        if (!c.is_iso(m[3])) continue;
        auto rv = is_reducing(c, cq, d, p, corner);
        if (rv.reducing) {
          ok = true;
          break;
        }
        last = rv.witness;
      }
      if (ok) break;
    }
    if (!ok) {
      v.bounded = false;
      v.witness = "square " + q.name + " has no reducing refinement" +
                  (last.empty() ? "" : " (" + last + ")");
      return v;
    }
  }
  return v;
}

}  // namespace ecdsheaf
