#include "ecdsheaf/ecd_types.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace ecdsheaf {

std::vector<Violation> validate_square(const FinCategory& c, const EquivariantSquare& q) {
  std::vector<Violation> bad;
  auto typed = [&](int m, int s, int t, const char* which) {
    if (m < 0 || m >= c.n_mor() || c.src(m) != s || c.tgt(m) != t)
      bad.push_back({"MalformedComposition", std::string("square edge ") + which + " is ill-typed"});
  };
  typed(q.gp, q.Xp, q.X, "gp");
  typed(q.fp, q.Xp, q.Sp, "fp");
  typed(q.g, q.Sp, q.S, "g");
  typed(q.f, q.X, q.S, "f");
  if (!bad.empty()) return bad;
  if (c.compose(q.f, q.gp) != c.compose(q.g, q.fp))
    bad.push_back({"NotCommutative", "f∘gp != g∘fp in square " + q.name});
  for (const auto& v : validate_group_action(c, q.act_X)) bad.push_back(v);
  for (const auto& v : validate_group_action(c, q.act_Xp)) bad.push_back(v);
  if (q.act_X.carrier != q.X || q.act_X.over != q.f)
    bad.push_back({"NotOver", "X-action of " + q.name + " is not over f"});
  if (q.act_Xp.carrier != q.Xp || q.act_Xp.over != q.fp)
    bad.push_back({"NotOver", "X'-action of " + q.name + " is not over fp"});
  if (q.act_X.group->n() != q.act_Xp.group->n())
    bad.push_back({"NotEquivariant", "actions of " + q.name + " use different groups"});
  if (!bad.empty()) return bad;
  for (int h = 0; h < q.act_X.group->n(); ++h)
    if (c.compose(q.gp, q.act_Xp.act[static_cast<size_t>(h)]) !=
        c.compose(q.act_X.act[static_cast<size_t>(h)], q.gp))
      bad.push_back({"NotEquivariant",
                     "gp is not equivariant at " + q.act_X.group->elems[static_cast<size_t>(h)]});
  return bad;
}

/// All isomorphisms of finite groups a -> b (small orders only).
std::vector<std::vector<int>> group_isomorphisms(const FinGroup& a, const FinGroup& b) {
  std::vector<std::vector<int>> out;
  int n = a.n();
  if (n != b.n()) return out;
  std::vector<int> map(static_cast<size_t>(n), -1);
  std::vector<char> used(static_cast<size_t>(n), 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (map[static_cast<size_t>(a.mul[static_cast<size_t>(x)][static_cast<size_t>(y)])] !=
              b.mul[static_cast<size_t>(map[static_cast<size_t>(x)])][static_cast<size_t>(map[static_cast<size_t>(y)])])
            return;
      out.push_back(map);
      return;
    }
    if (i == a.unit) {
      if (used[static_cast<size_t>(b.unit)]) return;
      map[static_cast<size_t>(i)] = b.unit;
      used[static_cast<size_t>(b.unit)] = 1;
      rec(i + 1);
      used[static_cast<size_t>(b.unit)] = 0;
      map[static_cast<size_t>(i)] = -1;
      return;
    }
    for (int j = 0; j < n; ++j) {
      if (used[static_cast<size_t>(j)] || j == b.unit) continue;
      map[static_cast<size_t>(i)] = j;
      used[static_cast<size_t>(j)] = 1;
      rec(i + 1);
      used[static_cast<size_t>(j)] = 0;
      map[static_cast<size_t>(i)] = -1;
    }
    return;
  };
  rec(0);
  return out;
}

bool squares_isomorphic(const FinCategory& c, const EquivariantSquare& a,
                        const EquivariantSquare& b) {
  for (const auto& phi : group_isomorphisms(*a.act_X.group, *b.act_X.group)) {
    for (int ix : c.isos_between(a.X, b.X))
      for (int ixp : c.isos_between(a.Xp, b.Xp))
        for (int isp : c.isos_between(a.Sp, b.Sp))
          for (int is : c.isos_between(a.S, b.S)) {
            if (c.compose(b.gp, ixp) != c.compose(ix, a.gp)) continue;
            if (c.compose(b.fp, ixp) != c.compose(isp, a.fp)) continue;
            if (c.compose(b.g, isp) != c.compose(is, a.g)) continue;
            if (c.compose(b.f, ix) != c.compose(is, a.f)) continue;
            bool inter = true;
            for (int h = 0; h < a.act_X.group->n() && inter; ++h) {
              int h2 = phi[static_cast<size_t>(h)];
              if (c.compose(ix, a.act_X.act[static_cast<size_t>(h)]) !=
                  c.compose(b.act_X.act[static_cast<size_t>(h2)], ix))
                inter = false;
              if (c.compose(ixp, a.act_Xp.act[static_cast<size_t>(h)]) !=
                  c.compose(b.act_Xp.act[static_cast<size_t>(h2)], ixp))
                inter = false;
            }
            if (inter) return true;
          }
  }
  return false;
}

bool EcdStructure::member(const FinCategory& c, const EquivariantSquare& q) const {
  for (const auto& s : squares)
    if (squares_isomorphic(c, s, q)) return true;
  return false;
}

EcdStructure validate_ecd(const FinCategory& c, const std::vector<EquivariantSquare>& squares) {
  EcdStructure p;
  for (const auto& q : squares) {
    auto bad = validate_square(c, q);
    if (!bad.empty()) throw EngineError(bad.front().code, bad.front().detail);
    if (!p.member(c, q)) p.squares.push_back(q);
  }
  return p;
}

EcdStructure union_ecd(const FinCategory& c, const EcdStructure& p1, const EcdStructure& p2) {
  std::vector<EquivariantSquare> all = p1.squares;
  for (const auto& q : p2.squares) all.push_back(q);
  return validate_ecd(c, all);
}

const std::vector<int>& DensityStructure::level(int obj, int i) const {
  const auto& ls = levels[static_cast<size_t>(obj)];
  if (ls.empty()) throw EngineError("AxiomViolation", "density structure has no levels");
  size_t k = static_cast<size_t>(i) < ls.size() ? static_cast<size_t>(i) : ls.size() - 1;
  return ls[k];
}

std::vector<Violation> validate_density(const FinCategory& c, const DensityStructure& d) {
  std::vector<Violation> bad;
  if (static_cast<int>(d.levels.size()) != c.n_obj()) {
    bad.push_back({"AxiomViolation", "density structure must list every object"});
    return bad;
  }
  int max_levels = 0;
  for (int x = 0; x < c.n_obj(); ++x)
    max_levels = std::max(max_levels, d.n_levels(x));
  for (int x = 0; x < c.n_obj(); ++x) {
    if (d.n_levels(x) == 0) {
      bad.push_back({"AxiomViolation", "object " + c.objects[static_cast<size_t>(x)] + " has no levels"});
      continue;
    }
    for (int i = 0; i < d.n_levels(x); ++i)
      for (int m : d.level(x, i))
        if (m < 0 || m >= c.n_mor() || c.tgt(m) != x)
          bad.push_back({"AxiomViolation", "level entry is not a morphism into " +
                                               c.objects[static_cast<size_t>(x)]});
    if (!bad.empty()) return bad;
    // (i) the morphism from the initial object lies in level 0
    int from_initial = c.hom[static_cast<size_t>(c.initial)][static_cast<size_t>(x)][0];
    const auto& l0 = d.level(x, 0);
    if (std::find(l0.begin(), l0.end(), from_initial) == l0.end())
      bad.push_back({"AxiomViolation", "initial-object morphism missing from level 0 of " +
                                           c.objects[static_cast<size_t>(x)]});
    // (ii) isomorphisms in every level, (iii) descending
    for (int i = 0; i < max_levels; ++i) {
      const auto& li = d.level(x, i);
      for (int y = 0; y < c.n_obj(); ++y)
        for (int m : c.hom[static_cast<size_t>(y)][static_cast<size_t>(x)])
          if (c.is_iso(m) && std::find(li.begin(), li.end(), m) == li.end())
            bad.push_back({"AxiomViolation", "isomorphism " + c.mor_id(m) + " missing from level " +
                                                 std::to_string(i)});
      if (i + 1 < max_levels) {
        const auto& ln = d.level(x, i + 1);
        for (int m : ln)
          if (std::find(li.begin(), li.end(), m) == li.end())
            bad.push_back({"AxiomViolation", "levels of " + c.objects[static_cast<size_t>(x)] +
                                                 " are not descending at " + std::to_string(i)});
      }
    }
  }
  if (!bad.empty()) return bad;
  // (iv) composition closure: g in D_i(X), f: X->S in D_i(S) => f∘g in D_i(S)
  for (int s = 0; s < c.n_obj(); ++s)
    for (int i = 0; i < max_levels; ++i)
      for (int f : d.level(s, i)) {
        int x = c.src(f);
        for (int g : d.level(x, i)) {
          int fg = c.compose(f, g);
          const auto& li = d.level(s, i);
          if (std::find(li.begin(), li.end(), fg) == li.end())
            bad.push_back({"AxiomViolation",
                           "composition closure fails: " + c.mor_id(f) + "∘" + c.mor_id(g)});
        }
      }
  return bad;
}

int dim_d(const FinCategory& c, const DensityStructure& d, int obj) {
  for (int i = 0;; ++i) {
    const auto& li = d.level(obj, i);
    bool all_iso = true;
    for (int m : li)
      if (!c.is_iso(m)) {
        all_iso = false;
        break;
      }
    if (all_iso) return i;
    if (i >= d.n_levels(obj) - 1)
      throw EngineError("InfiniteDimension",
                        "stabilized density level of " + c.objects[static_cast<size_t>(obj)] +
                            " still contains a non-isomorphism");
  }
}

int max_dim_d(const FinCategory& c, const DensityStructure& d) {
  int m = 0;
  for (int x = 0; x < c.n_obj(); ++x) m = std::max(m, dim_d(c, d, x));
  return m;
}

DensityStructure default_density(const FinCategory& c) {
  DensityStructure d;
  d.levels.resize(static_cast<size_t>(c.n_obj()));
  for (int x = 0; x < c.n_obj(); ++x) {
    std::vector<int> all = c.arrows_into[static_cast<size_t>(x)];
    std::vector<int> isos;
    for (int m : all)
      if (c.is_iso(m)) isos.push_back(m);
    d.levels[static_cast<size_t>(x)] = {all, isos};
  }
  return d;
}

SliceResult localize_ecd(const FinCategory& c, const EcdStructure& p, const DensityStructure& d,
                         int s) {
  SliceResult out;
  RawCategory raw;
  // objects of the slice: morphisms a: A -> s; id = "@a"
  std::vector<int> objs;
  for (int a = 0; a < c.n_mor(); ++a)
    if (c.tgt(a) == s) objs.push_back(a);
  auto slice_obj_id = [&](int a) { return "@" + c.mor_id(a); };
  for (int a : objs) raw.objects.push_back(slice_obj_id(a));
  raw.initial = slice_obj_id(c.hom[static_cast<size_t>(c.initial)][static_cast<size_t>(s)][0]);
  // morphisms (a: A->s) -> (b: B->s): h: A->B with b∘h = a
  struct SMor {
    int h, a, b;
  };
  std::vector<SMor> smors;
  auto slice_mor_id = [&](const SMor& m) {
    return c.mor_id(m.h) + "@" + c.mor_id(m.a);
  };
  for (int a : objs)
    for (int b : objs)
      for (int h : c.hom[static_cast<size_t>(c.src(a))][static_cast<size_t>(c.src(b))])
        if (c.compose(b, h) == a) smors.push_back({h, a, b});
  for (const auto& m : smors)
    raw.morphisms.push_back({slice_mor_id(m), slice_obj_id(m.a), slice_obj_id(m.b)});
  for (int a : objs) {
    SMor idm{c.id_mor[static_cast<size_t>(c.src(a))], a, a};
    raw.identities[slice_obj_id(a)] = slice_mor_id(idm);
  }
  for (const auto& m2 : smors)
    for (const auto& m1 : smors) {
      if (m1.b != m2.a) continue;
      SMor comp{c.compose(m2.h, m1.h), m1.a, m2.b};
      raw.compose.push_back({slice_mor_id(m2), slice_mor_id(m1), slice_mor_id(comp)});
    }
  out.cat = validate_category_or_throw(raw);
  out.obj_over.resize(objs.size());
  for (size_t i = 0; i < objs.size(); ++i)
    out.obj_over[static_cast<size_t>(out.cat.obj(slice_obj_id(objs[static_cast<size_t>(i)])))] =
        objs[static_cast<size_t>(i)];
  out.mor_under.resize(smors.size());
  for (const auto& m : smors) out.mor_under[static_cast<size_t>(out.cat.mor(slice_mor_id(m)))] = m.h;

  auto lift_mor = [&](int h, int a, int b) {
    SMor m{h, a, b};
    return out.cat.mor(slice_mor_id(m));
  };
  // transport squares: one slice square per (square, structural map base -> s)
  std::vector<EquivariantSquare> slice_squares;
  for (const auto& q : p.squares)
    for (int t : c.hom[static_cast<size_t>(q.S)][static_cast<size_t>(s)]) {
      EquivariantSquare sq;
      int oS = t;
      int oX = c.compose(t, q.f);
      int oSp = c.compose(t, q.g);
      int oXp = c.compose(oX, q.gp);
      sq.name = q.name + "@" + c.mor_id(t);
      sq.S = out.cat.obj(slice_obj_id(oS));
      sq.X = out.cat.obj(slice_obj_id(oX));
      sq.Sp = out.cat.obj(slice_obj_id(oSp));
      sq.Xp = out.cat.obj(slice_obj_id(oXp));
      sq.f = lift_mor(q.f, oX, oS);
      sq.g = lift_mor(q.g, oSp, oS);
      sq.gp = lift_mor(q.gp, oXp, oX);
      sq.fp = lift_mor(q.fp, oXp, oSp);
      sq.act_X.group = q.act_X.group;
      sq.act_X.carrier = sq.X;
      sq.act_X.over = sq.f;
      for (int h : q.act_X.act) sq.act_X.act.push_back(lift_mor(h, oX, oX));
      sq.act_Xp.group = q.act_Xp.group;
      sq.act_Xp.carrier = sq.Xp;
      sq.act_Xp.over = sq.fp;
      for (int h : q.act_Xp.act) sq.act_Xp.act.push_back(lift_mor(h, oXp, oXp));
      slice_squares.push_back(sq);
    }
  out.ecd = validate_ecd(out.cat, slice_squares);

  // sliced density: a slice morphism lies in level i iff its underlying one does
  out.density.levels.resize(static_cast<size_t>(out.cat.n_obj()));
  for (int so = 0; so < out.cat.n_obj(); ++so) {
    int base_obj = c.src(out.obj_over[static_cast<size_t>(so)]);
    int nl = d.n_levels(base_obj);
    auto& lv = out.density.levels[static_cast<size_t>(so)];
    lv.resize(static_cast<size_t>(nl));
    for (int m : out.cat.arrows_into[static_cast<size_t>(so)]) {
      int uh = out.mor_under[static_cast<size_t>(m)];
      for (int i = 0; i < nl; ++i) {
        const auto& li = d.level(base_obj, i);
        if (std::find(li.begin(), li.end(), uh) != li.end())
          lv[static_cast<size_t>(i)].push_back(m);
      }
    }
  }
  return out;
}

}  // namespace ecdsheaf
