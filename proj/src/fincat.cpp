#include "ecdsheaf/fincat.hpp"

#include <algorithm>
#include <set>

namespace ecdsheaf {

int FinCategory::compose(int g, int f) const {
  int r = comp[static_cast<size_t>(g)][static_cast<size_t>(f)];
  if (r < 0)
    throw EngineError("MalformedComposition",
                      "not composable: " + mor_id(g) + " after " + mor_id(f));
  return r;
}

int FinCategory::obj(const std::string& id) const {
  auto it = obj_ix.find(id);
  if (it == obj_ix.end()) throw EngineError("UnknownObject", id);
  return it->second;
}

int FinCategory::mor(const std::string& id) const {
  auto it = mor_ix.find(id);
  if (it == mor_ix.end()) throw EngineError("UnknownMorphism", id);
  return it->second;
}

int FinCategory::into_pos(int m) const {
  const auto& in = arrows_into[static_cast<size_t>(tgt(m))];
  auto it = std::find(in.begin(), in.end(), m);
  return static_cast<int>(it - in.begin());
}

bool FinCategory::is_iso(int m, int* inverse) const {
  for (int h : hom[static_cast<size_t>(tgt(m))][static_cast<size_t>(src(m))]) {
    if (comp[static_cast<size_t>(h)][static_cast<size_t>(m)] == id_mor[static_cast<size_t>(src(m))] &&
        comp[static_cast<size_t>(m)][static_cast<size_t>(h)] == id_mor[static_cast<size_t>(tgt(m))]) {
      if (inverse) *inverse = h;
      return true;
    }
  }
  return false;
}

std::vector<int> FinCategory::isos_between(int x, int y) const {
  std::vector<int> out;
  for (int m : hom[static_cast<size_t>(x)][static_cast<size_t>(y)])
    if (is_iso(m)) out.push_back(m);
  return out;
}

RawCategory FinCategory::to_raw() const {
  RawCategory raw;
  raw.objects = objects;
  raw.initial = objects[static_cast<size_t>(initial)];
  for (const auto& m : mors)
    raw.morphisms.push_back({m.id, objects[static_cast<size_t>(m.src)], objects[static_cast<size_t>(m.tgt)]});
  for (int x = 0; x < n_obj(); ++x)
    raw.identities[objects[static_cast<size_t>(x)]] = mor_id(id_mor[static_cast<size_t>(x)]);
  for (int g = 0; g < n_mor(); ++g)
    for (int f = 0; f < n_mor(); ++f)
      if (comp[static_cast<size_t>(g)][static_cast<size_t>(f)] >= 0)
        raw.compose.push_back({mor_id(g), mor_id(f), mor_id(comp[static_cast<size_t>(g)][static_cast<size_t>(f)])});
  std::sort(raw.compose.begin(), raw.compose.end());
  return raw;
}

CategoryOrViolations validate_category(const RawCategory& raw) {
  std::vector<Violation> bad;
  FinCategory c;
  c.objects = raw.objects;
  for (int i = 0; i < c.n_obj(); ++i) {
    if (!c.obj_ix.emplace(c.objects[static_cast<size_t>(i)], i).second)
      bad.push_back({"MalformedComposition", "duplicate object id " + c.objects[static_cast<size_t>(i)]});
  }
  for (const auto& m : raw.morphisms) {
    FinCategory::Mor mm;
    mm.id = m.id;
    auto s = c.obj_ix.find(m.src), t = c.obj_ix.find(m.tgt);
    if (s == c.obj_ix.end() || t == c.obj_ix.end()) {
      bad.push_back({"MalformedComposition", "morphism " + m.id + " references unknown object"});
      continue;
    }
    mm.src = s->second;
    mm.tgt = t->second;
    if (!c.mor_ix.emplace(m.id, static_cast<int>(c.mors.size())).second) {
      bad.push_back({"MalformedComposition", "duplicate morphism id " + m.id});
      continue;
    }
    c.mors.push_back(mm);
  }
  if (!bad.empty()) return bad;

  int n = c.n_mor();
  c.comp.assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), -1));
  for (const auto& e : raw.compose) {
    auto g = c.mor_ix.find(e[0]), f = c.mor_ix.find(e[1]), gf = c.mor_ix.find(e[2]);
    if (g == c.mor_ix.end() || f == c.mor_ix.end() || gf == c.mor_ix.end()) {
      bad.push_back({"MalformedComposition", "composition entry references unknown morphism (" +
                                                 e[0] + "," + e[1] + "," + e[2] + ")"});
      continue;
    }
    if (c.src(g->second) != c.tgt(f->second)) {
      bad.push_back({"MalformedComposition", "entry for non-composable pair (" + e[0] + "," + e[1] + ")"});
      continue;
    }
    if (c.src(gf->second) != c.src(f->second) || c.tgt(gf->second) != c.tgt(g->second)) {
      bad.push_back({"MalformedComposition", "ill-typed composite in entry (" + e[0] + "," + e[1] + ")"});
      continue;
    }
    c.comp[static_cast<size_t>(g->second)][static_cast<size_t>(f->second)] = gf->second;
  }
  // totality
  for (int g = 0; g < n; ++g)
    for (int f = 0; f < n; ++f)
      if (c.src(g) == c.tgt(f) && c.comp[static_cast<size_t>(g)][static_cast<size_t>(f)] < 0)
        bad.push_back({"MalformedComposition",
                       "missing composite for pair (" + c.mor_id(g) + "," + c.mor_id(f) + ")"});
  if (!bad.empty()) return bad;

  // identities
  c.id_mor.assign(static_cast<size_t>(c.n_obj()), -1);
  for (const auto& [ob, mid] : raw.identities) {
    auto oi = c.obj_ix.find(ob);
    auto mi = c.mor_ix.find(mid);
    if (oi == c.obj_ix.end() || mi == c.mor_ix.end()) {
      bad.push_back({"MalformedComposition", "identity entry references unknown id " + ob});
      continue;
    }
    c.id_mor[static_cast<size_t>(oi->second)] = mi->second;
  }
  for (int x = 0; x < c.n_obj() && bad.empty(); ++x) {
    int e = c.id_mor[static_cast<size_t>(x)];
    if (e < 0) {
      bad.push_back({"NotUnital", "no identity assigned to object " + c.objects[static_cast<size_t>(x)]});
      continue;
    }
    if (c.src(e) != x || c.tgt(e) != x)
      bad.push_back({"NotUnital", "identity of " + c.objects[static_cast<size_t>(x)] + " is not an endomorphism"});
  }
  if (!bad.empty()) return bad;

  // unit laws
  for (int f = 0; f < n; ++f) {
    if (c.comp[static_cast<size_t>(f)][static_cast<size_t>(c.id_mor[static_cast<size_t>(c.src(f))])] != f)
      bad.push_back({"NotUnital", "f∘id != f for " + c.mor_id(f)});
    if (c.comp[static_cast<size_t>(c.id_mor[static_cast<size_t>(c.tgt(f))])][static_cast<size_t>(f)] != f)
      bad.push_back({"NotUnital", "id∘f != f for " + c.mor_id(f)});
  }
  // associativity over all composable triples
  for (int h = 0; h < n; ++h)
    for (int g = 0; g < n; ++g) {
      if (c.src(h) != c.tgt(g)) continue;
      for (int f = 0; f < n; ++f) {
        if (c.src(g) != c.tgt(f)) continue;
        int hg = c.comp[static_cast<size_t>(h)][static_cast<size_t>(g)];
        int gf = c.comp[static_cast<size_t>(g)][static_cast<size_t>(f)];
        if (c.comp[static_cast<size_t>(hg)][static_cast<size_t>(f)] !=
            c.comp[static_cast<size_t>(h)][static_cast<size_t>(gf)])
          bad.push_back({"NotAssociative", "witness triple (" + c.mor_id(h) + "," + c.mor_id(g) +
                                               "," + c.mor_id(f) + ")"});
      }
    }
  if (!bad.empty()) return bad;

  // hom table, arrows_into (canonical id-sorted order)
  c.hom.assign(static_cast<size_t>(c.n_obj()),
               std::vector<std::vector<int>>(static_cast<size_t>(c.n_obj())));
  c.arrows_into.assign(static_cast<size_t>(c.n_obj()), {});
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return c.mor_id(a) < c.mor_id(b); });
  for (int m : order) {
    c.hom[static_cast<size_t>(c.src(m))][static_cast<size_t>(c.tgt(m))].push_back(m);
    c.arrows_into[static_cast<size_t>(c.tgt(m))].push_back(m);
  }

  // initial object: exactly one morphism to every object
  auto ii = c.obj_ix.find(raw.initial);
  if (ii == c.obj_ix.end()) {
    bad.push_back({"NotInitial", "unknown initial object " + raw.initial});
    return bad;
  }
  c.initial = ii->second;
  for (int x = 0; x < c.n_obj(); ++x) {
    size_t k = c.hom[static_cast<size_t>(c.initial)][static_cast<size_t>(x)].size();
    if (k != 1)
      bad.push_back({"NotInitial", "object " + c.objects[static_cast<size_t>(x)] + " has " +
                                       std::to_string(k) + " morphisms from the initial object"});
  }
  if (!bad.empty()) return bad;
  return c;
}

FinCategory validate_category_or_throw(const RawCategory& raw) {
  auto r = validate_category(raw);
  if (std::holds_alternative<FinCategory>(r)) return std::get<FinCategory>(std::move(r));
  const auto& v = std::get<std::vector<Violation>>(r);
  throw EngineError(v.front().code, v.front().detail);
}

bool is_mono(const FinCategory& c, int f) {
  int x = c.src(f);
  for (int w = 0; w < c.n_obj(); ++w) {
    const auto& par = c.hom[static_cast<size_t>(w)][static_cast<size_t>(x)];
    for (size_t i = 0; i < par.size(); ++i)
      for (size_t j = i + 1; j < par.size(); ++j)
        if (c.compose(f, par[i]) == c.compose(f, par[j])) return false;
  }
  return true;
}

std::optional<PullbackResult> pullback(const FinCategory& c, int f, int g) {
  if (c.tgt(f) != c.tgt(g)) throw EngineError("MalformedComposition", "pullback of a non-cospan");
  int x = c.src(f), y = c.src(g);
  // all cones: (w, a: w->x, b: w->y) with f∘a = g∘b
  std::vector<std::array<int, 3>> cones;
  for (int w = 0; w < c.n_obj(); ++w)
    for (int a : c.hom[static_cast<size_t>(w)][static_cast<size_t>(x)])
      for (int b : c.hom[static_cast<size_t>(w)][static_cast<size_t>(y)])
        if (c.compose(f, a) == c.compose(g, b)) cones.push_back({w, a, b});
  for (const auto& apex : cones) {
    PullbackResult res;
    res.apex = apex[0];
    res.to_x = apex[1];
    res.to_y = apex[2];
    bool universal = true;
    res.mediators.clear();
    for (const auto& cone : cones) {
      int found = -1, count = 0;
      for (int m : c.hom[static_cast<size_t>(cone[0])][static_cast<size_t>(res.apex)])
        if (c.compose(res.to_x, m) == cone[1] && c.compose(res.to_y, m) == cone[2]) {
          found = m;
          ++count;
        }
      if (count != 1) {
        universal = false;
        break;
      }
      res.mediators.push_back({cone[0], cone[1], cone[2], found});
    }
    if (universal) return res;
  }
  return std::nullopt;
}

std::optional<CoproductResult> coproduct(const FinCategory& c, const std::vector<int>& objs) {
  size_t k = objs.size();
  // candidate cocones: object p with injections objs[i] -> p
  for (int p = 0; p < c.n_obj(); ++p) {
    std::vector<std::vector<int>> inj_choices;
    bool possible = true;
    for (int o : objs) {
      const auto& hs = c.hom[static_cast<size_t>(o)][static_cast<size_t>(p)];
      if (hs.empty()) {
        possible = false;
        break;
      }
      inj_choices.push_back(hs);
    }
    if (!possible) continue;
    // iterate over injection tuples
    std::vector<size_t> pick(k, 0);
    while (true) {
      CoproductResult res;
      res.obj = p;
      for (size_t i = 0; i < k; ++i) res.injections.push_back(inj_choices[i][pick[i]]);
      // universal: for every cocone (w, legs) exactly one mediator
      bool universal = true;
      res.mediators.clear();
      for (int w = 0; w < c.n_obj() && universal; ++w) {
        // enumerate cocones into w
        std::vector<std::vector<int>> leg_choices;
        bool any = true;
        for (int o : objs) {
          const auto& hs = c.hom[static_cast<size_t>(o)][static_cast<size_t>(w)];
          if (hs.empty()) {
            any = false;
            break;
          }
          leg_choices.push_back(hs);
        }
        if (!any) {
          // no cocone into w; but any morphism p -> w would contradict p being the coproduct
          // only if k>0 and some leg set is empty while hom(p,w) nonempty
          if (!c.hom[static_cast<size_t>(p)][static_cast<size_t>(w)].empty() && k > 0) universal = false;
          continue;
        }
        std::vector<size_t> lp(k, 0);
        while (universal) {
          int found = -1, count = 0;
          for (int m : c.hom[static_cast<size_t>(p)][static_cast<size_t>(w)]) {
            bool ok = true;
            for (size_t i = 0; i < k; ++i)
              if (c.compose(m, res.injections[i]) != leg_choices[i][lp[i]]) {
                ok = false;
                break;
              }
            if (ok) {
              found = m;
              ++count;
            }
          }
          if (count != 1) {
            universal = false;
            break;
          }
          ConeWitness cw;
          cw.from_obj = w;
          cw.leg1 = k > 0 ? leg_choices[0][lp[0]] : -1;
          cw.leg2 = -1;
          cw.mediator = found;
          res.mediators.push_back(cw);
          // next tuple
          size_t i = 0;
          for (; i < k; ++i) {
            if (++lp[i] < leg_choices[i].size()) break;
            lp[i] = 0;
          }
          if (i == k) break;
          if (k == 0) break;
        }
        if (k == 0) {
          // empty coproduct: need exactly one morphism p -> w
          if (c.hom[static_cast<size_t>(p)][static_cast<size_t>(w)].size() != 1) universal = false;
        }
      }
      if (universal) return res;
      // next injection tuple
      size_t i = 0;
      for (; i < k; ++i) {
        if (++pick[i] < inj_choices[i].size()) break;
        pick[i] = 0;
      }
      if (i == k) break;
      if (k == 0) break;
    }
  }
  return std::nullopt;
}

std::vector<Violation> FinGroup::validate() const {
  std::vector<Violation> bad;
  int m = n();
  if (unit < 0 || unit >= m) {
    bad.push_back({"NotHomomorphism", "group unit out of range"});
    return bad;
  }
  if (static_cast<int>(mul.size()) != m || static_cast<int>(inv.size()) != m) {
    bad.push_back({"NotHomomorphism", "group tables have wrong size"});
    return bad;
  }
  for (int a = 0; a < m; ++a) {
    if (static_cast<int>(mul[static_cast<size_t>(a)].size()) != m) {
      bad.push_back({"NotHomomorphism", "multiplication row has wrong size"});
      return bad;
    }
    if (mul[static_cast<size_t>(a)][static_cast<size_t>(unit)] != a ||
        mul[static_cast<size_t>(unit)][static_cast<size_t>(a)] != a)
      bad.push_back({"NotHomomorphism", "unit law fails at " + elems[static_cast<size_t>(a)]});
    if (mul[static_cast<size_t>(a)][static_cast<size_t>(inv[static_cast<size_t>(a)])] != unit)
      bad.push_back({"NotHomomorphism", "inverse law fails at " + elems[static_cast<size_t>(a)]});
  }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int cc = 0; cc < m; ++cc)
        if (mul[static_cast<size_t>(mul[static_cast<size_t>(a)][static_cast<size_t>(b)])][static_cast<size_t>(cc)] !=
            mul[static_cast<size_t>(a)][static_cast<size_t>(mul[static_cast<size_t>(b)][static_cast<size_t>(cc)])])
          bad.push_back({"NotHomomorphism", "associativity fails"});
  return bad;
}

FinGroup FinGroup::trivial() {
  FinGroup g;
  g.elems = {"e"};
  g.mul = {{0}};
  g.unit = 0;
  g.inv = {0};
  return g;
}

FinGroup FinGroup::cyclic(int n) {
  FinGroup g;
  for (int i = 0; i < n; ++i) g.elems.push_back(i == 0 ? "e" : "r" + std::to_string(i));
  g.mul.assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n)));
  g.inv.assign(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g.mul[static_cast<size_t>(i)][static_cast<size_t>(j)] = (i + j) % n;
    g.inv[static_cast<size_t>(i)] = (n - i) % n;
  }
  g.unit = 0;
  return g;
}

FinGroup FinGroup::symmetric3() {
  // permutations of {0,1,2} listed as one-line notation
  std::vector<std::array<int, 3>> perms = {{0, 1, 2}, {1, 0, 2}, {0, 2, 1},
                                           {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
  FinGroup g;
  for (auto& p : perms)
    g.elems.push_back("p" + std::to_string(p[0]) + std::to_string(p[1]) + std::to_string(p[2]));
  g.elems[0] = "e";
  int n = 6;
  g.mul.assign(6, std::vector<int>(6));
  g.inv.assign(6, 0);
  auto compose_perm = [&](const std::array<int, 3>& a, const std::array<int, 3>& b) {
    // (a*b)(i) = a(b(i))
    std::array<int, 3> r{};
    for (int i = 0; i < 3; ++i) r[static_cast<size_t>(i)] = a[static_cast<size_t>(b[static_cast<size_t>(i)])];
    return r;
  };
  auto find = [&](const std::array<int, 3>& p) {
    for (int i = 0; i < n; ++i)
      if (perms[static_cast<size_t>(i)] == p) return i;
    return -1;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g.mul[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          find(compose_perm(perms[static_cast<size_t>(i)], perms[static_cast<size_t>(j)]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (g.mul[static_cast<size_t>(i)][static_cast<size_t>(j)] == 0) g.inv[static_cast<size_t>(i)] = j;
  g.unit = 0;
  return g;
}

std::vector<Violation> validate_group_action(const FinCategory& c, const GroupAction& a) {
  std::vector<Violation> bad = a.group->validate();
  if (!bad.empty()) return bad;
  int m = a.group->n();
  if (static_cast<int>(a.act.size()) != m) {
    bad.push_back({"NotHomomorphism", "action table has wrong size"});
    return bad;
  }
  if (c.src(a.over) != a.carrier) {
    bad.push_back({"NotOver", "structural morphism does not start at the carrier"});
    return bad;
  }
  for (int g = 0; g < m; ++g) {
    int s = a.act[static_cast<size_t>(g)];
    if (c.src(s) != a.carrier || c.tgt(s) != a.carrier) {
      bad.push_back({"NotHomomorphism", "sigma_" + a.group->elems[static_cast<size_t>(g)] +
                                            " is not an endomorphism of the carrier"});
      return bad;
    }
    if (!c.is_iso(s))
      bad.push_back({"NotHomomorphism", "sigma_" + a.group->elems[static_cast<size_t>(g)] + " is not invertible"});
    if (c.compose(a.over, s) != a.over)
      bad.push_back({"NotOver", "over∘sigma_" + a.group->elems[static_cast<size_t>(g)] + " != over"});
  }
  if (a.act[static_cast<size_t>(a.group->unit)] != c.id_mor[static_cast<size_t>(a.carrier)])
    bad.push_back({"NotHomomorphism", "sigma_e is not the identity"});
  for (int g = 0; g < m; ++g)
    for (int h = 0; h < m; ++h)
      if (c.compose(a.act[static_cast<size_t>(g)], a.act[static_cast<size_t>(h)]) !=
          a.act[static_cast<size_t>(a.group->mul[static_cast<size_t>(g)][static_cast<size_t>(h)])])
        bad.push_back({"NotHomomorphism", "sigma_g∘sigma_h != sigma_gh at (" +
                                              a.group->elems[static_cast<size_t>(g)] + "," +
                                              a.group->elems[static_cast<size_t>(h)] + ")"});
  return bad;
}

GroupAction trivial_action(const FinCategory& c, int x, int over_mor) {
  GroupAction a;
  a.group = std::make_shared<FinGroup>(FinGroup::trivial());
  a.carrier = x;
  a.over = over_mor;
  a.act = {c.id_mor[static_cast<size_t>(x)]};
  return a;
}

}  // namespace ecdsheaf
