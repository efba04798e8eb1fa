#include "ecdsheaf/zoo.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace ecdsheaf {

FinCategory make_poset(const std::vector<std::string>& objects,
                       const std::vector<std::pair<std::string, std::string>>& covers_rel,
                       const std::string& initial) {
  // reflexive-transitive closure
  int n = static_cast<int>(objects.size());
  std::map<std::string, int> ix;
  for (int i = 0; i < n; ++i) ix[objects[static_cast<size_t>(i)]] = i;
  std::vector<std::vector<char>> leq(static_cast<size_t>(n), std::vector<char>(static_cast<size_t>(n), 0));
  for (int i = 0; i < n; ++i) leq[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
  for (const auto& [a, b] : covers_rel) leq[static_cast<size_t>(ix.at(a))][static_cast<size_t>(ix.at(b))] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (leq[static_cast<size_t>(i)][static_cast<size_t>(k)] && leq[static_cast<size_t>(k)][static_cast<size_t>(j)])
          leq[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
  RawCategory raw;
  raw.objects = objects;
  raw.initial = initial;
  auto mor_id = [&](int i, int j) {
    return i == j ? "id_" + objects[static_cast<size_t>(i)]
                  : objects[static_cast<size_t>(i)] + "_" + objects[static_cast<size_t>(j)];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (leq[static_cast<size_t>(i)][static_cast<size_t>(j)])
        raw.morphisms.push_back({mor_id(i, j), objects[static_cast<size_t>(i)], objects[static_cast<size_t>(j)]});
  for (int i = 0; i < n; ++i) raw.identities[objects[static_cast<size_t>(i)]] = mor_id(i, i);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (leq[static_cast<size_t>(i)][static_cast<size_t>(j)] && leq[static_cast<size_t>(j)][static_cast<size_t>(k)])
          raw.compose.push_back({mor_id(j, k), mor_id(i, j), mor_id(i, k)});
  return validate_category_or_throw(raw);
}

namespace {

EquivariantSquare trivial_square(const FinCategory& c, const std::string& name,
                                 const std::string& xp, const std::string& x,
                                 const std::string& sp, const std::string& s,
                                 const std::string& gp, const std::string& fp,
                                 const std::string& g, const std::string& f) {
  EquivariantSquare q;
  q.name = name;
  q.Xp = c.obj(xp);
  q.X = c.obj(x);
  q.Sp = c.obj(sp);
  q.S = c.obj(s);
  q.gp = c.mor(gp);
  q.fp = c.mor(fp);
  q.g = c.mor(g);
  q.f = c.mor(f);
  q.act_X = trivial_action(c, q.X, q.f);
  q.act_Xp = trivial_action(c, q.Xp, q.fp);
  return q;
}

/// The Galois toy site: objects O, T, PT with Aut(T) = C2 over PT.
/// `with_product` adjoins TT, simultaneously T x_PT T and the coproduct T+T.
std::shared_ptr<const FinCategory> make_galois_site(bool with_product) {
  // encodings: T->T: a in C2 = {0,1}; T->TT: (k,a), k in {1,2};
  // TT->T: [a,b]; TT->TT: [m1,m2] with mi: T->TT.
  RawCategory raw;
  raw.objects = {"O", "T"};
  if (with_product) raw.objects.push_back("TT");
  raw.objects.push_back("PT");
  raw.initial = "O";
  auto c2 = [](int a, int b) { return (a + b) % 2; };
  auto tt_name = [](int a) { return a == 0 ? std::string("id_T") : std::string("sg"); };
  auto t2tt_name = [](int k, int a) {
    return "i" + std::to_string(k) + (a == 0 ? "" : "s");
  };
  auto tt2t_name = [&](int a, int b) {
    return std::string("p_") + (a == 0 ? "e" : "s") + (b == 0 ? "e" : "s");
  };
  auto tt2tt_name = [&](int k1, int a1, int k2, int a2) {
    return "e_" + t2tt_name(k1, a1) + "_" + t2tt_name(k2, a2);
  };
  // morphism list
  raw.morphisms.push_back({"id_O", "O", "O"});
  raw.morphisms.push_back({"o_T", "O", "T"});
  if (with_product) raw.morphisms.push_back({"o_TT", "O", "TT"});
  raw.morphisms.push_back({"o_PT", "O", "PT"});
  raw.morphisms.push_back({"id_T", "T", "T"});
  raw.morphisms.push_back({"sg", "T", "T"});
  raw.morphisms.push_back({"f", "T", "PT"});
  raw.morphisms.push_back({"id_PT", "PT", "PT"});
  if (with_product) {
    for (int k = 1; k <= 2; ++k)
      for (int a = 0; a < 2; ++a) raw.morphisms.push_back({t2tt_name(k, a), "T", "TT"});
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) raw.morphisms.push_back({tt2t_name(a, b), "TT", "T"});
    for (int k1 = 1; k1 <= 2; ++k1)
      for (int a1 = 0; a1 < 2; ++a1)
        for (int k2 = 1; k2 <= 2; ++k2)
          for (int a2 = 0; a2 < 2; ++a2)
            raw.morphisms.push_back({tt2tt_name(k1, a1, k2, a2), "TT", "TT"});
    raw.morphisms.push_back({"c", "TT", "PT"});
  }
  raw.identities = {{"O", "id_O"}, {"T", "id_T"}, {"PT", "id_PT"}};
  if (with_product) raw.identities["TT"] = "e_i1_i2";

  // composition: represent morphisms structurally and compose
  struct M {
    // kind: 0 from-O, 1 T->T, 2 T->TT, 3 TT->T, 4 TT->TT, 5 T->PT, 6 TT->PT, 7 id_PT
    int kind;
    int a = 0, b = 0, k = 0, k2 = 0, a2 = 0;
    std::string src, tgt;
  };
  std::map<std::string, M> reg;
  auto add = [&](const std::string& id, M m) { reg[id] = m; };
  add("id_O", {0, 0, 0, 0, 0, 0, "O", "O"});
  add("o_T", {0, 0, 0, 0, 0, 0, "O", "T"});
  if (with_product) add("o_TT", {0, 0, 0, 0, 0, 0, "O", "TT"});
  add("o_PT", {0, 0, 0, 0, 0, 0, "O", "PT"});
  add("id_T", {1, 0, 0, 0, 0, 0, "T", "T"});
  add("sg", {1, 1, 0, 0, 0, 0, "T", "T"});
  add("f", {5, 0, 0, 0, 0, 0, "T", "PT"});
  add("id_PT", {7, 0, 0, 0, 0, 0, "PT", "PT"});
  if (with_product) {
    for (int k = 1; k <= 2; ++k)
      for (int a = 0; a < 2; ++a) add(t2tt_name(k, a), {2, a, 0, k, 0, 0, "T", "TT"});
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) add(tt2t_name(a, b), {3, a, b, 0, 0, 0, "TT", "T"});
    for (int k1 = 1; k1 <= 2; ++k1)
      for (int a1 = 0; a1 < 2; ++a1)
        for (int k2 = 1; k2 <= 2; ++k2)
          for (int a2 = 0; a2 < 2; ++a2)
            add(tt2tt_name(k1, a1, k2, a2), {4, a1, 0, k1, k2, a2, "TT", "TT"});
    add("c", {6, 0, 0, 0, 0, 0, "TT", "PT"});
  }
  auto name_of = [&](const M& m) -> std::string {
    switch (m.kind) {
      case 0:
        return m.tgt == "O" ? "id_O" : "o_" + m.tgt;
      case 1:
        return tt_name(m.a);
      case 2:
        return t2tt_name(m.k, m.a);
      case 3:
        return tt2t_name(m.a, m.b);
      case 4:
        return tt2tt_name(m.k, m.a, m.k2, m.a2);
      case 5:
        return "f";
      case 6:
        return "c";
      default:
        return "id_PT";
    }
  };
  // compose g∘f_
  std::function<M(const M&, const M&)> cmp = [&](const M& g, const M& f_) -> M {
    if (f_.kind == 0) return reg.at(f_.src == "O" && g.tgt == "O" ? "id_O" : "o_" + g.tgt);
    // helper: compose g with a T-source morphism encoded (kind 1,2,5)
    auto compose_T = [&](const M& gg, int a) -> M {
      // gg has src T; precompose with T->T of parity a
      M r = gg;
      if (gg.kind == 1) r.a = c2(gg.a, a);
      else if (gg.kind == 2) r.a = c2(gg.a, a);
      else if (gg.kind == 5) { /* f∘sg = f */ }
      else throw EngineError("MalformedComposition", "bad T-source composition");
      return r;
    };
    if (f_.kind == 1) return compose_T(g, f_.a);
    if (f_.kind == 2) {
      // f_: T->TT = (k, a); g has src TT
      M leg;  // g∘i_k : T -> tgt(g)
      if (g.kind == 3) leg = reg.at(tt_name(f_.k == 1 ? g.a : g.b));
      else if (g.kind == 4) leg = f_.k == 1 ? reg.at(t2tt_name(g.k, g.a)) : reg.at(t2tt_name(g.k2, g.a2));
      else if (g.kind == 6) leg = reg.at("f");
      else throw EngineError("MalformedComposition", "bad TT-source composition");
      return compose_T(leg, f_.a);
    }
    if (f_.kind == 3 || f_.kind == 4) {
      // f_: TT -> T or TT -> TT; decompose along i1, i2
      M i1m = reg.at("i1"), i2m = reg.at("i2");
      M l1 = cmp(f_, i1m), l2 = cmp(f_, i2m);  // T -> tgt(f_)
      M m1 = cmp(g, l1), m2 = cmp(g, l2);      // T -> tgt(g)
      if (g.tgt == "PT") return reg.at("c");
      if (g.tgt == "T") {
        M r;
        r.kind = 3;
        r.a = m1.a;
        r.b = m2.a;
        r.src = "TT";
        r.tgt = "T";
        return reg.at(name_of(r));
      }
      M r;
      r.kind = 4;
      r.k = m1.k;
      r.a = m1.a;
      r.k2 = m2.k;
      r.a2 = m2.a;
      r.src = "TT";
      r.tgt = "TT";
      return reg.at(name_of(r));
    }
    if (f_.kind == 5 || f_.kind == 6) return f_;  // g is id_PT
    if (f_.kind == 7) return g;
    throw EngineError("MalformedComposition", "unhandled composition");
  };
  for (const auto& [idg, g] : reg)
    for (const auto& [idf, f_] : reg) {
      if (f_.tgt != g.src) continue;
      raw.compose.push_back({idg, idf, name_of(cmp(g, f_))});
    }
  std::sort(raw.compose.begin(), raw.compose.end());
  return std::make_shared<const FinCategory>(validate_category_or_throw(raw));
}

/// Component square of TT = T + T (additive shape: S = X ∐ S', X' = ∅).
EquivariantSquare component_square(const FinCategory& c) {
  EquivariantSquare q;
  q.name = "component";
  q.Xp = c.obj("O");
  q.X = c.obj("T");
  q.Sp = c.obj("T");
  q.S = c.obj("TT");
  q.gp = c.mor("o_T");
  q.fp = c.mor("o_T");
  q.g = c.mor("i2");
  q.f = c.mor("i1");
  q.act_X = trivial_action(c, q.X, q.f);
  q.act_Xp = trivial_action(c, q.Xp, q.fp);
  return q;
}

EquivariantSquare galois_square(const FinCategory& c) {
  EquivariantSquare q;
  q.name = "galois";
  q.Xp = c.obj("O");
  q.X = c.obj("T");
  q.Sp = c.obj("O");
  q.S = c.obj("PT");
  q.gp = c.mor("o_T");
  q.fp = c.mor("id_O");
  q.g = c.mor("o_PT");
  q.f = c.mor("f");
  auto c2 = std::make_shared<FinGroup>(FinGroup::cyclic(2));
  q.act_X.group = c2;
  q.act_X.carrier = q.X;
  q.act_X.over = q.f;
  q.act_X.act = {c.mor("id_T"), c.mor("sg")};
  q.act_Xp.group = c2;
  q.act_Xp.carrier = q.Xp;
  q.act_Xp.over = q.fp;
  q.act_Xp.act = {c.mor("id_O"), c.mor("id_O")};
  return q;
}

Fixture finish(Fixture fx) {
  fx.topology = std::make_shared<const Topology>(generate_topology(*fx.cat, fx.ecd));
  return fx;
}

Fixture build_z3() {
  Fixture fx;
  fx.name = "Z3";
  fx.cat = std::make_shared<const FinCategory>(
      make_poset({"O", "UV", "U", "V", "S"},
                 {{"O", "UV"}, {"UV", "U"}, {"UV", "V"}, {"U", "S"}, {"V", "S"}}, "O"));
  const FinCategory& c = *fx.cat;
  fx.ecd = validate_ecd(
      c, {trivial_square(c, "zariski", "UV", "U", "V", "S", "UV_U", "UV_V", "V_S", "U_S")});
  fx.density = default_density(c);
  fx.expected = {true, true, true, true};
  return finish(std::move(fx));
}

Fixture build_gs(bool plus) {
  Fixture fx;
  fx.name = plus ? "GS+" : "GS";
  fx.cat = make_galois_site(plus);
  std::vector<EquivariantSquare> squares = {galois_square(*fx.cat)};
  // the component square of T + T rides along: component decompositions must
  // be covers for the comparison map of the Galois square to be locally
  // surjective at the product object
  if (plus) squares.push_back(component_square(*fx.cat));
  fx.ecd = validate_ecd(*fx.cat, squares);
  fx.density = default_density(*fx.cat);
  if (plus)
    fx.expected = {true, true, true, true};
  else
    fx.expected = {true, true, true, false};  // no product object: cover route unavailable
  return finish(std::move(fx));
}

Fixture build_add2() {
  Fixture fx;
  fx.name = "ADD2";
  fx.cat = std::make_shared<const FinCategory>(
      make_poset({"O", "A", "B", "AB"}, {{"O", "A"}, {"O", "B"}, {"A", "AB"}, {"B", "AB"}}, "O"));
  const FinCategory& c = *fx.cat;
  fx.ecd = validate_ecd(c, {trivial_square(c, "additive", "O", "A", "B", "AB", "O_A", "O_B",
                                           "B_AB", "A_AB")});
  fx.density = default_density(c);
  fx.expected = {true, true, true, true};
  return finish(std::move(fx));
}

Fixture build_cl3() {
  Fixture fx;
  fx.name = "CL3";
  fx.cat = std::make_shared<const FinCategory>(
      make_poset({"O", "Z", "X", "S"}, {{"O", "Z"}, {"Z", "X"}, {"X", "S"}}, "O"));
  const FinCategory& c = *fx.cat;
  fx.ecd =
      validate_ecd(c, {trivial_square(c, "closed", "Z", "X", "Z", "S", "Z_X", "id_Z", "Z_S", "X_S")});
  fx.density = default_density(c);
  fx.expected = {true, true, true, true};
  return finish(std::move(fx));
}

Fixture build_product() {
  Fixture fx;
  fx.name = "PRODUCT(Z3,GS+)";
  Fixture z3 = build_z3();
  Fixture gsp = build_gs(true);
  // glue the two sites at the initial object
  RawCategory a = z3.cat->to_raw();
  RawCategory b = gsp.cat->to_raw();
  RawCategory raw;
  raw.initial = "O";
  raw.objects = a.objects;
  for (const auto& o : b.objects)
    if (o != "O") raw.objects.push_back(o);
  raw.morphisms = a.morphisms;
  for (const auto& m : b.morphisms)
    if (m.id != "id_O") raw.morphisms.push_back(m);
  raw.identities = a.identities;
  for (const auto& [o, i] : b.identities)
    if (o != "O") raw.identities[o] = i;
  for (const auto& e : a.compose) raw.compose.push_back(e);
  for (const auto& e : b.compose) raw.compose.push_back(e);
  std::sort(raw.compose.begin(), raw.compose.end());
  raw.compose.erase(std::unique(raw.compose.begin(), raw.compose.end()), raw.compose.end());
  fx.cat = std::make_shared<const FinCategory>(validate_category_or_throw(raw));
  const FinCategory& c = *fx.cat;
  std::vector<EquivariantSquare> squares;
  squares.push_back(
      trivial_square(c, "zariski", "UV", "U", "V", "S", "UV_U", "UV_V", "V_S", "U_S"));
  squares.push_back(galois_square(c));
  squares.push_back(component_square(c));
  fx.ecd = validate_ecd(c, squares);
  fx.density = default_density(c);
  fx.expected = {true, true, true, false};
  return finish(std::move(fx));
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"Z3", "GS", "GS+", "ADD2", "CL3", "PRODUCT(Z3,GS+)"};
}

Fixture build_fixture(const std::string& name) {
  if (name == "Z3") return build_z3();
  if (name == "GS") return build_gs(false);
  if (name == "GS+") return build_gs(true);
  if (name == "ADD2") return build_add2();
  if (name == "CL3") return build_cl3();
  if (name == "PRODUCT(Z3,GS+)") return build_product();
  throw EngineError("UnknownFixture", name);
}

std::vector<std::pair<std::string, QPresheafPtr>> Fixture::sample_presheaves() const {
  std::vector<std::pair<std::string, QPresheafPtr>> out;
  const FinCategory& cc = *cat;
  for (int x = 0; x < cc.n_obj(); ++x) {
    auto lam = share(free_linear(cc, x));
    out.push_back({"free(" + cc.objects[static_cast<size_t>(x)] + ")", lam});
    out.push_back({"sheaf(" + cc.objects[static_cast<size_t>(x)] + ")",
                   sheafify_linear(*lam, *topology).out});
  }
  return out;
}

std::vector<std::pair<std::string, PresheafComplex>> Fixture::sample_complexes() const {
  std::vector<std::pair<std::string, PresheafComplex>> out;
  for (const auto& [nm, f] : sample_presheaves())
    out.push_back({nm + "[0]", PresheafComplex::single(f, 0)});
  return out;
}

}  // namespace ecdsheaf
