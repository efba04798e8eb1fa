#include "ecdsheaf/qpresheaf.hpp"

#include <algorithm>
#include <map>

namespace ecdsheaf {

std::optional<std::string> QPresheaf::check_functorial() const {
  const FinCategory& c = *cat;
  for (int m = 0; m < c.n_mor(); ++m) {
    const Mat& rm = r(m);
    if (rm.rows() != d(c.src(m)) || rm.cols() != d(c.tgt(m)))
      return "restriction along " + c.mor_id(m) + " has the wrong shape";
  }
  for (int x = 0; x < c.n_obj(); ++x)
    if (r(c.id_mor[static_cast<size_t>(x)]) != Mat::Identity(d(x), d(x)))
      return "identity restriction at " + c.objects[static_cast<size_t>(x)] + " is not the identity";
  for (int g = 0; g < c.n_mor(); ++g)
    for (int f = 0; f < c.n_mor(); ++f) {
      if (!c.composable(g, f)) continue;
      if (r(c.compose(g, f)) != r(f) * r(g))
        return "functoriality fails at " + c.mor_id(g) + "∘" + c.mor_id(f);
    }
  return std::nullopt;
}

Eigen::Index QPresheaf::total_dim() const {
  Eigen::Index t = 0;
  for (auto v : dim) t += v;
  return t;
}

QPresheafPtr zero_presheaf_ptr(const FinCategory& c) {
  static std::map<const FinCategory*, QPresheafPtr> cache;
  auto it = cache.find(&c);
  if (it != cache.end()) return it->second;
  auto p = share(QPresheaf::zero(c));
  cache[&c] = p;
  return p;
}

QPresheaf QPresheaf::zero(const FinCategory& c) {
  QPresheaf f;
  f.cat = &c;
  f.dim.assign(static_cast<size_t>(c.n_obj()), 0);
  f.restr.resize(static_cast<size_t>(c.n_mor()));
  for (int m = 0; m < c.n_mor(); ++m) f.restr[static_cast<size_t>(m)] = Mat::Zero(0, 0);
  return f;
}

std::optional<std::string> LinearMap::check_natural() const {
  const FinCategory& c = *src->cat;
  for (int x = 0; x < c.n_obj(); ++x)
    if (at(x).rows() != tgt->d(x) || at(x).cols() != src->d(x))
      return "component at " + c.objects[static_cast<size_t>(x)] + " has the wrong shape";
  for (int f = 0; f < c.n_mor(); ++f) {
    int x = c.src(f), y = c.tgt(f);
    if (at(x) * src->r(f) != tgt->r(f) * at(y)) return "naturality fails along " + c.mor_id(f);
  }
  return std::nullopt;
}

LinearMap LinearMap::zero(QPresheafPtr s, QPresheafPtr t) {
  LinearMap m;
  m.src = std::move(s);
  m.tgt = std::move(t);
  const FinCategory& c = *m.src->cat;
  for (int x = 0; x < c.n_obj(); ++x) m.comp.push_back(Mat::Zero(m.tgt->d(x), m.src->d(x)));
  return m;
}

LinearMap LinearMap::identity(QPresheafPtr s) {
  LinearMap m;
  m.src = s;
  m.tgt = s;
  const FinCategory& c = *s->cat;
  for (int x = 0; x < c.n_obj(); ++x) m.comp.push_back(Mat::Identity(s->d(x), s->d(x)));
  return m;
}

LinearMap compose(const LinearMap& g, const LinearMap& f) {
  LinearMap m;
  m.src = f.src;
  m.tgt = g.tgt;
  for (size_t x = 0; x < f.comp.size(); ++x) m.comp.push_back(g.comp[x] * f.comp[x]);
  return m;
}

LinearMap add(const LinearMap& a, const LinearMap& b) {
  LinearMap m = a;
  for (size_t x = 0; x < m.comp.size(); ++x) m.comp[x] += b.comp[x];
  return m;
}

LinearMap negate(const LinearMap& a) {
  LinearMap m = a;
  for (auto& mm : m.comp) mm = -mm;
  return m;
}

QPresheaf free_linear(const FinCategory& c, int s) {
  QPresheaf f;
  f.cat = &c;
  f.dim.resize(static_cast<size_t>(c.n_obj()));
  for (int u = 0; u < c.n_obj(); ++u)
    f.dim[static_cast<size_t>(u)] =
        static_cast<Eigen::Index>(c.hom[static_cast<size_t>(u)][static_cast<size_t>(s)].size());
  f.restr.resize(static_cast<size_t>(c.n_mor()));
  for (int h = 0; h < c.n_mor(); ++h) {
    int u = c.src(h), v = c.tgt(h);
    const auto& hu = c.hom[static_cast<size_t>(u)][static_cast<size_t>(s)];
    const auto& hv = c.hom[static_cast<size_t>(v)][static_cast<size_t>(s)];
    Mat m = Mat::Zero(static_cast<Eigen::Index>(hu.size()), static_cast<Eigen::Index>(hv.size()));
    for (size_t j = 0; j < hv.size(); ++j) {
      int mm = c.compose(hv[j], h);
      size_t i = static_cast<size_t>(std::find(hu.begin(), hu.end(), mm) - hu.begin());
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1;
    }
    f.restr[static_cast<size_t>(h)] = m;
  }
  return f;
}

LinearMap free_linear_map(const FinCategory& c, int h) {
  LinearMap out;
  out.src = share(free_linear(c, c.src(h)));
  out.tgt = share(free_linear(c, c.tgt(h)));
  for (int u = 0; u < c.n_obj(); ++u) {
    const auto& hs = c.hom[static_cast<size_t>(u)][static_cast<size_t>(c.src(h))];
    const auto& ht = c.hom[static_cast<size_t>(u)][static_cast<size_t>(c.tgt(h))];
    Mat m = Mat::Zero(static_cast<Eigen::Index>(ht.size()), static_cast<Eigen::Index>(hs.size()));
    for (size_t j = 0; j < hs.size(); ++j) {
      int mm = c.compose(h, hs[j]);
      size_t i = static_cast<size_t>(std::find(ht.begin(), ht.end(), mm) - ht.begin());
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1;
    }
    out.comp.push_back(m);
  }
  return out;
}

SumResult direct_sum(const std::vector<QPresheafPtr>& parts) {
  SumResult res;
  if (parts.empty()) throw EngineError("MalformedComposition", "empty direct sum");
  const FinCategory& c = *parts.front()->cat;
  QPresheaf sum;
  sum.cat = &c;
  sum.dim.assign(static_cast<size_t>(c.n_obj()), 0);
  std::vector<std::vector<Eigen::Index>> off(parts.size(),
                                             std::vector<Eigen::Index>(static_cast<size_t>(c.n_obj())));
  for (int x = 0; x < c.n_obj(); ++x) {
    Eigen::Index o = 0;
    for (size_t p = 0; p < parts.size(); ++p) {
      off[p][static_cast<size_t>(x)] = o;
      o += parts[p]->d(x);
    }
    sum.dim[static_cast<size_t>(x)] = o;
  }
  sum.restr.resize(static_cast<size_t>(c.n_mor()));
  for (int m = 0; m < c.n_mor(); ++m) {
    int x = c.src(m), y = c.tgt(m);
    Mat mm = Mat::Zero(sum.d(x), sum.d(y));
    for (size_t p = 0; p < parts.size(); ++p)
      if (parts[p]->d(x) > 0 && parts[p]->d(y) > 0)
        mm.block(off[p][static_cast<size_t>(x)], off[p][static_cast<size_t>(y)], parts[p]->d(x),
                 parts[p]->d(y)) = parts[p]->r(m);
    sum.restr[static_cast<size_t>(m)] = mm;
  }
  res.sum = share(std::move(sum));
  for (size_t p = 0; p < parts.size(); ++p) {
    LinearMap in = LinearMap::zero(parts[p], res.sum);
    LinearMap out = LinearMap::zero(res.sum, parts[p]);
    for (int x = 0; x < c.n_obj(); ++x) {
      if (parts[p]->d(x) == 0) continue;
      in.comp[static_cast<size_t>(x)].block(off[p][static_cast<size_t>(x)], 0, parts[p]->d(x),
                                            parts[p]->d(x)) = Mat::Identity(parts[p]->d(x), parts[p]->d(x));
      out.comp[static_cast<size_t>(x)].block(0, off[p][static_cast<size_t>(x)], parts[p]->d(x),
                                             parts[p]->d(x)) = Mat::Identity(parts[p]->d(x), parts[p]->d(x));
    }
    res.in.push_back(std::move(in));
    res.out.push_back(std::move(out));
  }
  return res;
}

SubPresheaf span_subpresheaf(QPresheafPtr ambient, const std::vector<Mat>& generators) {
  const FinCategory& c = *ambient->cat;
  std::vector<Mat> basis(static_cast<size_t>(c.n_obj()));
  for (int x = 0; x < c.n_obj(); ++x)
    basis[static_cast<size_t>(x)] = image_basis(generators[static_cast<size_t>(x)]);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int m = 0; m < c.n_mor(); ++m) {
      int x = c.src(m), y = c.tgt(m);
      if (basis[static_cast<size_t>(y)].cols() == 0) continue;
      Mat pushed = ambient->r(m) * basis[static_cast<size_t>(y)];
      Mat joint = hcat({basis[static_cast<size_t>(x)], pushed});
      Mat nb = image_basis(joint);
      if (nb.cols() != basis[static_cast<size_t>(x)].cols()) {
        basis[static_cast<size_t>(x)] = nb;
        changed = true;
      }
    }
  }
  SubPresheaf sp;
  QPresheaf sub;
  sub.cat = &c;
  sub.dim.resize(static_cast<size_t>(c.n_obj()));
  for (int x = 0; x < c.n_obj(); ++x) sub.dim[static_cast<size_t>(x)] = basis[static_cast<size_t>(x)].cols();
  sub.restr.resize(static_cast<size_t>(c.n_mor()));
  for (int m = 0; m < c.n_mor(); ++m) {
    int x = c.src(m), y = c.tgt(m);
    Mat img = ambient->r(m) * basis[static_cast<size_t>(y)];
    auto sol = solve(basis[static_cast<size_t>(x)], img);
    if (!sol) throw EngineError("CertificationFailed", "subpresheaf closure is not closed");
    sub.restr[static_cast<size_t>(m)] = *sol;
  }
  sp.sub = share(std::move(sub));
  sp.basis = basis;
  sp.incl.src = sp.sub;
  sp.incl.tgt = ambient;
  for (int x = 0; x < c.n_obj(); ++x) sp.incl.comp.push_back(basis[static_cast<size_t>(x)]);
  return sp;
}

QuotientResult quotient_by(QPresheafPtr ambient, const std::vector<Mat>& sub_basis) {
  const FinCategory& c = *ambient->cat;
  QuotientResult res;
  QPresheaf q;
  q.cat = &c;
  q.dim.resize(static_cast<size_t>(c.n_obj()));
  std::vector<Mat> proj(static_cast<size_t>(c.n_obj()));  // quotient coords of ambient vectors
  std::vector<Mat> lift(static_cast<size_t>(c.n_obj()));  // section of the projection
  for (int x = 0; x < c.n_obj(); ++x) {
    Mat b = image_basis(sub_basis[static_cast<size_t>(x)]);
    Eigen::Index n = ambient->d(x);
    Mat comp = complement_basis(b, n);
    q.dim[static_cast<size_t>(x)] = comp.cols();
    Mat full = hcat({b, comp});
    Mat inv = full.cols() > 0 ? coords_in(full, Mat::Identity(n, n)) : Mat::Zero(0, n);
    proj[static_cast<size_t>(x)] = inv.bottomRows(comp.cols());
    lift[static_cast<size_t>(x)] = comp;
  }
  q.restr.resize(static_cast<size_t>(c.n_mor()));
  for (int m = 0; m < c.n_mor(); ++m) {
    int x = c.src(m), y = c.tgt(m);
    q.restr[static_cast<size_t>(m)] = proj[static_cast<size_t>(x)] * ambient->r(m) * lift[static_cast<size_t>(y)];
  }
  res.quot = share(std::move(q));
  res.proj.src = ambient;
  res.proj.tgt = res.quot;
  res.proj.comp = proj;
  return res;
}

SubPresheaf kernel_presheaf(const LinearMap& f) {
  const FinCategory& c = *f.src->cat;
  std::vector<Mat> gens(static_cast<size_t>(c.n_obj()));
  for (int x = 0; x < c.n_obj(); ++x) gens[static_cast<size_t>(x)] = kernel_basis(f.at(x));
  return span_subpresheaf(f.src, gens);
}

SubPresheaf image_presheaf(const LinearMap& f) {
  const FinCategory& c = *f.src->cat;
  std::vector<Mat> gens(static_cast<size_t>(c.n_obj()));
  for (int x = 0; x < c.n_obj(); ++x) gens[static_cast<size_t>(x)] = image_basis(f.at(x));
  return span_subpresheaf(f.tgt, gens);
}

struct MatchData {
  std::vector<int> members, gens;
  std::vector<Eigen::Index> gen_off;
  Eigen::Index gen_total = 0;
  bool maximal = false;    // maximal sieve: basis is the identity, values are
                           // the restriction matrices themselves
  Mat basis;               // gen_total x k
  std::vector<Mat> value;  // per member: dim(dom) x k (empty when maximal)

  Mat value_at(size_t i, const QPresheaf& f) const {
    if (maximal) return f.r(members[i]);
    return value[i];
  }
};

MatchData linear_matching(const QPresheaf& f, const Sieve& r) {
  const FinCategory& c = *f.cat;
  MatchData md;
  md.members = sieve_members(c, r);
  if (r.size() == static_cast<int>(r.mem.size())) {
    // maximal sieve: families are exactly sections, via the value at the identity
    md.maximal = true;
    md.gens = {c.id_mor[static_cast<size_t>(r.base)]};
    md.gen_off = {0};
    md.gen_total = f.d(r.base);
    md.basis = Mat::Identity(md.gen_total, md.gen_total);
    return md;
  }
  md.gens = generating_family(c, r);
  md.gen_off.resize(md.gens.size());
  for (size_t i = 0; i < md.gens.size(); ++i) {
    md.gen_off[i] = md.gen_total;
    md.gen_total += f.d(c.src(md.gens[i]));
  }
  if (md.members.empty()) {
    md.basis = Mat::Zero(0, 0);
    return md;
  }
  std::map<int, int> member_pos;
  for (size_t i = 0; i < md.members.size(); ++i) member_pos[md.members[i]] = static_cast<int>(i);
  // raw value maps via a fixed factorization per member
  std::vector<Mat> raw(md.members.size());
  for (size_t i = 0; i < md.members.size(); ++i) {
    int m = md.members[i];
    bool found = false;
    // a generator factors through itself by the identity; anything else would
    // break the injectivity of the generator-tuple parametrization
    for (size_t gi = 0; gi < md.gens.size() && !found; ++gi)
      if (md.gens[gi] == m) {
        Mat e = Mat::Zero(f.d(c.src(m)), md.gen_total);
        e.block(0, md.gen_off[gi], e.rows(), e.rows()) = Mat::Identity(e.rows(), e.rows());
        raw[i] = e;
        found = true;
      }
    for (size_t gi = 0; gi < md.gens.size() && !found; ++gi)
      for (int h : c.hom[static_cast<size_t>(c.src(m))][static_cast<size_t>(c.src(md.gens[gi]))])
        if (c.compose(md.gens[gi], h) == m) {
          Mat e = Mat::Zero(f.d(c.src(md.gens[gi])), md.gen_total);
          e.block(0, md.gen_off[gi], e.rows(), e.rows()) = Mat::Identity(e.rows(), e.rows());
          raw[i] = f.r(h) * e;
          found = true;
          break;
        }
    if (!found) throw EngineError("MalformedComposition", "sieve member escapes its generators");
  }
  // matching constraints: value(m∘h) = F(h) value(m)
  std::vector<Mat> rows;
  for (size_t i = 0; i < md.members.size(); ++i) {
    int m = md.members[i];
    for (int h = 0; h < c.n_mor(); ++h) {
      if (!c.composable(m, h)) continue;
      int mh = c.compose(m, h);
      rows.push_back(f.r(h) * raw[i] - raw[static_cast<size_t>(member_pos.at(mh))]);
    }
  }
  Mat cons = vcat(rows);
  if (cons.rows() == 0) cons = Mat::Zero(0, md.gen_total);
  md.basis = kernel_basis(cons);
  md.value.resize(md.members.size());
  for (size_t i = 0; i < md.members.size(); ++i) md.value[i] = raw[i] * md.basis;
  return md;
}

struct LinearPlusInternal {
  QPresheafPtr src;
  QPresheafPtr mid;                // first plus output (empty for single plus)
  std::vector<MatchData> md1;      // matching data of src over minimal covers
  std::vector<MatchData> md2;      // matching data of mid over minimal covers
};

Eigen::Index linear_matching_dim(const QPresheaf& f, const Sieve& r) {
  return linear_matching(f, r).basis.cols();
}

LinearPlusResult plus_linear(const QPresheaf& f, const Topology& t) {
  const FinCategory& c = *f.cat;
  auto internal = std::make_shared<LinearPlusInternal>();
  internal->src = share(f);
  internal->md1.resize(static_cast<size_t>(c.n_obj()));
  std::vector<MatchData>& md = internal->md1;
  QPresheaf out;
  out.cat = &c;
  out.dim.resize(static_cast<size_t>(c.n_obj()));
  for (int x = 0; x < c.n_obj(); ++x) {
    md[static_cast<size_t>(x)] = linear_matching(f, t.minimal_cover(x));
    out.dim[static_cast<size_t>(x)] = md[static_cast<size_t>(x)].basis.cols();
  }
  out.restr.resize(static_cast<size_t>(c.n_mor()));
  for (int h = 0; h < c.n_mor(); ++h) {
    int a = c.src(h), b = c.tgt(h);
    const auto& ma = md[static_cast<size_t>(a)];
    const auto& mb = md[static_cast<size_t>(b)];
    // generator tuple at a of the restricted family
    std::vector<Mat> blocks;
    for (size_t gi = 0; gi < ma.gens.size(); ++gi) {
      int hg = c.compose(h, ma.gens[gi]);
      auto it = std::find(mb.members.begin(), mb.members.end(), hg);
      if (it == mb.members.end())
        throw EngineError("CertificationFailed", "minimal cover is not pullback-stable");
      blocks.push_back(mb.value_at(static_cast<size_t>(it - mb.members.begin()), f));
    }
    Mat u = blocks.empty() ? Mat::Zero(0, mb.basis.cols()) : vcat(blocks);
    if (ma.maximal) {
      out.restr[static_cast<size_t>(h)] = std::move(u);
    } else {
      auto sol = solve(ma.basis, u);
      if (!sol) throw EngineError("CertificationFailed", "restricted family is not matching");
      out.restr[static_cast<size_t>(h)] = *sol;
    }
  }
  LinearPlusResult res;
  res.out = share(std::move(out));
  res.unit.src = internal->src;
  res.unit.tgt = res.out;
  for (int x = 0; x < c.n_obj(); ++x) {
    const auto& mx = md[static_cast<size_t>(x)];
    if (mx.maximal) {
      res.unit.comp.push_back(Mat::Identity(f.d(x), f.d(x)));
      continue;
    }
    std::vector<Mat> blocks;
    for (size_t gi = 0; gi < mx.gens.size(); ++gi) blocks.push_back(f.r(mx.gens[gi]));
    Mat g = blocks.empty() ? Mat::Zero(0, f.d(x)) : vcat(blocks);
    auto sol = solve(mx.basis, g);
    if (!sol) throw EngineError("CertificationFailed", "unit family is not matching");
    res.unit.comp.push_back(*sol);
  }
  res.data = internal;
  return res;
}

LinearPlusResult sheafify_linear(const QPresheaf& f, const Topology& t) {
  LinearPlusResult p1 = plus_linear(f, t);
  LinearPlusResult p2 = plus_linear(*p1.out, t);
  LinearPlusResult res;
  res.out = p2.out;
  res.unit = compose(p2.unit, p1.unit);
  auto internal = std::make_shared<LinearPlusInternal>();
  internal->src = p1.data->src;
  internal->mid = p1.out;
  internal->md1 = p1.data->md1;
  internal->md2 = p2.data->md1;
  res.data = internal;
  if (!is_linear_sheaf(*res.out, t))
    throw EngineError("CertificationFailed", "linear sheafification fails the sheaf condition");
  return res;
}

bool is_linear_sheaf(const QPresheaf& f, const Topology& t) {
  const FinCategory& c = *f.cat;
  for (int x = 0; x < c.n_obj(); ++x)
    for (const auto& r : t.covers[static_cast<size_t>(x)]) {
      if (r.size() == static_cast<int>(r.mem.size())) continue;  // sections themselves
      MatchData md = linear_matching(f, r);
      if (md.basis.cols() != f.d(x)) return false;
      std::vector<Mat> blocks;
      for (size_t gi = 0; gi < md.gens.size(); ++gi) blocks.push_back(f.r(md.gens[gi]));
      Mat g = blocks.empty() ? Mat::Zero(0, f.d(x)) : vcat(blocks);
      auto sol = solve(md.basis, g);
      if (!sol) return false;
      if (rank_of(*sol) != f.d(x)) return false;
    }
  return true;
}

LinearMap sheafify_linear_map(const LinearMap& phi, const LinearPlusResult& shf,
                              const LinearPlusResult& shg, const Topology& t) {
  LinearMap into_sheaf = compose(shg.unit, phi);
  into_sheaf.tgt = shg.out;
  return descend_linear(into_sheaf, shf, t);
}

LinearMap descend_linear(const LinearMap& psi, const LinearPlusResult& shsrc, const Topology& t) {
  const FinCategory& c = *psi.src->cat;
  if (!shsrc.data || !shsrc.data->mid)
    throw EngineError("CertificationFailed", "descend requires a full sheafification result");
  const LinearPlusInternal& data = *shsrc.data;
  // psi, pushed through plus once: plus(src) -> target, using the sheaf
  // condition of the target over each minimal cover.
  std::vector<MatchData> md_tgt(static_cast<size_t>(c.n_obj()));
  for (int x = 0; x < c.n_obj(); ++x)
    md_tgt[static_cast<size_t>(x)] = linear_matching(*psi.tgt, t.minimal_cover(x));
  auto descend_once = [&](QPresheafPtr plus_src, const QPresheaf& md_owner,
                          const std::vector<MatchData>& md_src,
                          const LinearMap& base) {
    // base: original -> target; produce: plus_src -> target
    LinearMap out;
    out.src = plus_src;
    out.tgt = base.tgt;
    for (int x = 0; x < c.n_obj(); ++x) {
      const auto& mx = md_src[static_cast<size_t>(x)];
      const MatchData& mt = md_tgt[static_cast<size_t>(x)];
      if (mt.maximal) {
        // over a maximal cover the plus coordinates are the sections themselves
        out.comp.push_back(base.at(x));
        continue;
      }
      // generator tuple of the mapped family
      std::vector<Mat> blocks;
      for (size_t gi = 0; gi < mt.gens.size(); ++gi) {
        auto it = std::find(mx.members.begin(), mx.members.end(), mt.gens[gi]);
        if (it == mx.members.end())
          throw EngineError("CertificationFailed", "cover generator mismatch in descent");
        size_t pos = static_cast<size_t>(it - mx.members.begin());
        blocks.push_back(base.at(c.src(mt.gens[gi])) * mx.value_at(pos, md_owner));
      }
      Mat u = blocks.empty() ? Mat::Zero(0, mx.basis.cols()) : vcat(blocks);
      auto fam = solve(mt.basis, u);
      if (!fam) throw EngineError("NotASheaf", "descent target family is not matching");
      // sheaf condition: target sections <-> families
      std::vector<Mat> tblocks;
      for (size_t gi = 0; gi < mt.gens.size(); ++gi)
        tblocks.push_back(base.tgt->r(mt.gens[gi]));
      Mat tg = tblocks.empty() ? Mat::Zero(0, base.tgt->d(x)) : vcat(tblocks);
      auto sec_coords = solve(mt.basis, tg);
      if (!sec_coords) throw EngineError("NotASheaf", "descent target fails the sheaf condition");
      auto sec = solve(*sec_coords, *fam);
      if (!sec) throw EngineError("NotASheaf", "descent target section does not exist");
      out.comp.push_back(*sec);
    }
    return out;
  };
  LinearMap step1 = descend_once(data.mid, *data.src, data.md1, psi);
  LinearMap step2 = descend_once(shsrc.out, *data.mid, data.md2, step1);
  return step2;
}

std::optional<std::string> GModule::check_representation() const {
  int n = group->n();
  if (static_cast<int>(act.size()) != n) return "wrong number of action matrices";
  for (int g = 0; g < n; ++g)
    if (act[static_cast<size_t>(g)].rows() != dim || act[static_cast<size_t>(g)].cols() != dim)
      return "action matrix has the wrong shape";
  if (act[static_cast<size_t>(group->unit)] != Mat::Identity(dim, dim))
    return "unit does not act as the identity";
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h)
      if (act[static_cast<size_t>(g)] * act[static_cast<size_t>(h)] !=
          act[static_cast<size_t>(group->mul[static_cast<size_t>(g)][static_cast<size_t>(h)])])
        return "action is not a homomorphism";
  return std::nullopt;
}

FixedPoints fixed_points(const GModule& m) {
  FixedPoints fp;
  fp.projector = Mat::Zero(m.dim, m.dim);
  for (const auto& a : m.act) fp.projector += a;
  fp.projector *= rat(1, m.group->n());
  if (fp.projector * fp.projector != fp.projector)
    throw EngineError("CertificationFailed", "averaging map is not a projector");
  for (const auto& a : m.act)
    if (a * fp.projector != fp.projector || fp.projector * a != fp.projector)
      throw EngineError("CertificationFailed", "averaging projector is not G-invariant");
  fp.basis = image_basis(fp.projector);
  return fp;
}

/// Averaging projector of the postcomposition action on Lambda(S)(U).
static Mat lambda_projector(const FinCategory& c, int s, const GroupAction& a, int u) {
  const auto& hs = c.hom[static_cast<size_t>(u)][static_cast<size_t>(s)];
  Eigen::Index n = static_cast<Eigen::Index>(hs.size());
  Mat p = Mat::Zero(n, n);
  for (int g = 0; g < a.group->n(); ++g) {
    for (size_t j = 0; j < hs.size(); ++j) {
      int m = c.compose(a.act[static_cast<size_t>(g)], hs[j]);
      size_t i = static_cast<size_t>(std::find(hs.begin(), hs.end(), m) - hs.begin());
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += 1;
    }
  }
  p *= rat(1, a.group->n());
  return p;
}

LinearQuotientResult linear_group_quotient(const FinCategory& c, int s, const GroupAction& a,
                                           const Topology& t) {
  LinearQuotientResult res;
  QPresheaf lam = free_linear(c, s);
  std::vector<Mat> basis(static_cast<size_t>(c.n_obj()));
  std::vector<Mat> proj(static_cast<size_t>(c.n_obj()));
  QPresheaf inv;
  inv.cat = &c;
  inv.dim.resize(static_cast<size_t>(c.n_obj()));
  for (int u = 0; u < c.n_obj(); ++u) {
    Mat p = lambda_projector(c, s, a, u);
    basis[static_cast<size_t>(u)] = image_basis(p);
    inv.dim[static_cast<size_t>(u)] = basis[static_cast<size_t>(u)].cols();
    proj[static_cast<size_t>(u)] = coords_in(basis[static_cast<size_t>(u)], p);
  }
  inv.restr.resize(static_cast<size_t>(c.n_mor()));
  for (int m = 0; m < c.n_mor(); ++m) {
    int x = c.src(m), y = c.tgt(m);
    Mat img = lam.r(m) * basis[static_cast<size_t>(y)];
    inv.restr[static_cast<size_t>(m)] = coords_in(basis[static_cast<size_t>(x)], img);
  }
  res.invariants = inv;
  res.free_sheaf = sheafify_linear(lam, t);
  res.sheaf = sheafify_linear(inv, t);
  // epi: the projector, in invariant coordinates, then sheafified
  LinearMap q;
  q.src = share(lam);
  q.tgt = share(inv);
  q.comp = proj;
  res.epi = sheafify_linear_map(q, res.free_sheaf, res.sheaf, t);
  return res;
}

SubPresheaf torsion_part(const QPresheaf& m, const Topology& t) {
  LinearPlusResult sh = sheafify_linear(m, t);
  return kernel_presheaf(sh.unit);
}

bool is_torsion(const QPresheaf& m, const Topology& t) {
  return sheafify_linear(m, t).out->is_zero();
}

MvRecord mv_sequence(const FinCategory& c, const EquivariantSquare& q, const Topology& t) {
  MvRecord rec;
  auto lqX = linear_group_quotient(c, q.X, q.act_X, t);
  auto lqXp = linear_group_quotient(c, q.Xp, q.act_Xp, t);
  auto lamSp = sheafify_linear(free_linear(c, q.Sp), t);
  auto lamS = sheafify_linear(free_linear(c, q.S), t);

  // presheaf-level maps between invariant parts
  auto free_map_between = [&](int h, const QPresheaf& src_inv, const std::vector<Mat>* src_basis,
                              const QPresheaf* tgt_inv, const std::vector<Mat>* tgt_basis,
                              const QPresheaf& src_amb, const QPresheaf& tgt_amb) {
    // map induced by postcomposition with h, possibly restricted to invariant
    // bases on either side
    LinearMap out;
    out.src = share(src_inv);
    out.tgt = tgt_inv ? share(*tgt_inv) : share(tgt_amb);
    LinearMap fm = free_linear_map(c, h);
    for (int u = 0; u < c.n_obj(); ++u) {
      Mat m = fm.at(u);
      if (src_basis) m = m * (*src_basis)[static_cast<size_t>(u)];
      if (tgt_basis) m = coords_in((*tgt_basis)[static_cast<size_t>(u)], m);
      out.comp.push_back(m);
    }
    (void)src_amb;
    return out;
  };

  // recover invariant bases
  std::vector<Mat> bX(static_cast<size_t>(c.n_obj())), bXp(static_cast<size_t>(c.n_obj()));
  for (int u = 0; u < c.n_obj(); ++u) {
    bX[static_cast<size_t>(u)] = image_basis(lambda_projector(c, q.X, q.act_X, u));
    bXp[static_cast<size_t>(u)] = image_basis(lambda_projector(c, q.Xp, q.act_Xp, u));
  }
  QPresheaf lamX = free_linear(c, q.X);
  QPresheaf lamXpAmb = free_linear(c, q.Xp);
  QPresheaf lamSpAmb = free_linear(c, q.Sp);
  QPresheaf lamSAmb = free_linear(c, q.S);

  LinearMap gp_inv = free_map_between(q.gp, lqXp.invariants, &bXp, &lqX.invariants, &bX, lamXpAmb, lamX);
  LinearMap fp_inv = free_map_between(q.fp, lqXp.invariants, &bXp, nullptr, nullptr, lamXpAmb, lamSpAmb);
  LinearMap f_inv = free_map_between(q.f, lqX.invariants, &bX, nullptr, nullptr, lamX, lamSAmb);
  LinearMap g_free = free_linear_map(c, q.g);

  LinearMap a_gp = sheafify_linear_map(gp_inv, lqXp.sheaf, lqX.sheaf, t);
  LinearMap a_fp = sheafify_linear_map(fp_inv, lqXp.sheaf, lamSp, t);
  LinearMap a_f = sheafify_linear_map(f_inv, lqX.sheaf, lamS, t);
  LinearMap a_g = sheafify_linear_map(g_free, lamSp, lamS, t);

  SumResult middle = direct_sum({lqX.sheaf.out, lamSp.out});
  rec.first = add(compose(middle.in[0], a_gp), compose(middle.in[1], a_fp));
  rec.second = add(compose(a_f, middle.out[0]), negate(compose(a_g, middle.out[1])));

  // exactness verification
  rec.exact = true;
  for (int u = 0; u < c.n_obj() && rec.exact; ++u) {
    if (rank_of(rec.first.at(u)) != lqXp.sheaf.out->d(u)) {
      rec.exact = false;
      rec.witness = "first map not injective at " + c.objects[static_cast<size_t>(u)];
    }
    Mat comp0 = rec.second.at(u) * rec.first.at(u);
    if (rec.exact && comp0 != Mat::Zero(comp0.rows(), comp0.cols())) {
      rec.exact = false;
      rec.witness = "composite not zero at " + c.objects[static_cast<size_t>(u)];
    }
  }
  if (rec.exact) {
    // middle homology must be torsion
    SubPresheaf ker = kernel_presheaf(rec.second);
    std::vector<Mat> img_in_ker(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) {
      Mat img = image_basis(rec.first.at(u));
      auto sol = solve(ker.basis[static_cast<size_t>(u)], img);
      if (!sol) {
        rec.exact = false;
        rec.witness = "image escapes the kernel at " + c.objects[static_cast<size_t>(u)];
        break;
      }
      img_in_ker[static_cast<size_t>(u)] = *sol;
    }
    if (rec.exact) {
      QuotientResult h = quotient_by(ker.sub, img_in_ker);
      if (!is_torsion(*h.quot, t)) {
        rec.exact = false;
        rec.witness = "middle homology does not sheafify to zero";
      }
    }
  }
  if (rec.exact) {
    // cokernel of the second map must be torsion (local surjectivity)
    std::vector<Mat> img(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) img[static_cast<size_t>(u)] = image_basis(rec.second.at(u));
    QuotientResult cok = quotient_by(rec.second.tgt, img);
    if (!is_torsion(*cok.quot, t)) {
      rec.exact = false;
      rec.witness = "last map is not locally surjective";
    }
  }
  return rec;
}

std::vector<LinearMap> hom_space(QPresheafPtr a, QPresheafPtr b) {
  const FinCategory& c = *a->cat;
  // variables: per object, entries of comp[x] (dim b(x) x dim a(x)), column-major
  std::vector<Eigen::Index> off(static_cast<size_t>(c.n_obj()));
  Eigen::Index total = 0;
  for (int x = 0; x < c.n_obj(); ++x) {
    off[static_cast<size_t>(x)] = total;
    total += b->d(x) * a->d(x);
  }
  std::vector<Mat> rows;
  for (int f = 0; f < c.n_mor(); ++f) {
    int x = c.src(f), y = c.tgt(f);
    // comp[x]*a.r(f) - b.r(f)*comp[y] = 0 : (b(x) x a(y)) equations
    Eigen::Index nr = b->d(x) * a->d(y);
    Mat row = Mat::Zero(nr, total);
    for (Eigen::Index i = 0; i < b->d(x); ++i)
      for (Eigen::Index j = 0; j < a->d(y); ++j) {
        Eigen::Index er = i + j * b->d(x);
        // sum_k comp[x](i,k) a.r(f)(k,j)
        for (Eigen::Index k = 0; k < a->d(x); ++k)
          row(er, off[static_cast<size_t>(x)] + i + k * b->d(x)) += a->r(f)(k, j);
        // - sum_k b.r(f)(i,k) comp[y](k,j)
        for (Eigen::Index k = 0; k < b->d(y); ++k)
          row(er, off[static_cast<size_t>(y)] + k + j * b->d(y)) -= b->r(f)(i, k);
      }
    rows.push_back(row);
  }
  Mat cons = rows.empty() ? Mat::Zero(0, total) : vcat(rows);
  Mat k = kernel_basis(cons);
  std::vector<LinearMap> out;
  for (Eigen::Index col = 0; col < k.cols(); ++col) {
    LinearMap m;
    m.src = a;
    m.tgt = b;
    for (int x = 0; x < c.n_obj(); ++x) {
      Mat mm = Mat::Zero(b->d(x), a->d(x));
      for (Eigen::Index i = 0; i < b->d(x); ++i)
        for (Eigen::Index j = 0; j < a->d(x); ++j)
          mm(i, j) = k(off[static_cast<size_t>(x)] + i + j * b->d(x), col);
      m.comp.push_back(mm);
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace ecdsheaf
