#include "ecdsheaf/random_gen.hpp"

#include <algorithm>

namespace ecdsheaf {

SetPresheaf random_set_presheaf(const FinCategory& c, Rng& rng, int max_pieces, int max_collapses) {
  int pieces = rng.in(1, max_pieces);
  SetPresheaf f = representable(c, rng.below(c.n_obj()));
  for (int i = 1; i < pieces; ++i)
    f = disjoint_union(f, representable(c, rng.below(c.n_obj())));
  // random congruence collapses: identify two elements and close under
  // restriction with a union-find over all values
  int collapses = rng.in(0, max_collapses);
  for (int k = 0; k < collapses; ++k) {
    int x = rng.below(c.n_obj());
    if (f.size(x) < 2) continue;
    int a = rng.below(f.size(x)), b = rng.below(f.size(x));
    if (a == b) continue;
    // congruence closure
    std::vector<std::vector<int>> cls(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) {
      cls[static_cast<size_t>(u)].resize(static_cast<size_t>(f.size(u)));
      for (int e = 0; e < f.size(u); ++e) cls[static_cast<size_t>(u)][static_cast<size_t>(e)] = e;
    }
    auto find = [&](int u, int e) {
      while (cls[static_cast<size_t>(u)][static_cast<size_t>(e)] != e)
        e = cls[static_cast<size_t>(u)][static_cast<size_t>(e)];
      return e;
    };
    auto unite = [&](int u, int e1, int e2) {
      int r1 = find(u, e1), r2 = find(u, e2);
      if (r1 != r2) cls[static_cast<size_t>(u)][static_cast<size_t>(std::max(r1, r2))] = std::min(r1, r2);
    };
    unite(x, a, b);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int h = 0; h < c.n_mor(); ++h) {
        int uu = c.src(h), v = c.tgt(h);
        for (int e1 = 0; e1 < f.size(v); ++e1)
          for (int e2 = e1 + 1; e2 < f.size(v); ++e2) {
            if (find(v, e1) != find(v, e2)) continue;
            if (find(uu, f.apply(h, e1)) != find(uu, f.apply(h, e2))) {
              unite(uu, f.apply(h, e1), f.apply(h, e2));
              changed = true;
            }
          }
      }
    }
    // rebuild the quotient presheaf
    SetPresheaf q;
    q.cat = &c;
    q.at.resize(static_cast<size_t>(c.n_obj()));
    q.restr.resize(static_cast<size_t>(c.n_mor()));
    std::vector<std::vector<int>> newix(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) {
      newix[static_cast<size_t>(u)].assign(static_cast<size_t>(f.size(u)), -1);
      for (int e = 0; e < f.size(u); ++e) {
        int r = find(u, e);
        if (newix[static_cast<size_t>(u)][static_cast<size_t>(r)] < 0) {
          newix[static_cast<size_t>(u)][static_cast<size_t>(r)] =
              static_cast<int>(q.at[static_cast<size_t>(u)].size());
          q.at[static_cast<size_t>(u)].push_back(f.at[static_cast<size_t>(u)][static_cast<size_t>(r)]);
        }
        newix[static_cast<size_t>(u)][static_cast<size_t>(e)] =
            newix[static_cast<size_t>(u)][static_cast<size_t>(r)];
      }
    }
    for (int h = 0; h < c.n_mor(); ++h) {
      int uu = c.src(h), v = c.tgt(h);
      auto& r = q.restr[static_cast<size_t>(h)];
      r.assign(q.at[static_cast<size_t>(v)].size(), -1);
      for (int e = 0; e < f.size(v); ++e)
        r[static_cast<size_t>(newix[static_cast<size_t>(v)][static_cast<size_t>(e)])] =
            newix[static_cast<size_t>(uu)][static_cast<size_t>(f.apply(h, e))];
    }
    f = q;
  }
  if (auto err = f.check_functorial())
    throw EngineError("CertificationFailed", "random presheaf is not functorial: " + *err);
  return f;
}

QPresheaf random_qpresheaf(const FinCategory& c, Rng& rng, int max_pieces, int max_relations,
                           Eigen::Index dim_cap) {
  int pieces = rng.in(1, max_pieces);
  std::vector<QPresheafPtr> parts;
  for (int i = 0; i < pieces; ++i) parts.push_back(share(free_linear(c, rng.below(c.n_obj()))));
  QPresheafPtr sum = pieces == 1 ? parts[0] : direct_sum(parts).sum;
  // random generated subpresheaf to kill
  int rels = rng.in(0, max_relations);
  std::vector<Mat> gens(static_cast<size_t>(c.n_obj()));
  for (int u = 0; u < c.n_obj(); ++u) gens[static_cast<size_t>(u)] = Mat::Zero(sum->d(u), 0);
  for (int k = 0; k < rels; ++k) {
    int u = rng.below(c.n_obj());
    if (sum->d(u) == 0) continue;
    Vec v = Vec::Zero(sum->d(u));
    for (Eigen::Index i = 0; i < v.rows(); ++i) v(i) = rng.small_rat(1);
    gens[static_cast<size_t>(u)] = hcat({gens[static_cast<size_t>(u)], Mat(v)});
  }
  QPresheaf out;
  bool any = false;
  for (auto& g : gens)
    if (g.cols() > 0) any = true;
  if (any) {
    SubPresheaf sub = span_subpresheaf(sum, gens);
    out = *quotient_by(sum, sub.basis).quot;
  } else {
    out = *sum;
  }
  // cap dimensions by one quotient of a random generated subpresheaf
  for (int rounds = 0; rounds < 4; ++rounds) {
    bool big = false;
    std::vector<Mat> extra(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) {
      Eigen::Index over = out.d(u) - dim_cap;
      extra[static_cast<size_t>(u)] = Mat::Zero(out.d(u), std::max<Eigen::Index>(over, 0));
      if (over <= 0) continue;
      big = true;
      for (Eigen::Index k = 0; k < over; ++k)
        for (Eigen::Index i = 0; i < out.d(u); ++i)
          extra[static_cast<size_t>(u)](i, k) = rng.small_rat(1);
    }
    if (!big) break;
    SubPresheaf sub = span_subpresheaf(share(out), extra);
    out = *quotient_by(share(out), sub.basis).quot;
  }
  if (auto err = out.check_functorial())
    throw EngineError("CertificationFailed", "random presheaf is not functorial: " + *err);
  return out;
}

QPresheafPtr random_linear_sheaf(const FinCategory& c, const Topology& t, Rng& rng,
                                 Eigen::Index dim_cap) {
  return sheafify_linear(random_qpresheaf(c, rng, 3, 2, dim_cap), t).out;
}

SetPresheaf random_set_sheaf(const FinCategory& c, const Topology& t, Rng& rng) {
  return sheafify_set(random_set_presheaf(c, rng), t).out;
}

PresheafComplex random_complex(const FinCategory& c, Rng& rng, int max_len, Eigen::Index dim_cap) {
  PresheafComplex k;
  k.cat = &c;
  int len = rng.in(0, max_len);  // number of differentials
  k.lo = rng.in(-1, 1);
  k.hi = k.lo + len;
  for (int i = 0; i <= len; ++i)
    k.terms.push_back(share(random_qpresheaf(c, rng, 2, 2, dim_cap)));
  for (int i = 0; i < len; ++i) {
    auto homb = hom_space(k.terms[static_cast<size_t>(i)], k.terms[static_cast<size_t>(i + 1)]);
    LinearMap d = LinearMap::zero(k.terms[static_cast<size_t>(i)], k.terms[static_cast<size_t>(i + 1)]);
    if (!homb.empty()) {
      // random combination, then project onto the subspace with d∘d = 0
      if (i == 0) {
        for (auto& h : homb)
          if (rng.below(2)) d = add(d, h);
      } else {
        const LinearMap& prev = k.diffs[static_cast<size_t>(i - 1)];
        std::vector<LinearMap> good;
        for (auto& h : homb) {
          LinearMap dd = compose(h, prev);
          bool zero = true;
          for (auto& m : dd.comp)
            if (m != Mat::Zero(m.rows(), m.cols())) zero = false;
          if (zero) good.push_back(h);
        }
        for (auto& h : good)
          if (rng.below(2)) d = add(d, h);
      }
    }
    k.diffs.push_back(std::move(d));
  }
  if (auto err = k.check_complex())
    throw EngineError("CertificationFailed", "random complex invalid: " + *err);
  return k;
}

GModule random_gmodule(const FinGroup& g, Rng& rng, Eigen::Index dim) {
  GModule m;
  m.group = std::make_shared<FinGroup>(g);
  m.dim = dim;
  // block sums of the regular representation plus a fixed tail, conjugated by
  // a random unimodular change of basis
  Mat basis = Mat::Identity(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i + 1; j < dim; ++j) basis(i, j) = rng.small_rat(1);
  Mat inv = coords_in(basis, Mat::Identity(dim, dim));
  Eigen::Index blocks = dim / g.n();
  for (int e = 0; e < g.n(); ++e) {
    Mat p = Mat::Identity(dim, dim);
    for (Eigen::Index b = 0; b < blocks; ++b) {
      p.block(b * g.n(), b * g.n(), g.n(), g.n()).setZero();
      for (int i = 0; i < g.n(); ++i)
        p(b * g.n() + g.mul[static_cast<size_t>(e)][static_cast<size_t>(i)], b * g.n() + i) = 1;
    }
    m.act.push_back(basis * p * inv);
  }
  if (auto err = m.check_representation())
    throw EngineError("CertificationFailed", "random G-module invalid: " + *err);
  return m;
}

}  // namespace ecdsheaf
