#include "ecdsheaf/complexes.hpp"

namespace ecdsheaf {

QPresheafPtr PresheafComplex::term(int deg) const {
  if (deg < lo || deg > hi) return zero_presheaf_ptr(*cat);
  return terms[static_cast<size_t>(deg - lo)];
}

LinearMap PresheafComplex::diff(int deg) const {
  if (deg >= lo && deg < hi) return diffs[static_cast<size_t>(deg - lo)];
  return LinearMap::zero(term(deg), term(deg + 1));
}

std::optional<std::string> PresheafComplex::check_complex() const {
  // terms are validated at construction; this checks the chain structure
  for (int d = lo; d < hi; ++d) {
    auto err = diffs[static_cast<size_t>(d - lo)].check_natural();
    if (err) return err;
  }
  for (int d = lo; d + 1 < hi; ++d) {
    LinearMap dd = compose(diff(d + 1), diff(d));
    for (size_t x = 0; x < dd.comp.size(); ++x)
      if (dd.comp[x] != Mat::Zero(dd.comp[x].rows(), dd.comp[x].cols()))
        return "d∘d != 0 at degree " + std::to_string(d);
  }
  return std::nullopt;
}

PresheafComplex PresheafComplex::single(QPresheafPtr f, int degree) {
  PresheafComplex k;
  k.cat = f->cat;
  k.lo = degree;
  k.hi = degree;
  k.terms = {std::move(f)};
  return k;
}

PresheafComplex PresheafComplex::zero_complex(const FinCategory& c) {
  PresheafComplex k;
  k.cat = &c;
  k.lo = 0;
  k.hi = -1;
  return k;
}

LinearMap ComplexMap::at(int deg) const {
  auto it = comps.find(deg);
  if (it != comps.end()) return it->second;
  return LinearMap::zero(src.term(deg), tgt.term(deg));
}

std::optional<std::string> ComplexMap::check_chain_map() const {
  int lo = std::min(src.lo, tgt.lo), hi = std::max(src.hi, tgt.hi);
  for (int d = lo; d <= hi; ++d) {
    LinearMap a = compose(tgt.diff(d), at(d));
    LinearMap b = compose(at(d + 1), src.diff(d));
    for (size_t x = 0; x < a.comp.size(); ++x)
      if (a.comp[x] != b.comp[x]) return "chain-map square fails at degree " + std::to_string(d);
  }
  return std::nullopt;
}

Eigen::Index SectionComplex::dim(int deg) const {
  if (deg < lo || deg > hi) return 0;
  return dims[static_cast<size_t>(deg - lo)];
}

Mat SectionComplex::dmat(int deg) const {
  if (deg >= lo && deg < hi) return d[static_cast<size_t>(deg - lo)];
  return Mat::Zero(dim(deg + 1), dim(deg));
}

Eigen::Index SectionComplex::homology_dim(int deg) const {
  return ecdsheaf::homology_dim(dmat(deg - 1), dmat(deg));
}

SectionComplex sections_at(const PresheafComplex& k, int obj) {
  SectionComplex s;
  s.lo = k.lo;
  s.hi = k.hi;
  for (int d = k.lo; d <= k.hi; ++d) s.dims.push_back(k.term(d)->d(obj));
  for (int d = k.lo; d < k.hi; ++d) s.d.push_back(k.diff(d).at(obj));
  return s;
}

std::map<int, Eigen::Index> homology_dims(const PresheafComplex& k, int obj) {
  std::map<int, Eigen::Index> out;
  SectionComplex s = sections_at(k, obj);
  for (int d = k.lo; d <= k.hi; ++d) out[d] = s.homology_dim(d);
  return out;
}

bool induces_homology_iso(const ComplexMap& u, int obj, int lo_deg, int hi_deg,
                          int* fail_degree) {
  SectionComplex a = sections_at(u.src, obj);
  SectionComplex b = sections_at(u.tgt, obj);
  for (int d = lo_deg; d <= hi_deg; ++d) {
    HomologySpace ha = homology_space(a.dmat(d - 1), a.dmat(d));
    HomologySpace hb = homology_space(b.dmat(d - 1), b.dmat(d));
    Mat f = u.at(d).comp[static_cast<size_t>(obj)];
    // induced map on homology
    Mat induced = Mat::Zero(hb.dim(), ha.dim());
    for (Eigen::Index i = 0; i < ha.dim(); ++i) {
      Vec img = f * ha.reps.col(i);
      induced.col(i) = hb.classify(img);
    }
    bool iso = ha.dim() == hb.dim() && rank_of(induced) == ha.dim();
    if (!iso) {
      if (fail_degree) *fail_degree = d;
      return false;
    }
  }
  return true;
}

ComplexPlusResult sheafify_complex(const PresheafComplex& k, const Topology& t) {
  ComplexPlusResult res;
  res.out.cat = k.cat;
  res.out.lo = k.lo;
  res.out.hi = k.hi;
  res.unit.src = k;
  std::vector<LinearPlusResult> sh;
  for (int d = k.lo; d <= k.hi; ++d) sh.push_back(sheafify_linear(*k.term(d), t));
  for (auto& s : sh) res.out.terms.push_back(s.out);
  for (int d = k.lo; d < k.hi; ++d)
    res.out.diffs.push_back(sheafify_linear_map(k.diff(d), sh[static_cast<size_t>(d - k.lo)],
                                                sh[static_cast<size_t>(d + 1 - k.lo)], t));
  res.unit.tgt = res.out;
  for (int d = k.lo; d <= k.hi; ++d) res.unit.comps[d] = sh[static_cast<size_t>(d - k.lo)].unit;
  return res;
}

SectionComplex fixed_sections(const PresheafComplex& k, const GroupAction& a) {
  SectionComplex s;
  s.lo = k.lo;
  s.hi = k.hi;
  std::vector<Mat> bases;
  for (int d = k.lo; d <= k.hi; ++d) {
    const QPresheaf& f = *k.term(d);
    Mat p = Mat::Zero(f.d(a.carrier), f.d(a.carrier));
    for (int g = 0; g < a.group->n(); ++g) p += f.r(a.act[static_cast<size_t>(g)]);
    p *= rat(1, a.group->n());
    Mat b = image_basis(p);
    bases.push_back(b);
    s.dims.push_back(b.cols());
  }
  for (int d = k.lo; d < k.hi; ++d) {
    Mat img = k.diff(d).at(a.carrier) * bases[static_cast<size_t>(d - k.lo)];
    s.d.push_back(coords_in(bases[static_cast<size_t>(d + 1 - k.lo)], img));
  }
  return s;
}

SectionComplex section_sum(const SectionComplex& a, const SectionComplex& b) {
  SectionComplex s;
  s.lo = std::min(a.lo, b.lo);
  s.hi = std::max(a.hi, b.hi);
  if (s.hi < s.lo) return s;
  for (int deg = s.lo; deg <= s.hi; ++deg) s.dims.push_back(a.dim(deg) + b.dim(deg));
  for (int deg = s.lo; deg < s.hi; ++deg) {
    Mat m = Mat::Zero(s.dim(deg + 1), s.dim(deg));
    Mat da = a.dmat(deg), db = b.dmat(deg);
    if (da.rows() > 0 && da.cols() > 0) m.block(0, 0, da.rows(), da.cols()) = da;
    if (db.rows() > 0 && db.cols() > 0) m.block(a.dim(deg + 1), a.dim(deg), db.rows(), db.cols()) = db;
    s.d.push_back(m);
  }
  return s;
}

ThreeTermTotal three_term_total(const SectionComplex& a, const SectionComplex& b,
                                const SectionComplex& c, const std::vector<Mat>& alpha,
                                const std::vector<Mat>& beta, int lo_deg) {
  // T^n = A^n + B^{n-1} + C^{n-2}; d(x,y,z) = (dx, ax - dy, by + dz)
  ThreeTermTotal out;
  SectionComplex& t = out.total;
  int lo = std::min({a.lo, b.lo, c.lo});
  int hi = std::max({a.hi, b.hi + 1, c.hi + 2});
  t.lo = lo;
  t.hi = hi;
  auto adim = [&](int n) { return a.dim(n); };
  auto bdim = [&](int n) { return b.dim(n - 1); };
  auto cdim = [&](int n) { return c.dim(n - 2); };
  auto alpha_at = [&](int n) -> Mat {
    int i = n - lo_deg;
    if (i >= 0 && i < static_cast<int>(alpha.size())) return alpha[static_cast<size_t>(i)];
    return Mat::Zero(b.dim(n), a.dim(n));
  };
  auto beta_at = [&](int n) -> Mat {
    int i = n - lo_deg;
    if (i >= 0 && i < static_cast<int>(beta.size())) return beta[static_cast<size_t>(i)];
    return Mat::Zero(c.dim(n), b.dim(n));
  };
  for (int n = lo; n <= hi; ++n) t.dims.push_back(adim(n) + bdim(n) + cdim(n));
  for (int n = lo; n < hi; ++n) {
    Mat m = Mat::Zero(t.dim(n + 1), t.dim(n));
    Eigen::Index ra = adim(n + 1), rb = bdim(n + 1);
    Eigen::Index ca = adim(n), cb = bdim(n);
    Mat da = a.dmat(n);
    if (da.rows() > 0 && da.cols() > 0) m.block(0, 0, da.rows(), da.cols()) = da;
    Mat al = alpha_at(n);  // A^n -> B^n = second slot of T^{n+1}
    if (al.rows() > 0 && al.cols() > 0) m.block(ra, 0, al.rows(), al.cols()) = al;
    Mat dbm = b.dmat(n - 1);  // B^{n-1} -> B^n
    if (dbm.rows() > 0 && dbm.cols() > 0) m.block(ra, ca, dbm.rows(), dbm.cols()) = -dbm;
    Mat be = beta_at(n - 1);  // B^{n-1} -> C^{n-1} = third slot of T^{n+1}
    if (be.rows() > 0 && be.cols() > 0) m.block(ra + rb, ca, be.rows(), be.cols()) = be;
    Mat dc = c.dmat(n - 2);
    if (dc.rows() > 0 && dc.cols() > 0) m.block(ra + rb, ca + cb, dc.rows(), dc.cols()) = dc;
    t.d.push_back(m);
  }
  out.acyclic = true;
  for (int n = lo; n <= hi; ++n)
    if (t.homology_dim(n) != 0) {
      out.acyclic = false;
      out.witness_degree = n;
      break;
    }
  return out;
}

}  // namespace ecdsheaf
