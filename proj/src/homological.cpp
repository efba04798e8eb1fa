#include "ecdsheaf/homological.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

namespace ecdsheaf {

namespace {

CertStats g_stats;

/// ---- category algebra helpers -------------------------------------------

/// Product of two algebra elements (coefficient vectors over morphisms).
Vec alg_mul(const FinCategory& c, const Vec& a, const Vec& b) {
  Vec out = Vec::Zero(c.n_mor());
  for (int f = 0; f < c.n_mor(); ++f) {
    if (a(f) == 0) continue;
    for (int g = 0; g < c.n_mor(); ++g) {
      if (b(g) == 0 || !c.composable(f, g)) continue;
      out(c.compose(f, g)) += a(f) * b(g);
    }
  }
  return out;
}

struct TotalSpace {
  std::vector<Eigen::Index> off;
  Eigen::Index dim = 0;
};

TotalSpace total_space(const FinCategory& c, const std::vector<Eigen::Index>& dims) {
  TotalSpace t;
  t.off.resize(dims.size());
  for (size_t x = 0; x < dims.size(); ++x) {
    t.off[x] = t.dim;
    t.dim += dims[x];
  }
  return t;
}

/// Total-space action of an algebra element on module data given by
/// per-morphism matrices rmat[f]: M(tgt f) -> M(src f).
Mat total_action(const FinCategory& c, const std::vector<Eigen::Index>& dims,
                 const TotalSpace& ts, const std::vector<Mat>& rmat, const Vec& elem) {
  Mat m = Mat::Zero(ts.dim, ts.dim);
  for (int f = 0; f < c.n_mor(); ++f) {
    if (elem(f) == 0) continue;
    int x = c.src(f), u = c.tgt(f);
    if (dims[static_cast<size_t>(x)] == 0 || dims[static_cast<size_t>(u)] == 0) continue;
    m.block(ts.off[static_cast<size_t>(x)], ts.off[static_cast<size_t>(u)],
            dims[static_cast<size_t>(x)], dims[static_cast<size_t>(u)]) +=
        elem(f) * rmat[static_cast<size_t>(f)];
  }
  return m;
}

/// ---- polynomial helpers ---------------------------------------------------

using Poly = std::vector<Rat>;  // low to high, normalized (no trailing zeros)

void poly_trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_divide_linear(const Poly& p, const Rat& root) {
  // divide by (x - root); remainder must vanish
  Poly q(p.size() - 1);
  Rat carry = 0;
  for (size_t i = p.size(); i-- > 1;) {
    carry = p[i] + carry;
    q[i - 1] = carry;
    carry = carry * root;
  }
  return q;
}

Poly min_poly(const Mat& a) {
  Eigen::Index n = a.rows();
  if (n == 0) return {Rat(1)};
  // Krylov on the flattened powers
  std::vector<Mat> pows = {Mat::Identity(n, n)};
  while (true) {
    Mat flat(n * n, static_cast<Eigen::Index>(pows.size()));
    for (size_t k = 0; k < pows.size(); ++k)
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          flat(i * n + j, static_cast<Eigen::Index>(k)) = pows[k](i, j);
    Mat next = pows.back() * a;
    Vec nf(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) nf(i * n + j) = next(i, j);
    auto sol = solve(flat, nf);
    if (sol) {
      Poly p;
      for (Eigen::Index i = 0; i < sol->rows(); ++i) p.push_back(-(*sol)(i, 0));
      p.push_back(1);
      return p;
    }
    pows.push_back(next);
  }
}

std::vector<Rat> rational_roots(const Poly& p) {
  // monic rational polynomial; scale to integer coefficients and use the
  // rational root bound (numerator | constant, denominator | lead)
  std::vector<Rat> roots;
  Poly q = p;
  poly_trim(q);
  if (q.size() <= 1) return roots;
  // strip x^k factors
  size_t low = 0;
  while (low < q.size() && q[low] == 0) ++low;
  if (low > 0) {
    roots.push_back(0);
    q.erase(q.begin(), q.begin() + static_cast<long>(low));
  }
  if (q.size() <= 1) return roots;
  mpz_class lcm = 1;
  for (auto& cf : q) lcm = lcm / gcd(lcm, cf.get_den()) * cf.get_den();
  std::vector<mpz_class> zc;
  for (auto& cf : q) zc.push_back(mpz_class(cf * lcm));
  mpz_class a0 = abs(zc.front()), an = abs(zc.back());
  if (a0 == 0 || a0 > 1000000 || an > 1000000) return roots;
  auto divisors = [](const mpz_class& v) {
    std::vector<long> out;
    long n = static_cast<long>(v.get_si());
    for (long d = 1; d * d <= n; ++d)
      if (n % d == 0) {
        out.push_back(d);
        if (d != n / d) out.push_back(n / d);
      }
    return out;
  };
  auto eval = [&](const Rat& x) {
    Rat acc = 0;
    for (size_t i = q.size(); i-- > 0;) acc = acc * x + q[i];
    return acc;
  };
  for (long pn : divisors(a0))
    for (long qd : divisors(an))
      for (int sign = -1; sign <= 1; sign += 2) {
        Rat cand = rat(sign * pn, qd);
        if (eval(cand) == 0 &&
            std::find(roots.begin(), roots.end(), cand) == roots.end())
          roots.push_back(cand);
      }
  return roots;
}

/// ---- coinduced modules ----------------------------------------------------

struct Coinduced {
  const FinCategory* cat = nullptr;
  std::vector<SiteAlgebra::Indec::Block> blocks;
  QPresheaf pres;
  std::vector<std::vector<Eigen::Index>> block_off;  // [block][object]
  std::vector<Eigen::Index> id_pos;                  // position of id in hom[x][x]
};

Coinduced make_coinduced(const FinCategory& c,
                         const std::vector<SiteAlgebra::Indec::Block>& blocks) {
  Coinduced j;
  j.cat = &c;
  j.blocks = blocks;
  j.pres.cat = &c;
  j.pres.dim.assign(static_cast<size_t>(c.n_obj()), 0);
  j.block_off.assign(blocks.size(), std::vector<Eigen::Index>(static_cast<size_t>(c.n_obj()), 0));
  for (int u = 0; u < c.n_obj(); ++u) {
    Eigen::Index o = 0;
    for (size_t b = 0; b < blocks.size(); ++b) {
      j.block_off[b][static_cast<size_t>(u)] = o;
      o += static_cast<Eigen::Index>(
               c.hom[static_cast<size_t>(blocks[b].x)][static_cast<size_t>(u)].size()) *
           blocks[b].v;
    }
    j.pres.dim[static_cast<size_t>(u)] = o;
  }
  for (size_t b = 0; b < blocks.size(); ++b) {
    int x = blocks[b].x;
    j.id_pos.push_back(static_cast<Eigen::Index>(
        std::find(c.hom[static_cast<size_t>(x)][static_cast<size_t>(x)].begin(),
                  c.hom[static_cast<size_t>(x)][static_cast<size_t>(x)].end(),
                  c.id_mor[static_cast<size_t>(x)]) -
        c.hom[static_cast<size_t>(x)][static_cast<size_t>(x)].begin()));
  }
  j.pres.restr.resize(static_cast<size_t>(c.n_mor()));
  for (int w = 0; w < c.n_mor(); ++w) {
    int up = c.src(w), u = c.tgt(w);
    Mat m = Mat::Zero(j.pres.d(up), j.pres.d(u));
    for (size_t b = 0; b < blocks.size(); ++b) {
      int x = blocks[b].x;
      Eigen::Index v = blocks[b].v;
      const auto& hu = c.hom[static_cast<size_t>(x)][static_cast<size_t>(u)];
      const auto& hup = c.hom[static_cast<size_t>(x)][static_cast<size_t>(up)];
      for (size_t kp = 0; kp < hup.size(); ++kp) {
        int wk = c.compose(w, hup[kp]);
        size_t h = static_cast<size_t>(std::find(hu.begin(), hu.end(), wk) - hu.begin());
        for (Eigen::Index jj = 0; jj < v; ++jj)
          m(j.block_off[b][static_cast<size_t>(up)] + static_cast<Eigen::Index>(kp) * v + jj,
            j.block_off[b][static_cast<size_t>(u)] + static_cast<Eigen::Index>(h) * v + jj) = 1;
      }
    }
    j.pres.restr[static_cast<size_t>(w)] = m;
  }
  return j;
}

/// Canonical embedding of m into its coinduced hull (blocks = nonzero values).
LinearMap coinduced_embedding(const QPresheaf& m, const Coinduced& j) {
  const FinCategory& c = *m.cat;
  LinearMap emb;
  emb.src = share(m);
  emb.tgt = share(j.pres);
  for (int u = 0; u < c.n_obj(); ++u) {
    Mat e = Mat::Zero(j.pres.d(u), m.d(u));
    for (size_t b = 0; b < j.blocks.size(); ++b) {
      int x = j.blocks[b].x;
      const auto& hu = c.hom[static_cast<size_t>(x)][static_cast<size_t>(u)];
      for (size_t h = 0; h < hu.size(); ++h)
        e.block(j.block_off[b][static_cast<size_t>(u)] + static_cast<Eigen::Index>(h) * j.blocks[b].v,
                0, j.blocks[b].v, m.d(u)) = m.r(hu[h]);
    }
    emb.comp.push_back(e);
  }
  return emb;
}

/// Reconstruct a natural map W -> coinduced from its per-block transposes
/// L_b: W(X_b) -> Q^{v_b}.
LinearMap coinduce_from_transpose(const QPresheaf& w, const Coinduced& j,
                                  const std::vector<Mat>& lb) {
  const FinCategory& c = *w.cat;
  LinearMap out;
  out.src = share(w);
  out.tgt = share(j.pres);
  for (int u = 0; u < c.n_obj(); ++u) {
    Mat m = Mat::Zero(j.pres.d(u), w.d(u));
    for (size_t b = 0; b < j.blocks.size(); ++b) {
      int x = j.blocks[b].x;
      const auto& hu = c.hom[static_cast<size_t>(x)][static_cast<size_t>(u)];
      for (size_t h = 0; h < hu.size(); ++h)
        m.block(j.block_off[b][static_cast<size_t>(u)] + static_cast<Eigen::Index>(h) * j.blocks[b].v,
                0, j.blocks[b].v, w.d(u)) = lb[b] * w.r(hu[h]);
    }
    out.comp.push_back(m);
  }
  return out;
}

Coinduced coinduced_view(const FinCategory& c, const SiteAlgebra::Indec& ind) {
  Coinduced j;
  j.cat = &c;
  j.blocks = ind.blocks;
  j.pres = *ind.jpres;
  j.block_off = ind.jblock_off;
  j.id_pos = ind.jid_pos;
  return j;
}

std::vector<Mat> transpose_into_coinduced(const LinearMap& psi, const Coinduced& j) {
  std::vector<Mat> lb;
  for (size_t b = 0; b < j.blocks.size(); ++b) {
    int x = j.blocks[b].x;
    lb.push_back(psi.at(x).middleRows(
        j.block_off[b][static_cast<size_t>(x)] + j.id_pos[b] * j.blocks[b].v, j.blocks[b].v));
  }
  return lb;
}

/// ---- simple splitting -----------------------------------------------------

bool simples_isomorphic(const QPresheaf& a, const QPresheaf& b) {
  if (a.total_dim() != b.total_dim()) return false;
  for (size_t x = 0; x < a.dim.size(); ++x)
    if (a.dim[x] != b.dim[x]) return false;
  auto homs = hom_space(share(a), share(b));
  for (const auto& h : homs) {
    bool iso = true;
    for (size_t x = 0; x < h.comp.size(); ++x)
      if (rank_of(h.comp[x]) != a.dim[x]) iso = false;
    if (iso) return true;
  }
  return false;
}

void split_semisimple(const QPresheaf& v, std::vector<QPresheaf>& out) {
  if (v.total_dim() == 0) return;
  auto ends = hom_space(share(v), share(v));
  if (ends.size() <= 1) {
    out.push_back(v);
    return;
  }
  const FinCategory& c = *v.cat;
  TotalSpace ts = total_space(c, v.dim);
  auto total_of = [&](const LinearMap& e) {
    Mat m = Mat::Zero(ts.dim, ts.dim);
    for (int x = 0; x < c.n_obj(); ++x)
      if (v.d(x) > 0)
        m.block(ts.off[static_cast<size_t>(x)], ts.off[static_cast<size_t>(x)], v.d(x), v.d(x)) =
            e.at(x);
    return m;
  };
  std::vector<LinearMap> cands = ends;
  // a few simple combinations widen the eigenvalue search
  if (ends.size() >= 2) {
    cands.push_back(add(ends[0], ends[1]));
    cands.push_back(add(ends[0], negate(ends[1])));
  }
  for (const auto& e : cands) {
    Mat m = total_of(e);
    Poly mu = min_poly(m);
    for (const Rat& lam : rational_roots(mu)) {
      // split v = ker(e - lam) (+) ker(g(e)) with g = mu / (x - lam)
      Poly g = poly_divide_linear(mu, lam);
      LinearMap shifted = e;
      for (int x = 0; x < c.n_obj(); ++x)
        shifted.comp[static_cast<size_t>(x)] -= lam * Mat::Identity(v.d(x), v.d(x));
      SubPresheaf k1 = kernel_presheaf(shifted);
      if (k1.sub->total_dim() == 0 || k1.sub->total_dim() == v.total_dim()) continue;
      LinearMap ge = e;
      for (int x = 0; x < c.n_obj(); ++x) {
        Mat acc = Mat::Zero(v.d(x), v.d(x));
        for (size_t i = g.size(); i-- > 0;) acc = acc * e.at(x) + g[i] * Mat::Identity(v.d(x), v.d(x));
        ge.comp[static_cast<size_t>(x)] = acc;
      }
      SubPresheaf k2 = kernel_presheaf(ge);
      if (k1.sub->total_dim() + k2.sub->total_dim() != v.total_dim()) continue;
      split_semisimple(*k1.sub, out);
      split_semisimple(*k2.sub, out);
      return;
    }
  }
  out.push_back(v);  // unsplit block; tolerated until a decomposition needs it
}

/// ---- SiteAlgebra ----------------------------------------------------------

std::map<const FinCategory*, std::shared_ptr<const SiteAlgebra>>& algebra_cache() {
  static std::map<const FinCategory*, std::shared_ptr<const SiteAlgebra>> cache;
  return cache;
}

}  // namespace

std::shared_ptr<const SiteAlgebra> SiteAlgebra::get(const FinCategory& c) {
  auto& cache = algebra_cache();
  auto it = cache.find(&c);
  if (it != cache.end()) return it->second;
  auto alg = std::make_shared<SiteAlgebra>();
  alg->build(c);
  cache[&c] = alg;
  return alg;
}

std::vector<Mat> SiteAlgebra::socle(const QPresheaf& m) const {
  const FinCategory& c = *cat;
  std::vector<Mat> out(static_cast<size_t>(c.n_obj()));
  for (int u = 0; u < c.n_obj(); ++u) {
    // v in M(u) annihilated by every radical element's action
    std::vector<Mat> rows;
    for (Eigen::Index r = 0; r < rad.cols(); ++r) {
      for (int x = 0; x < c.n_obj(); ++x) {
        Mat blk = Mat::Zero(m.d(x), m.d(u));
        bool nz = false;
        for (int f : c.hom[static_cast<size_t>(x)][static_cast<size_t>(u)])
          if (rad(f, r) != 0) {
            blk += rad(f, r) * m.r(f);
            nz = true;
          }
        if (nz) rows.push_back(blk);
      }
    }
    Mat cons = rows.empty() ? Mat::Zero(0, m.d(u)) : vcat(rows);
    out[static_cast<size_t>(u)] = kernel_basis(cons);
  }
  return out;
}

void SiteAlgebra::build(const FinCategory& c) {
  const bool timing = getenv("ECDSHEAF_DEBUG_TIMING") != nullptr;
  auto tick = [&, last = std::chrono::steady_clock::now()](const char* what) mutable {
    if (!timing) return;
    auto now = std::chrono::steady_clock::now();
    fprintf(stderr, "[site-algebra] %s: %ldms\n", what,
            static_cast<long>(
                std::chrono::duration_cast<std::chrono::milliseconds>(now - last).count()));
    last = now;
  };
  cat = &c;
  int n = c.n_mor();
  // trace form of the regular representation: G(f,g) = #{h : (f∘g)∘h = h}
  Mat gram = Mat::Zero(n, n);
  for (int f = 0; f < n; ++f)
    for (int g = 0; g < n; ++g) {
      if (!c.composable(f, g)) continue;
      int fg = c.compose(f, g);
      int cnt = 0;
      for (int h = 0; h < n; ++h)
        if (c.composable(fg, h) && c.compose(fg, h) == h) ++cnt;
      gram(f, g) = cnt;
    }
  rad = kernel_basis(gram);
  tick("radical");
  // certify nilpotency of the radical
  {
    Mat span = rad;
    int steps = 0;
    while (span.cols() > 0) {
      if (++steps > c.n_obj() + 2)
        throw EngineError("CertificationFailed", "trace-form radical is not visibly nilpotent");
      std::vector<Mat> prods;
      for (Eigen::Index i = 0; i < rad.cols(); ++i)
        for (Eigen::Index j = 0; j < span.cols(); ++j)
          prods.push_back(alg_mul(c, rad.col(i), span.col(j)));
      span = prods.empty() ? Mat::Zero(n, 0) : image_basis(hcat(prods));
    }
  }

  // ---- simples: split the socles of the coinduced cogenerators
  std::vector<QPresheaf> simple_list;
  for (int x = 0; x < c.n_obj(); ++x) {
    Coinduced j = make_coinduced(c, {{x, 1}});
    auto soc = socle(j.pres);
    SubPresheaf socsub = span_subpresheaf(share(j.pres), soc);
    std::vector<QPresheaf> parts;
    split_semisimple(*socsub.sub, parts);
    for (auto& p : parts) {
      bool dup = false;
      for (const auto& s : simple_list)
        if (simples_isomorphic(s, p)) dup = true;
      if (!dup) simple_list.push_back(p);
    }
  }

  tick("simples");

  // ---- envelopes of the simples
  for (const auto& s : simple_list) {
    Indec ind;
    ind.simple = s;
    // a simple embeds into the coinduced module of any single object where it
    // is nonzero (the kernel is a proper submodule); pick the cheapest block
    std::vector<Indec::Block> blocks;
    {
      int best = -1;
      Eigen::Index best_cost = 0;
      for (int x = 0; x < c.n_obj(); ++x) {
        if (s.d(x) == 0) continue;
        Eigen::Index cost = 0;
        for (int u = 0; u < c.n_obj(); ++u)
          cost += static_cast<Eigen::Index>(c.hom[static_cast<size_t>(x)][static_cast<size_t>(u)].size()) *
                  s.d(x);
        if (best < 0 || cost < best_cost) {
          best = x;
          best_cost = cost;
        }
      }
      blocks.push_back({best, s.d(best)});
    }
    Coinduced j = make_coinduced(c, blocks);
    LinearMap iota = coinduced_embedding(s, j);
    for (int u = 0; u < c.n_obj(); ++u)
      if (rank_of(iota.at(u)) != s.d(u))
        throw EngineError("CertificationFailed", "simple does not embed into its coinduced block");
    tick("env:coinduced");
    auto socj = socle(j.pres);
    tick("env:socle");
    std::vector<Eigen::Index> sdims(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) sdims[static_cast<size_t>(u)] = socj[static_cast<size_t>(u)].cols();
    std::vector<Mat> rmat(static_cast<size_t>(c.n_mor()));
    for (int f = 0; f < c.n_mor(); ++f)
      rmat[static_cast<size_t>(f)] = coords_in(socj[static_cast<size_t>(c.src(f))],
                                               j.pres.r(f) * socj[static_cast<size_t>(c.tgt(f))]);
    // the simple sits inside the socle
    std::vector<Mat> n_in(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u)
      n_in[static_cast<size_t>(u)] = coords_in(socj[static_cast<size_t>(u)], iota.at(u));
    // natural retraction pihat: soc(J) -> S with pihat ∘ n_in = id, found by a
    // direct solve (it exists because the socle is semisimple)
    std::vector<Eigen::Index> voff(static_cast<size_t>(c.n_obj()));
    Eigen::Index nvars = 0;
    for (int u = 0; u < c.n_obj(); ++u) {
      voff[static_cast<size_t>(u)] = nvars;
      nvars += s.d(u) * sdims[static_cast<size_t>(u)];
    }
    std::vector<Mat> rows;
    std::vector<Mat> rhs;
    auto var_of = [&](int u, Eigen::Index i, Eigen::Index k) {
      return voff[static_cast<size_t>(u)] + i + k * s.d(u);  // pihat(U)(i,k)
    };
    for (int f = 0; f < c.n_mor(); ++f) {
      int xo = c.src(f), uo = c.tgt(f);
      Eigen::Index nr = s.d(xo) * sdims[static_cast<size_t>(uo)];
      if (nr == 0) continue;
      Mat row = Mat::Zero(nr, nvars);
      for (Eigen::Index i = 0; i < s.d(xo); ++i)
        for (Eigen::Index k = 0; k < sdims[static_cast<size_t>(uo)]; ++k) {
          Eigen::Index er = i + k * s.d(xo);
          for (Eigen::Index m2 = 0; m2 < sdims[static_cast<size_t>(xo)]; ++m2)
            row(er, var_of(xo, i, m2)) += rmat[static_cast<size_t>(f)](m2, k);
          for (Eigen::Index m2 = 0; m2 < s.d(uo); ++m2)
            row(er, var_of(uo, m2, k)) -= s.r(f)(i, m2);
        }
      rows.push_back(row);
      rhs.push_back(Mat::Zero(nr, 1));
    }
    for (int u = 0; u < c.n_obj(); ++u) {
      Eigen::Index nr = s.d(u) * s.d(u);
      if (nr == 0) continue;
      Mat row = Mat::Zero(nr, nvars);
      Mat b = Mat::Zero(nr, 1);
      for (Eigen::Index i = 0; i < s.d(u); ++i)
        for (Eigen::Index jj = 0; jj < s.d(u); ++jj) {
          Eigen::Index er = i + jj * s.d(u);
          for (Eigen::Index k = 0; k < sdims[static_cast<size_t>(u)]; ++k)
            row(er, var_of(u, i, k)) += n_in[static_cast<size_t>(u)](k, jj);
          b(er, 0) = i == jj ? 1 : 0;
        }
      rows.push_back(row);
      rhs.push_back(b);
    }
    auto sol = solve(vcat(rows), vcat(rhs));
    if (!sol)
      throw EngineError("CertificationFailed", "no natural retraction onto the socle copy");
    std::vector<Mat> pihat(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) {
      Mat p = Mat::Zero(s.d(u), sdims[static_cast<size_t>(u)]);
      for (Eigen::Index i = 0; i < s.d(u); ++i)
        for (Eigen::Index k = 0; k < sdims[static_cast<size_t>(u)]; ++k)
          p(i, k) = (*sol)(var_of(u, i, k), 0);
      pihat[static_cast<size_t>(u)] = p;
    }
    tick("env:pi");
    // certificates: idempotent natural projection fixing the socle copy
    std::vector<Mat> piblk(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) {
      piblk[static_cast<size_t>(u)] = n_in[static_cast<size_t>(u)] * pihat[static_cast<size_t>(u)];
      const Mat& p = piblk[static_cast<size_t>(u)];
      if (p * p != p)
        throw EngineError("CertificationFailed", "socle projection is not idempotent");
      if (p * n_in[static_cast<size_t>(u)] != n_in[static_cast<size_t>(u)])
        throw EngineError("CertificationFailed", "socle projection does not fix the copy");
    }
    for (int f = 0; f < c.n_mor(); ++f)
      if (piblk[static_cast<size_t>(c.src(f))] * rmat[static_cast<size_t>(f)] !=
          rmat[static_cast<size_t>(f)] * piblk[static_cast<size_t>(c.tgt(f))])
        throw EngineError("CertificationFailed", "socle projection is not module-linear");
    tick("env:linearity-cert");
    // extend soc(J) -> J (inclusion after the projection) to an endomorphism
    LinearMap kappa;
    kappa.src = share([&] {
      QPresheaf sp;
      sp.cat = &c;
      sp.dim = sdims;
      sp.restr.resize(static_cast<size_t>(c.n_mor()));
      for (int f = 0; f < c.n_mor(); ++f) sp.restr[static_cast<size_t>(f)] = rmat[static_cast<size_t>(f)];
      return sp;
    }());
    kappa.tgt = share(j.pres);
    for (int u = 0; u < c.n_obj(); ++u)
      kappa.comp.push_back(socj[static_cast<size_t>(u)] * piblk[static_cast<size_t>(u)]);
    LinearMap socj_incl;
    socj_incl.src = kappa.src;
    socj_incl.tgt = kappa.tgt;
    for (int u = 0; u < c.n_obj(); ++u) socj_incl.comp.push_back(socj[static_cast<size_t>(u)]);
    // adjunction extension of kappa along soc(J) -> J
    std::vector<Mat> lb;
    {
      auto tb = transpose_into_coinduced(kappa, j);
      for (size_t b = 0; b < j.blocks.size(); ++b) {
        int x = j.blocks[b].x;
        auto l = solve(socj_incl.at(x).transpose(), tb[b].transpose());
        if (!l) throw EngineError("CertificationFailed", "socle inclusion transpose not extendable");
        lb.push_back(l->transpose());
      }
    }
    QPresheaf jcopy = j.pres;
    LinearMap e = coinduce_from_transpose(jcopy, j, lb);
    // idempotent refinement
    bool idem_ok = false;
    for (int iter = 0; iter < 64; ++iter) {
      bool done = true;
      for (int u = 0; u < c.n_obj(); ++u)
        if (e.at(u) * e.at(u) != e.at(u)) done = false;
      if (done) {
        idem_ok = true;
        break;
      }
      for (int u = 0; u < c.n_obj(); ++u) {
        const Mat& m = e.at(u);
        e.comp[static_cast<size_t>(u)] = 3 * (m * m) - 2 * (m * m * m);
      }
    }
    if (!idem_ok) throw EngineError("CertificationFailed", "idempotent refinement did not converge");
    tick("env:idempotent");
    // the envelope is the image of the idempotent
    ind.blocks = blocks;
    ind.idem.resize(static_cast<size_t>(c.n_obj()));
    ind.env_in_j.resize(static_cast<size_t>(c.n_obj()));
    ind.env.cat = &c;
    ind.env.dim.resize(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) {
      ind.idem[static_cast<size_t>(u)] = e.at(u);
      ind.env_in_j[static_cast<size_t>(u)] = image_basis(e.at(u));
      ind.env.dim[static_cast<size_t>(u)] = ind.env_in_j[static_cast<size_t>(u)].cols();
    }
    ind.env.restr.resize(static_cast<size_t>(c.n_mor()));
    for (int f = 0; f < c.n_mor(); ++f)
      ind.env.restr[static_cast<size_t>(f)] =
          coords_in(ind.env_in_j[static_cast<size_t>(c.src(f))],
                    j.pres.r(f) * ind.env_in_j[static_cast<size_t>(c.tgt(f))]);
    ind.jpres = share(j.pres);
    ind.jblock_off = j.block_off;
    ind.jid_pos = j.id_pos;
    ind.socle_embed.src = share(ind.simple);
    ind.socle_embed.tgt = share(ind.env);
    for (int u = 0; u < c.n_obj(); ++u)
      ind.socle_embed.comp.push_back(
          coords_in(ind.env_in_j[static_cast<size_t>(u)], e.at(u) * iota.at(u)));
    // certificates: socle of the envelope equals the embedded simple
    auto socenv = socle(ind.env);
    for (int u = 0; u < c.n_obj(); ++u) {
      const Mat& se = socenv[static_cast<size_t>(u)];
      const Mat& ue = ind.socle_embed.at(u);
      if (se.cols() != ue.cols() || !span_contains(ue, se) || !span_contains(se, ue))
        throw EngineError("CertificationFailed", "envelope socle differs from the simple socle");
    }
    tick("envelope core");
    if (!lifting_certificate(ind.env))
      throw EngineError("CertificationFailed", "indecomposable injective fails the lifting test");
    tick("lifting certificate");
    indecs.push_back(std::move(ind));
  }
}

/// ---- formal injective objects --------------------------------------------

InjectiveObject InjectiveObject::none(const FinCategory& c) {
  InjectiveObject e;
  e.alg = SiteAlgebra::get(c);
  e.pres = zero_presheaf_ptr(c);
  return e;
}

namespace {

InjectiveObject assemble(const std::shared_ptr<const SiteAlgebra>& alg, std::vector<int> pieces) {
  InjectiveObject e;
  e.alg = alg;
  e.pieces = std::move(pieces);
  if (e.pieces.empty()) {
    e.pres = zero_presheaf_ptr(*alg->cat);
    return e;
  }
  std::vector<QPresheafPtr> parts;
  for (int p : e.pieces) parts.push_back(share(alg->indecs[static_cast<size_t>(p)].env));
  e.pres = direct_sum(parts).sum;
  return e;
}

std::vector<Eigen::Index> piece_offsets(const InjectiveObject& e, int obj) {
  std::vector<Eigen::Index> off(e.pieces.size() + 1, 0);
  for (size_t p = 0; p < e.pieces.size(); ++p)
    off[p + 1] = off[p] + e.alg->indecs[static_cast<size_t>(e.pieces[p])].env.d(obj);
  return off;
}

}  // namespace

bool lifting_certificate(const QPresheaf& e) {
  const FinCategory& c = *e.cat;
  ++g_stats.lifting_checks;
  for (int x = 0; x < c.n_obj(); ++x) {
    for (const auto& r : all_sieves(c, x)) {
      // Hom(Lambda(x), e) = e(x); Hom(Q[r], e) = linear matching families of r
      Eigen::Index mf = linear_matching_dim(e, r);
      // restriction map e(x) -> families: rank must be mf for surjectivity
      // families of the maximal sieve correspond to sections; build the map by
      // restricting sections to the sieve members
      // (solve the generator-tuple system as in the plus construction)
      if (mf == 0) continue;
      // surjective iff dim of the image equals mf
      // image = families arising from sections
      // compute via the explicit generator tuples
      std::vector<int> gens = generating_family(c, r);
      std::vector<Mat> blocks;
      for (int g : gens) blocks.push_back(e.r(g));
      Mat tuple = blocks.empty() ? Mat::Zero(0, e.d(x)) : vcat(blocks);
      // coordinates of these tuples in the matching family space
      // (matching data recomputed; small)
      Sieve rr = r;
      Eigen::Index img = 0;
      {
        // families live in ker(constraints); sections map into it
        // rank of tuple-image inside the family space equals rank of tuple
        // projected; since the family parametrization is by generator values,
        // the image dimension is just rank(tuple) when tuples are matching
        img = rank_of(tuple);
      }
      (void)rr;
      if (img < mf) {
        if (getenv("ECDSHEAF_DEBUG_LIFT")) {
          fprintf(stderr, "lift fail at obj %s sieve {", c.objects[static_cast<size_t>(x)].c_str());
          for (int mm : sieve_members(c, r)) fprintf(stderr, "%s,", c.mor_id(mm).c_str());
          fprintf(stderr, "} mf=%ld img=%ld dims:", static_cast<long>(mf), static_cast<long>(img));
          for (int u = 0; u < c.n_obj(); ++u) fprintf(stderr, " %ld", static_cast<long>(e.d(u)));
          fprintf(stderr, "\n");
        }
        return false;
      }
    }
  }
  return true;
}

EnvelopeResult injective_envelope(const QPresheaf& m) {
  const FinCategory& c = *m.cat;
  auto alg = SiteAlgebra::get(c);
  ++g_stats.envelopes;
  EnvelopeResult res;
  if (m.total_dim() == 0) {
    res.e = InjectiveObject::none(c);
    res.embed = LinearMap::zero(share(m), res.e.pres);
    return res;
  }
  auto socb = alg->socle(m);
  SubPresheaf soc = span_subpresheaf(share(m), socb);
  // decompose the socle into catalogue simples
  struct Copy {
    int simple;
    LinearMap emb;  // simple -> socle
  };
  std::vector<Copy> copies;
  std::vector<Mat> acc(static_cast<size_t>(c.n_obj()));
  for (int u = 0; u < c.n_obj(); ++u) acc[static_cast<size_t>(u)] = Mat::Zero(soc.sub->d(u), 0);
  for (size_t j = 0; j < alg->indecs.size(); ++j) {
    const QPresheaf& s = alg->indecs[j].simple;
    auto homs = hom_space(share(s), soc.sub);
    for (const auto& h : homs) {
      Eigen::Index before = 0, after = 0;
      std::vector<Mat> joined(static_cast<size_t>(c.n_obj()));
      for (int u = 0; u < c.n_obj(); ++u) {
        before += rank_of(acc[static_cast<size_t>(u)]);
        joined[static_cast<size_t>(u)] = image_basis(hcat({acc[static_cast<size_t>(u)], h.at(u)}));
        after += joined[static_cast<size_t>(u)].cols();
      }
      if (after == before + s.total_dim()) {
        copies.push_back({static_cast<int>(j), h});
        acc = joined;
      }
    }
  }
  Eigen::Index covered = 0;
  for (int u = 0; u < c.n_obj(); ++u) covered += acc[static_cast<size_t>(u)].cols();
  if (covered != soc.sub->total_dim())
    throw EngineError("CertificationFailed",
                      "socle decomposition incomplete (unsplit simple constituents?)");
  // projections onto the copies
  std::vector<LinearMap> projs;
  {
    std::vector<std::vector<Mat>> blocks(copies.size());
    for (int u = 0; u < c.n_obj(); ++u) {
      std::vector<Mat> cols;
      for (const auto& cp : copies) cols.push_back(cp.emb.at(u));
      Mat big = hcat(cols);
      Mat inv = big.cols() > 0 ? coords_in(big, Mat::Identity(big.rows(), big.rows()))
                               : Mat::Zero(0, soc.sub->d(u));
      Eigen::Index at = 0;
      for (size_t k = 0; k < copies.size(); ++k) {
        Eigen::Index rows = copies[k].emb.at(u).cols();
        blocks[k].push_back(inv.middleRows(at, rows));
        at += rows;
      }
    }
    for (size_t k = 0; k < copies.size(); ++k) {
      LinearMap p;
      p.src = soc.sub;
      p.tgt = share(alg->indecs[static_cast<size_t>(copies[k].simple)].simple);
      p.comp = blocks[k];
      projs.push_back(std::move(p));
    }
  }
  // assemble the envelope and the extended embedding
  res.e = assemble(alg, [&] {
    std::vector<int> ps;
    for (const auto& cp : copies) ps.push_back(cp.simple);
    return ps;
  }());
  std::vector<LinearMap> comps;
  for (size_t k = 0; k < copies.size(); ++k) {
    const auto& ind = alg->indecs[static_cast<size_t>(copies[k].simple)];
    LinearMap beta = compose(ind.socle_embed, projs[k]);  // socle -> env_j
    // extend along socle -> m through the coinduced realization
    InjectiveObject single = assemble(alg, {copies[k].simple});
    LinearMap ext = extend_along_mono(beta, single, soc.incl);
    comps.push_back(std::move(ext));
  }
  res.embed.src = share(m);
  res.embed.tgt = res.e.pres;
  for (int u = 0; u < c.n_obj(); ++u) {
    std::vector<Mat> stack;
    for (auto& cmp : comps) stack.push_back(cmp.at(u));
    res.embed.comp.push_back(stack.empty() ? Mat::Zero(0, m.d(u)) : vcat(stack));
  }
  // certificates: objectwise injective, socle of E inside the image
  for (int u = 0; u < c.n_obj(); ++u)
    if (rank_of(res.embed.at(u)) != m.d(u))
      throw EngineError("CertificationFailed", "envelope embedding is not injective");
  auto socE = alg->socle(*res.e.pres);
  for (int u = 0; u < c.n_obj(); ++u) {
    Mat img = res.embed.at(u) * soc.incl.at(u);
    if (!span_contains(img, socE[static_cast<size_t>(u)]))
      throw EngineError("CertificationFailed", "envelope is not an essential extension");
  }
  return res;
}

LinearMap extend_along_mono(const LinearMap& phi, const InjectiveObject& e,
                            const LinearMap& mono) {
  const FinCategory& c = *phi.src->cat;
  const QPresheaf& v = *mono.tgt;
  LinearMap out;
  out.src = mono.tgt;
  out.tgt = e.pres;
  if (e.pieces.empty()) {
    for (int u = 0; u < c.n_obj(); ++u) out.comp.push_back(Mat::Zero(0, v.d(u)));
    return out;
  }
  std::vector<std::vector<Mat>> piece_rows(e.pieces.size());
  for (size_t p = 0; p < e.pieces.size(); ++p) {
    const auto& ind = e.alg->indecs[static_cast<size_t>(e.pieces[p])];
    Coinduced j = coinduced_view(c, ind);
    // phi restricted to this piece, in coinduced coordinates
    std::vector<Mat> toj(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) {
      auto off = piece_offsets(e, u);
      Mat block = phi.at(u).middleRows(off[p], ind.env.d(u));
      toj[static_cast<size_t>(u)] = ind.env_in_j[static_cast<size_t>(u)] * block;
    }
    LinearMap tojm;
    tojm.src = phi.src;
    tojm.tgt = share(j.pres);
    tojm.comp = toj;
    auto tb = transpose_into_coinduced(tojm, j);
    std::vector<Mat> lb;
    for (size_t b = 0; b < j.blocks.size(); ++b) {
      int x = j.blocks[b].x;
      auto l = solve(mono.at(x).transpose(), tb[b].transpose());
      if (!l) throw EngineError("CertificationFailed", "extension along a non-injective map");
      lb.push_back(l->transpose());
    }
    LinearMap psij = coinduce_from_transpose(v, j, lb);
    for (int u = 0; u < c.n_obj(); ++u)
      piece_rows[p].push_back(coords_in(ind.env_in_j[static_cast<size_t>(u)],
                                        ind.idem[static_cast<size_t>(u)] * psij.at(u)));
  }
  for (int u = 0; u < c.n_obj(); ++u) {
    std::vector<Mat> stack;
    for (size_t p = 0; p < e.pieces.size(); ++p) stack.push_back(piece_rows[p][static_cast<size_t>(u)]);
    out.comp.push_back(vcat(stack));
  }
  return out;
}

/// ---- resolutions and cohomology -------------------------------------------

SheafResolution sheaf_injective_resolution(const QPresheaf& f, const Topology& t, int n) {
  const FinCategory& c = *f.cat;
  ++g_stats.resolutions;
  if (!is_linear_sheaf(f, t))
    throw EngineError("NotASheaf", "resolution input must satisfy the sheaf condition");
  SheafResolution res;
  QPresheafPtr cur = share(f);
  LinearMap into;  // cur -> I^k
  for (int k = 0; k <= n; ++k) {
    if (cur->total_dim() == 0) {
      res.actual_length = k - 1;
      return res;
    }
    EnvelopeResult env = injective_envelope(*cur);
    ++g_stats.sheaf_checks;
    if (!env.e.pres->is_zero() && !is_linear_sheaf(*env.e.pres, t))
      throw EngineError("CertificationFailed", "resolution term is not a sheaf");
    if (k == 0) {
      res.aug = env.embed;
    } else {
      // d^{k-1} = env.embed ∘ (unit ∘ proj) : I^{k-1} -> I^k
      res.d.push_back(compose(env.embed, into));
    }
    res.terms.push_back(env.e);
    res.actual_length = k;
    if (k == n) break;
    // next: sheafified cokernel of cur -> I^k
    std::vector<Mat> img(static_cast<size_t>(c.n_obj()));
    for (int u = 0; u < c.n_obj(); ++u) img[static_cast<size_t>(u)] = image_basis(env.embed.at(u));
    QuotientResult q = quotient_by(env.e.pres, img);
    LinearPlusResult sh = sheafify_linear(*q.quot, t);
    into = compose(sh.unit, q.proj);
    cur = sh.out;
  }
  return res;
}

namespace {

QPresheafPtr resolution_term(const SheafResolution& r, int q) {
  if (q >= 0 && q < static_cast<int>(r.terms.size())) return r.terms[static_cast<size_t>(q)].pres;
  return nullptr;
}

}  // namespace

CohomologyReport sheaf_cohomology(const FinCategory& c, int s, const QPresheaf& f,
                                  const Topology& t, int n) {
  CohomologyReport rep;
  rep.object = s;
  LinearPlusResult af = sheafify_linear(f, t);
  SheafResolution res = sheaf_injective_resolution(*af.out, t, n + 1);
  rep.resolution_length = res.actual_length;
  // sections complex at s
  SectionComplex sec;
  sec.lo = 0;
  sec.hi = n + 1;
  for (int q = 0; q <= n + 1; ++q) {
    auto term = resolution_term(res, q);
    sec.dims.push_back(term ? term->d(s) : 0);
  }
  for (int q = 0; q < n + 1; ++q) {
    if (q < static_cast<int>(res.d.size()))
      sec.d.push_back(res.d[static_cast<size_t>(q)].at(s));
    else
      sec.d.push_back(Mat::Zero(sec.dims[static_cast<size_t>(q + 1)], sec.dims[static_cast<size_t>(q)]));
  }
  for (int q = 0; q <= n; ++q) rep.dims.push_back(sec.homology_dim(q));
  return rep;
}


/// ---- Cartan-Eilenberg assembly ---------------------------------------------

namespace {

/// Augmented resolution with formal-sum terms.
struct AugRes {
  QPresheafPtr source;
  std::vector<InjectiveObject> terms;
  std::vector<LinearMap> d;
  LinearMap aug;

  InjectiveObject term(int q, const FinCategory& c) const {
    if (q >= 0 && q < static_cast<int>(terms.size())) return terms[static_cast<size_t>(q)];
    return InjectiveObject::none(c);
  }
  LinearMap diff(int q, const FinCategory& c) const {
    if (q >= 0 && q < static_cast<int>(d.size())) return d[static_cast<size_t>(q)];
    return LinearMap::zero(term(q, c).pres, term(q + 1, c).pres);
  }
};

AugRes to_augres(QPresheafPtr src, SheafResolution&& r) {
  AugRes a;
  a.source = src;
  a.terms = std::move(r.terms);
  a.d = std::move(r.d);
  a.aug = std::move(r.aug);
  if (a.terms.empty()) a.aug = LinearMap::zero(a.source, zero_presheaf_ptr(*a.source->cat));
  return a;
}

AugRes zero_res(const FinCategory& c) {
  AugRes a;
  a.source = zero_presheaf_ptr(c);
  a.aug = LinearMap::zero(a.source, zero_presheaf_ptr(c));
  return a;
}

/// Short exact sequence of sheaves A -> M -> Q, the quotient realized as the
/// sheafification of the objectwise quotient (which is already torsion-free,
/// so ker(pi) = im(incl) objectwise).
struct SheafSes {
  LinearMap incl;
  QuotientResult psh_quot;
  std::vector<Mat> lift;  // per object, section of the projection
  LinearPlusResult sh;
  LinearMap pi;  // M -> Q
};

SheafSes make_ses(const LinearMap& incl, const Topology& t) {
  SheafSes s;
  s.incl = incl;
  const FinCategory& c = *incl.src->cat;
  std::vector<Mat> img(static_cast<size_t>(c.n_obj()));
  for (int u = 0; u < c.n_obj(); ++u) img[static_cast<size_t>(u)] = image_basis(incl.at(u));
  s.psh_quot = quotient_by(incl.tgt, img);
  for (int u = 0; u < c.n_obj(); ++u) {
    auto l = solve(s.psh_quot.proj.at(u),
                   Mat::Identity(s.psh_quot.quot->d(u), s.psh_quot.quot->d(u)));
    if (!l) throw EngineError("CertificationFailed", "quotient projection has no section");
    s.lift.push_back(*l);
  }
  s.sh = sheafify_linear(*s.psh_quot.quot, t);
  s.pi = compose(s.sh.unit, s.psh_quot.proj);
  return s;
}

/// Horseshoe splicing: an augmented injective resolution of M from resolutions
/// of the sub A and the quotient Q, with correction maps h^q: IQ^q -> IA^{q+1}.
AugRes horseshoe(const AugRes& ra, const AugRes& rq, const SheafSes& ses, const Topology& t) {
  const FinCategory& c = *ses.incl.src->cat;
  AugRes rm;
  rm.source = ses.incl.tgt;
  int len = static_cast<int>(std::max(ra.terms.size(), rq.terms.size()));
  LinearMap lambda = extend_along_mono(ra.aug, ra.term(0, c), ses.incl);
  std::vector<LinearMap> h;
  for (int q = 0; q < len; ++q) {
    InjectiveObject target = ra.term(q + 1, c);
    if (target.pres->is_zero() || rq.term(q, c).pres->is_zero()) {
      h.push_back(LinearMap::zero(rq.term(q, c).pres, target.pres));
      continue;
    }
    if (q == 0) {
      LinearMap xi = negate(compose(ra.diff(0, c), lambda));
      LinearMap psi0;
      psi0.src = ses.psh_quot.quot;
      psi0.tgt = xi.tgt;
      for (int u = 0; u < c.n_obj(); ++u)
        psi0.comp.push_back(xi.at(u) * ses.lift[static_cast<size_t>(u)]);
      LinearMap phi = descend_linear(psi0, ses.sh, t);
      h.push_back(extend_along_mono(phi, target, rq.aug));
    } else {
      LinearMap rho = negate(compose(ra.diff(q, c), h[static_cast<size_t>(q - 1)]));
      LinearMap dq = rq.diff(q - 1, c);
      SubPresheaf im = image_presheaf(dq);
      LinearMap psi;
      psi.src = im.sub;
      psi.tgt = rho.tgt;
      for (int u = 0; u < c.n_obj(); ++u) {
        Mat ker = kernel_basis(dq.at(u));
        Mat z = rho.at(u) * ker;
        if (z != Mat::Zero(z.rows(), z.cols()))
          throw EngineError("CertificationFailed", "horseshoe correction does not factor");
        auto pre = solve(dq.at(u), im.basis[static_cast<size_t>(u)]);
        if (!pre) throw EngineError("CertificationFailed", "image basis not in the image");
        psi.comp.push_back(rho.at(u) * (*pre));
      }
      h.push_back(extend_along_mono(psi, target, im.incl));
    }
  }
  for (int q = 0; q < len; ++q) {
    InjectiveObject ta = ra.term(q, c), tq = rq.term(q, c);
    InjectiveObject sum;
    sum.alg = ta.alg ? ta.alg : tq.alg;
    sum.pieces = ta.pieces;
    for (int p : tq.pieces) sum.pieces.push_back(p);
    if (ta.pres->is_zero())
      sum.pres = tq.pres;
    else if (tq.pres->is_zero())
      sum.pres = ta.pres;
    else
      sum.pres = direct_sum({ta.pres, tq.pres}).sum;
    rm.terms.push_back(std::move(sum));
  }
  for (int q = 0; q + 1 < len; ++q) {
    LinearMap d;
    d.src = rm.terms[static_cast<size_t>(q)].pres;
    d.tgt = rm.terms[static_cast<size_t>(q + 1)].pres;
    for (int u = 0; u < c.n_obj(); ++u) {
      Eigen::Index rA = ra.term(q, c).pres->d(u), rQ = rq.term(q, c).pres->d(u);
      Eigen::Index nA = ra.term(q + 1, c).pres->d(u), nQ = rq.term(q + 1, c).pres->d(u);
      Mat m = Mat::Zero(nA + nQ, rA + rQ);
      if (nA > 0 && rA > 0) m.block(0, 0, nA, rA) = ra.diff(q, c).at(u);
      if (nA > 0 && rQ > 0) m.block(0, rA, nA, rQ) = h[static_cast<size_t>(q)].at(u);
      if (nQ > 0 && rQ > 0) m.block(nA, rA, nQ, rQ) = rq.diff(q, c).at(u);
      d.comp.push_back(m);
    }
    rm.d.push_back(std::move(d));
  }
  rm.aug.src = ses.incl.tgt;
  rm.aug.tgt = rm.terms.empty() ? zero_presheaf_ptr(c) : rm.terms[0].pres;
  LinearMap qa = rm.terms.empty() ? LinearMap::zero(rm.source, rm.aug.tgt)
                                  : compose(rq.aug, ses.pi);
  for (int u = 0; u < c.n_obj(); ++u) {
    Eigen::Index nA = ra.term(0, c).pres->d(u), nQ = rq.term(0, c).pres->d(u);
    Mat m = Mat::Zero(nA + nQ, ses.incl.tgt->d(u));
    if (nA > 0) m.block(0, 0, nA, m.cols()) = lambda.at(u);
    if (nQ > 0) m.block(nA, 0, nQ, m.cols()) = qa.at(u);
    rm.aug.comp.push_back(m);
  }
  return rm;
}

}  // namespace

LocalReplacement local_replacement(const PresheafComplex& k, const Topology& t, int n) {
  const FinCategory& c = *k.cat;
  LocalReplacement out;
  out.reliable_hi = k.hi + n;
  if (k.empty()) {
    out.l = PresheafComplex::zero_complex(c);
    out.unit.src = k;
    out.unit.tgt = out.l;
    return out;
  }
  if (auto err = k.check_complex())
    throw EngineError("MalformedComposition", "local replacement input: " + *err);
  ComplexPlusResult sh = sheafify_complex(k, t);
  const PresheafComplex& cx = sh.out;
  int dmax = k.hi + n;

  std::map<int, SubPresheaf> z;      // Z^p inside C^p
  std::map<int, SheafSes> ses_zc;    // Z^p -> C^p -> B^{p+1}
  std::map<int, AugRes> bres;        // resolutions of B^p
  std::map<int, LinearMap> b_in_z;   // B^p -> Z^p
  for (int p = k.lo; p <= k.hi; ++p) {
    z.emplace(p, kernel_presheaf(cx.diff(p)));
    ses_zc.emplace(p, make_ses(z.at(p).incl, t));
  }
  bres.emplace(k.lo, zero_res(c));
  b_in_z.emplace(k.lo, LinearMap::zero(zero_presheaf_ptr(c), z.at(k.lo).sub));
  for (int p = k.lo; p < k.hi; ++p) {
    // B^{p+1} = a(C^p/Z^p) with the descended mono into Z^{p+1}
    const SheafSes& s = ses_zc.at(p);
    LinearMap iota0;
    iota0.src = s.psh_quot.quot;
    iota0.tgt = cx.term(p + 1);
    for (int u = 0; u < c.n_obj(); ++u)
      iota0.comp.push_back(cx.diff(p).at(u) * s.lift[static_cast<size_t>(u)]);
    LinearMap desc = descend_linear(iota0, s.sh, t);
    LinearMap into_z;
    into_z.src = s.sh.out;
    into_z.tgt = z.at(p + 1).sub;
    for (int u = 0; u < c.n_obj(); ++u)
      into_z.comp.push_back(coords_in(z.at(p + 1).basis[static_cast<size_t>(u)], desc.at(u)));
    for (int u = 0; u < c.n_obj(); ++u)
      if (rank_of(into_z.at(u)) != s.sh.out->d(u))
        throw EngineError("CertificationFailed", "image sheaf does not inject into the kernel");
    b_in_z.emplace(p + 1, std::move(into_z));
    int lenq = std::max(0, dmax - (p + 1) + 2);
    bres.emplace(p + 1,
                 to_augres(s.sh.out, sheaf_injective_resolution(*s.sh.out, t, lenq)));
  }
  // top quotient is zero (d^hi = 0): give it an empty resolution
  bres.emplace(k.hi + 1, zero_res(c));

  std::map<int, AugRes> cols;
  for (int p = k.lo; p <= k.hi; ++p) {
    int lenp = std::max(0, dmax - p + 2);
    SheafSes ses_bz = make_ses(b_in_z.at(p), t);
    AugRes hres = to_augres(ses_bz.sh.out, sheaf_injective_resolution(*ses_bz.sh.out, t, lenp));
    AugRes iz = horseshoe(bres.at(p), hres, ses_bz, t);
    cols.emplace(p, horseshoe(iz, bres.at(p + 1), ses_zc.at(p), t));
  }

  // totalization: T^n = (+)_p IC^{p, n-p}, d = d_h + (-1)^p d_v
  out.l.cat = &c;
  out.l.lo = k.lo;
  out.l.hi = dmax + 1;
  auto comp_dim = [&](int p, int q, int u) -> Eigen::Index {
    auto it = cols.find(p);
    if (it == cols.end() || q < 0) return 0;
    return it->second.term(q, c).pres->d(u);
  };
  std::vector<QPresheafPtr> tot_terms;
  for (int deg = k.lo; deg <= dmax + 1; ++deg) {
    std::vector<QPresheafPtr> parts;
    for (int p = k.lo; p <= std::min(k.hi, deg); ++p) {
      int q = deg - p;
      auto it = cols.find(p);
      if (it != cols.end() && q >= 0) parts.push_back(it->second.term(q, c).pres);
    }
    if (parts.empty())
      tot_terms.push_back(zero_presheaf_ptr(c));
    else if (parts.size() == 1)
      tot_terms.push_back(parts[0]);
    else
      tot_terms.push_back(direct_sum(parts).sum);
  }
  out.l.terms = tot_terms;
  for (int deg = k.lo; deg <= dmax; ++deg) {
    LinearMap d;
    d.src = out.l.terms[static_cast<size_t>(deg - k.lo)];
    d.tgt = out.l.terms[static_cast<size_t>(deg + 1 - k.lo)];
    for (int u = 0; u < c.n_obj(); ++u) {
      Mat m = Mat::Zero(d.tgt->d(u), d.src->d(u));
      // source component offsets at (p, deg-p), target at (p', deg+1-p')
      auto src_off = [&](int p) {
        Eigen::Index o = 0;
        for (int pp = k.lo; pp < p; ++pp) o += comp_dim(pp, deg - pp, u);
        return o;
      };
      auto tgt_off = [&](int p) {
        Eigen::Index o = 0;
        for (int pp = k.lo; pp < p; ++pp) o += comp_dim(pp, deg + 1 - pp, u);
        return o;
      };
      for (int p = k.lo; p <= std::min(k.hi, deg); ++p) {
        int q = deg - p;
        Eigen::Index sd = comp_dim(p, q, u);
        if (sd == 0) continue;
        // vertical: (p, q) -> (p, q+1) with sign (-1)^p
        Eigen::Index td = comp_dim(p, q + 1, u);
        if (td > 0) {
          Mat dv = cols.at(p).diff(q, c).at(u);
          m.block(tgt_off(p), src_off(p), td, sd) = (p % 2 == 0 ? 1 : -1) * dv;
        }
        // horizontal: project IC^{p,q} onto its B^{p+1}-part, include into
        // IC^{p+1,q} as the leading block
        if (p + 1 <= k.hi) {
          Eigen::Index bdim = bres.at(p + 1).term(q, c).pres->d(u);
          if (bdim > 0) {
            Eigen::Index iz_dim = sd - bdim;  // IC^{p,q} = IZ^{p,q} (+) IB^{p+1,q}
            m.block(tgt_off(p + 1), src_off(p) + iz_dim, bdim, bdim) =
                Mat::Identity(bdim, bdim);
          }
        }
      }
      d.comp.push_back(m);
    }
    out.l.diffs.push_back(std::move(d));
  }
  // certificate: d_total squares to zero in the assembled range
  for (int deg = k.lo; deg + 1 <= dmax; ++deg) {
    LinearMap dd = compose(out.l.diffs[static_cast<size_t>(deg + 1 - k.lo)],
                           out.l.diffs[static_cast<size_t>(deg - k.lo)]);
    for (int u = 0; u < c.n_obj(); ++u)
      if (dd.at(u) != Mat::Zero(dd.at(u).rows(), dd.at(u).cols()))
        throw EngineError("CertificationFailed", "totalization differential does not square to zero");
  }
  // unit: K -> C -> column augmentations
  out.unit.src = k;
  out.unit.tgt = out.l;
  for (int p = k.lo; p <= k.hi; ++p) {
    LinearMap u0 = compose(cols.at(p).aug, sh.unit.at(p));
    // place into the (p, 0) block of T^p
    LinearMap placed = LinearMap::zero(k.term(p), out.l.terms[static_cast<size_t>(p - k.lo)]);
    for (int u = 0; u < c.n_obj(); ++u) {
      Eigen::Index off = 0;
      for (int pp = k.lo; pp < p; ++pp) off += comp_dim(pp, p - pp, u);
      if (u0.at(u).rows() > 0)
        placed.comp[static_cast<size_t>(u)].block(off, 0, u0.at(u).rows(), u0.at(u).cols()) =
            u0.at(u);
    }
    out.unit.comps[p] = std::move(placed);
  }
  if (auto err = out.unit.check_chain_map())
    throw EngineError("CertificationFailed", "derived unit is not a chain map: " + *err);
  return out;
}

LocalVerdict is_t_local(const PresheafComplex& k, const Topology& t, int n,
                        bool range_definitive) {
  LocalVerdict v;
  const FinCategory& c = *k.cat;
  if (k.empty()) {
    v.verdict = Locality::Local;
    v.definitive = true;
    v.checked_hi = 0;
    return v;
  }
  LocalReplacement lr = local_replacement(k, t, n);
  v.checked_hi = k.hi + n;
  for (int u = 0; u < c.n_obj(); ++u) {
    int fail = 0;
    if (!induces_homology_iso(lr.unit, u, k.lo, v.checked_hi, &fail)) {
      v.verdict = Locality::NotLocal;
      v.witness_obj = u;
      v.witness_deg = fail;
      v.definitive = true;
      return v;
    }
  }
  v.verdict = range_definitive ? Locality::Local : Locality::Inconclusive;
  v.definitive = range_definitive;
  return v;
}

namespace {

struct FixedData {
  SectionComplex sec;
  std::vector<Mat> bases;  // per degree, fixed-subspace basis
};

FixedData fixed_data(const PresheafComplex& k, const GroupAction& a) {
  FixedData fd;
  fd.sec.lo = k.lo;
  fd.sec.hi = k.hi;
  for (int d = k.lo; d <= k.hi; ++d) {
    const QPresheaf& f = *k.term(d);
    Mat p = Mat::Zero(f.d(a.carrier), f.d(a.carrier));
    for (int g = 0; g < a.group->n(); ++g) p += f.r(a.act[static_cast<size_t>(g)]);
    p *= rat(1, a.group->n());
    Mat b = image_basis(p);
    fd.bases.push_back(b);
    fd.sec.dims.push_back(b.cols());
  }
  for (int d = k.lo; d < k.hi; ++d) {
    Mat img = k.diff(d).at(a.carrier) * fd.bases[static_cast<size_t>(d - k.lo)];
    fd.sec.d.push_back(coords_in(fd.bases[static_cast<size_t>(d + 1 - k.lo)], img));
  }
  return fd;
}

}  // namespace

LesRecord connecting_sequence(const FinCategory& c, const EquivariantSquare& q,
                              const PresheafComplex& k, const Topology& t, int n) {
  LesRecord rec;
  LocalReplacement lr = local_replacement(k, t, n);
  const PresheafComplex& l = lr.l;
  SectionComplex a = sections_at(l, q.S);
  SectionComplex bs = sections_at(l, q.Sp);
  FixedData bx = fixed_data(l, q.act_X);
  FixedData cxp = fixed_data(l, q.act_Xp);
  SectionComplex mid = section_sum(bx.sec, bs);
  rec.lo = l.lo;
  rec.hi = lr.reliable_hi;
  // termwise maps
  std::vector<Mat> alpha, beta;
  for (int d = l.lo; d <= l.hi; ++d) {
    const QPresheaf& term = *l.term(d);
    Mat ax = coords_in(bx.bases[static_cast<size_t>(d - l.lo)], term.r(q.f));
    Mat as = term.r(q.g);
    alpha.push_back(vcat({ax, as}));
    Mat bxp = coords_in(cxp.bases[static_cast<size_t>(d - l.lo)],
                        term.r(q.gp) * bx.bases[static_cast<size_t>(d - l.lo)]);
    Mat bsp = coords_in(cxp.bases[static_cast<size_t>(d - l.lo)], term.r(q.fp));
    beta.push_back(hcat({bxp, -bsp}));
  }
  // termwise exactness of 0 -> A -> Mid -> Corner -> 0
  for (int d = l.lo; d <= std::min(l.hi, rec.hi + 1); ++d) {
    const Mat& al = alpha[static_cast<size_t>(d - l.lo)];
    const Mat& be = beta[static_cast<size_t>(d - l.lo)];
    if (rank_of(al) != al.cols() || rank_of(be) != be.rows() ||
        rank_of(be * al) != 0 || (be.cols() - rank_of(be)) != rank_of(al)) {
      rec.exact = false;
      rec.witness_degree = d;
      throw EngineError("NotExact", "termwise section sequence fails at degree " +
                                        std::to_string(d));
    }
  }
  // homology, induced maps, connecting maps
  std::vector<HomologySpace> ha, hm, hc;
  for (int d = rec.lo; d <= rec.hi; ++d) {
    ha.push_back(homology_space(a.dmat(d - 1), a.dmat(d)));
    hm.push_back(homology_space(mid.dmat(d - 1), mid.dmat(d)));
    hc.push_back(homology_space(cxp.sec.dmat(d - 1), cxp.sec.dmat(d)));
  }
  auto alpha_at = [&](int d) -> Mat {
    if (d < l.lo || d > l.hi) return Mat::Zero(mid.dim(d), a.dim(d));
    return alpha[static_cast<size_t>(d - l.lo)];
  };
  auto beta_at = [&](int d) -> Mat {
    if (d < l.lo || d > l.hi) return Mat::Zero(cxp.sec.dim(d), mid.dim(d));
    return beta[static_cast<size_t>(d - l.lo)];
  };
  for (int d = rec.lo; d <= rec.hi; ++d) {
    size_t i = static_cast<size_t>(d - rec.lo);
    rec.h_s.push_back(ha[i].dim());
    rec.h_mid.push_back(hm[i].dim());
    rec.h_corner.push_back(hc[i].dim());
    Mat tm = Mat::Zero(hm[i].dim(), ha[i].dim());
    for (Eigen::Index col = 0; col < ha[i].dim(); ++col)
      tm.col(col) = hm[i].classify(alpha_at(d) * ha[i].reps.col(col));
    rec.to_mid.push_back(tm);
    Mat tc = Mat::Zero(hc[i].dim(), hm[i].dim());
    for (Eigen::Index col = 0; col < hm[i].dim(); ++col)
      tc.col(col) = hc[i].classify(beta_at(d) * hm[i].reps.col(col));
    rec.to_corner.push_back(tc);
    // connecting: lift a corner cycle, apply d, pull back along alpha
    Mat conn = Mat::Zero(0, hc[i].dim());
    if (d + 1 <= rec.hi) {
      conn = Mat::Zero(ha[i + 1].dim(), hc[i].dim());
      for (Eigen::Index col = 0; col < hc[i].dim(); ++col) {
        Vec cyc = hc[i].reps.col(col);
        auto lift = solve(beta_at(d), Mat(cyc));
        if (!lift) throw EngineError("NotExact", "corner cycle does not lift");
        Vec db = mid.dmat(d) * Vec(lift->col(0));
        auto pre = solve(alpha_at(d + 1), Mat(db));
        if (!pre) throw EngineError("NotExact", "boundary of a lift escapes the sub");
        conn.col(col) = ha[i + 1].classify(Vec(pre->col(0)));
      }
    }
    rec.connecting.push_back(conn);
  }
  // exactness of the four-term windows by rank bookkeeping
  for (int d = rec.lo; d <= rec.hi; ++d) {
    size_t i = static_cast<size_t>(d - rec.lo);
    auto is_exact_pair = [&](const Mat& into, const Mat& outof) {
      if (rank_of(outof * into) != 0) return false;
      return (outof.cols() - rank_of(outof)) == rank_of(into);
    };
    bool ok = is_exact_pair(rec.to_mid[i], rec.to_corner[i]);
    if (ok && d + 1 <= rec.hi) ok = is_exact_pair(rec.to_corner[i], rec.connecting[i]);
    if (ok && d + 1 <= rec.hi)
      ok = is_exact_pair(rec.connecting[i], rec.to_mid[i + 1]);
    if (!ok) {
      rec.exact = false;
      rec.witness_degree = d;
      return rec;
    }
  }
  rec.exact = true;
  return rec;
}

bool connecting_natural(const FinCategory& c, const EquivariantSquare& from,
                        const EquivariantSquare& to, const SquareMorphism& m,
                        const PresheafComplex& k, const Topology& t, int n) {
  // from = (G,C1) mapping to to = (G,C): restriction along the components must
  // intertwine the two connecting maps.
  LocalReplacement lr = local_replacement(k, t, n);
  const PresheafComplex& l = lr.l;
  FixedData cxp_from = fixed_data(l, from.act_Xp);
  FixedData cxp_to = fixed_data(l, to.act_Xp);
  SectionComplex a_from = sections_at(l, from.S);
  SectionComplex a_to = sections_at(l, to.S);
  LesRecord les_from = connecting_sequence(c, from, k, t, n);
  LesRecord les_to = connecting_sequence(c, to, k, t, n);
  int hi = std::min(les_from.hi, les_to.hi);
  for (int d = les_from.lo; d + 1 <= hi; ++d) {
    // restriction on corners: K(X'_to) -> K(X'_from) along m.xp
    size_t i = static_cast<size_t>(d - les_from.lo);
    HomologySpace hc_to = homology_space(cxp_to.sec.dmat(d - 1), cxp_to.sec.dmat(d));
    HomologySpace hc_from = homology_space(cxp_from.sec.dmat(d - 1), cxp_from.sec.dmat(d));
    Mat res_corner = Mat::Zero(hc_from.dim(), hc_to.dim());
    for (Eigen::Index col = 0; col < hc_to.dim(); ++col) {
      Vec v = cxp_to.bases[static_cast<size_t>(d - l.lo)] * hc_to.reps.col(col);
      Vec w = l.term(d)->r(m.xp) * v;
      res_corner.col(col) =
          hc_from.classify(coords_in(cxp_from.bases[static_cast<size_t>(d - l.lo)], Mat(w)).col(0));
    }
    HomologySpace hs_to2 = homology_space(a_to.dmat(d), a_to.dmat(d + 1));
    HomologySpace hs_from2 = homology_space(a_from.dmat(d), a_from.dmat(d + 1));
    Mat res_s = Mat::Zero(hs_from2.dim(), hs_to2.dim());
    for (Eigen::Index col = 0; col < hs_to2.dim(); ++col) {
      Vec v = hs_to2.reps.col(col);
      Vec w = l.term(d + 1)->r(m.s) * v;
      res_s.col(col) = hs_from2.classify(w);
    }
    if (res_s * les_to.connecting[i] != les_from.connecting[i] * res_corner) return false;
  }
  return true;
}

const CertStats& certificate_stats() { return g_stats; }
void reset_certificate_stats() { g_stats = CertStats(); }

}  // namespace ecdsheaf
