#include "ecdsheaf/sieves.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace ecdsheaf {

bool Sieve::subset_of(const Sieve& o) const {
  for (size_t i = 0; i < mem.size(); ++i)
    if (mem[i] && !o.mem[i]) return false;
  return true;
}

Sieve Sieve::intersect(const Sieve& o) const {
  Sieve r = *this;
  for (size_t i = 0; i < mem.size(); ++i) r.mem[i] = mem[i] && o.mem[i];
  return r;
}

Sieve Sieve::unite(const Sieve& o) const {
  Sieve r = *this;
  for (size_t i = 0; i < mem.size(); ++i) r.mem[i] = mem[i] || o.mem[i];
  return r;
}

int Sieve::size() const {
  int n = 0;
  for (char b : mem) n += b ? 1 : 0;
  return n;
}

bool sieve_contains(const FinCategory& c, const Sieve& r, int mor) {
  if (c.tgt(mor) != r.base) return false;
  return r.contains_pos(c.into_pos(mor));
}

Sieve empty_sieve(const FinCategory& c, int base) {
  Sieve s;
  s.base = base;
  s.mem.assign(c.arrows_into[static_cast<size_t>(base)].size(), 0);
  return s;
}

Sieve maximal_sieve(const FinCategory& c, int base) {
  Sieve s = empty_sieve(c, base);
  std::fill(s.mem.begin(), s.mem.end(), 1);
  return s;
}

std::vector<int> sieve_members(const FinCategory& c, const Sieve& r) {
  std::vector<int> out;
  const auto& in = c.arrows_into[static_cast<size_t>(r.base)];
  for (size_t i = 0; i < in.size(); ++i)
    if (r.mem[i]) out.push_back(in[i]);
  return out;
}

bool sieve_closed(const FinCategory& c, const Sieve& r) {
  for (int m : sieve_members(c, r))
    for (int h = 0; h < c.n_mor(); ++h)
      if (c.composable(m, h) && !sieve_contains(c, r, c.compose(m, h))) return false;
  return true;
}

Sieve sieve_generated(const FinCategory& c, int base, const std::vector<int>& family) {
  for (int m : family)
    if (c.tgt(m) != base)
      throw EngineError("MixedTargets", "family member " + c.mor_id(m) + " does not end at " +
                                            c.objects[static_cast<size_t>(base)]);
  Sieve s = empty_sieve(c, base);
  for (int m : family) {
    s.mem[static_cast<size_t>(c.into_pos(m))] = 1;
    for (int h = 0; h < c.n_mor(); ++h)
      if (c.composable(m, h)) s.mem[static_cast<size_t>(c.into_pos(c.compose(m, h)))] = 1;
  }
  return s;
}

Sieve pullback_sieve(const FinCategory& c, const Sieve& r, int f) {
  if (c.tgt(f) != r.base)
    throw EngineError("MixedTargets", "pullback of a sieve along a morphism with wrong target");
  int t = c.src(f);
  Sieve s = empty_sieve(c, t);
  const auto& in = c.arrows_into[static_cast<size_t>(t)];
  for (size_t i = 0; i < in.size(); ++i)
    if (sieve_contains(c, r, c.compose(f, in[i]))) s.mem[i] = 1;
  return s;
}

std::vector<int> generating_family(const FinCategory& c, const Sieve& r) {
  std::vector<int> gens;
  Sieve have = empty_sieve(c, r.base);
  for (int m : sieve_members(c, r)) {
    if (sieve_contains(c, have, m)) continue;
    gens.push_back(m);
    have = have.unite(sieve_generated(c, r.base, {m}));
  }
  return gens;
}

std::vector<Sieve> all_sieves(const FinCategory& c, int base) {
  std::vector<Sieve> principals;
  for (int m : c.arrows_into[static_cast<size_t>(base)])
    principals.push_back(sieve_generated(c, base, {m}));
  std::set<std::vector<char>> seen;
  std::vector<Sieve> out;
  auto push = [&](const Sieve& s) {
    if (seen.insert(s.mem).second) out.push_back(s);
  };
  push(empty_sieve(c, base));
  for (const auto& p : principals) push(p);
  // union closure
  for (size_t i = 0; i < out.size(); ++i)
    for (const auto& p : principals) {
      Sieve u = out[i].unite(p);
      push(u);
    }
  return out;
}

bool Topology::covering(const Sieve& r) const {
  for (const auto& s : covers[static_cast<size_t>(r.base)])
    if (s == r) return true;
  return false;
}

const Sieve& Topology::minimal_cover(int obj) const {
  if (rmin_cache_.empty()) rmin_cache_.resize(static_cast<size_t>(cat->n_obj()));
  auto& slot = rmin_cache_[static_cast<size_t>(obj)];
  if (!slot) {
    Sieve m = maximal_sieve(*cat, obj);
    for (const auto& s : covers[static_cast<size_t>(obj)]) m = m.intersect(s);
    slot = m;
  }
  return *slot;
}

void Topology::sort_covers() {
  for (auto& cs : covers)
    std::sort(cs.begin(), cs.end(), [](const Sieve& a, const Sieve& b) {
      if (a.size() != b.size()) return a.size() > b.size();
      return a.mem > b.mem;
    });
  rmin_cache_.clear();
}

Topology generate_topology_from_seeds(const FinCategory& c,
                                      const std::vector<std::pair<int, std::vector<int>>>& seeds,
                                      unsigned long order_seed) {
  Topology t;
  t.cat = &c;
  t.covers.resize(static_cast<size_t>(c.n_obj()));
  std::vector<std::set<std::vector<char>>> have(static_cast<size_t>(c.n_obj()));
  auto add = [&](const Sieve& s) {
    if (have[static_cast<size_t>(s.base)].insert(s.mem).second) {
      t.covers[static_cast<size_t>(s.base)].push_back(s);
      return true;
    }
    return false;
  };
  for (int x = 0; x < c.n_obj(); ++x) add(maximal_sieve(c, x));
  add(empty_sieve(c, c.initial));
  for (const auto& [base, fam] : seeds) add(sieve_generated(c, base, fam));

  std::vector<std::vector<Sieve>> lattice(static_cast<size_t>(c.n_obj()));
  for (int x = 0; x < c.n_obj(); ++x) lattice[static_cast<size_t>(x)] = all_sieves(c, x);

  std::mt19937_64 rng(order_seed);
  bool changed = true;
  while (changed) {
    changed = false;
    // pullback stability
    std::vector<std::pair<int, Sieve>> work;
    for (int x = 0; x < c.n_obj(); ++x)
      for (const auto& r : t.covers[static_cast<size_t>(x)]) work.push_back({x, r});
    if (order_seed) std::shuffle(work.begin(), work.end(), rng);
    for (const auto& [x, r] : work)
      for (int f = 0; f < c.n_mor(); ++f) {
        if (c.tgt(f) != x) continue;
        if (add(pullback_sieve(c, r, f))) changed = true;
      }
    // local character
    for (int x = 0; x < c.n_obj(); ++x) {
      std::vector<Sieve> cands = lattice[static_cast<size_t>(x)];
      if (order_seed) std::shuffle(cands.begin(), cands.end(), rng);
      for (const auto& rp : cands) {
        if (have[static_cast<size_t>(x)].count(rp.mem)) continue;
        for (const auto& r : t.covers[static_cast<size_t>(x)]) {
          bool all = true;
          for (int m : sieve_members(c, r))
            if (!have[static_cast<size_t>(c.src(m))].count(pullback_sieve(c, rp, m).mem)) {
              all = false;
              break;
            }
          if (all) {
            add(rp);
            changed = true;
            break;
          }
        }
      }
    }
  }
  t.sort_covers();
  return t;
}

Topology generate_topology(const FinCategory& c, const EcdStructure& p, unsigned long order_seed) {
  std::vector<std::pair<int, std::vector<int>>> seeds;
  for (const auto& q : p.squares) seeds.push_back({q.S, q.cover_family()});
  return generate_topology_from_seeds(c, seeds, order_seed);
}

Topology join_topologies(const Topology& a, const Topology& b) {
  std::vector<std::pair<int, std::vector<int>>> seeds;
  const FinCategory& c = *a.cat;
  for (int x = 0; x < c.n_obj(); ++x) {
    for (const auto& r : a.covers[static_cast<size_t>(x)]) seeds.push_back({x, sieve_members(c, r)});
    for (const auto& r : b.covers[static_cast<size_t>(x)]) seeds.push_back({x, sieve_members(c, r)});
  }
  return generate_topology_from_seeds(c, seeds);
}

TopologyAxiomReport check_topology_axioms(const Topology& t) {
  TopologyAxiomReport rep;
  const FinCategory& c = *t.cat;
  auto fail = [&](const std::string& code, const std::string& detail) {
    rep.ok = false;
    rep.violations.push_back({code, detail});
  };
  for (int x = 0; x < c.n_obj(); ++x) {
    bool has_max = false;
    for (const auto& r : t.covers[static_cast<size_t>(x)]) {
      if (r.size() == static_cast<int>(r.mem.size())) has_max = true;
      if (!sieve_closed(c, r)) fail("NotASieve", "listed cover is not precomposition-closed");
    }
    if (!has_max) fail("NoMaximal", "maximal sieve of " + c.objects[static_cast<size_t>(x)] + " is not covering");
  }
  if (!t.covering(empty_sieve(c, c.initial)))
    fail("NoEmptyCover", "empty sieve on the initial object is not covering");
  // pullback stability
  for (int x = 0; x < c.n_obj(); ++x)
    for (const auto& r : t.covers[static_cast<size_t>(x)])
      for (int f = 0; f < c.n_mor(); ++f) {
        if (c.tgt(f) != x) continue;
        if (!t.covering(pullback_sieve(c, r, f)))
          fail("NotStable", "pullback of a cover of " + c.objects[static_cast<size_t>(x)] +
                                " along " + c.mor_id(f) + " is not covering");
      }
  // local character over the full sieve lattice
  for (int x = 0; x < c.n_obj(); ++x)
    for (const auto& rp : all_sieves(c, x)) {
      if (t.covering(rp)) continue;
      for (const auto& r : t.covers[static_cast<size_t>(x)]) {
        bool all = true;
        for (int m : sieve_members(c, r))
          if (!t.covering(pullback_sieve(c, rp, m))) {
            all = false;
            break;
          }
        if (all) {
          fail("NoLocalCharacter", "sieve on " + c.objects[static_cast<size_t>(x)] +
                                       " is locally covering but not covering");
          break;
        }
      }
    }
  return rep;
}

std::vector<Sieve> covering_sieves(const Topology& t, int obj) {
  return t.covers[static_cast<size_t>(obj)];
}

std::vector<Sieve> simple_cover_sieves(const FinCategory& c, const EcdStructure& p, int obj,
                                       int depth, bool* saturated) {
  // states: canonical families (sorted member lists)
  std::set<std::vector<int>> seen;
  std::set<std::vector<char>> sieves_seen;
  std::vector<Sieve> out;
  std::vector<std::vector<int>> frontier;
  std::vector<int> start = {c.id_mor[static_cast<size_t>(obj)]};
  seen.insert(start);
  frontier.push_back(start);
  out.push_back(sieve_generated(c, obj, start));
  sieves_seen.insert(out.back().mem);
  bool closed = true;
  for (int step = 0; step < depth; ++step) {
    std::vector<std::vector<int>> next;
    for (const auto& fam : frontier)
      for (size_t i = 0; i < fam.size(); ++i) {
        int m = fam[i];  // m: Y -> obj, replace by {m∘f, m∘g} for squares based at Y
        for (const auto& q : p.squares) {
          // squares based at Y up to isomorphism: move the square along an iso base' -> Y
          for (int iso : c.isos_between(q.S, c.src(m))) {
            std::vector<int> nf;
            for (size_t j = 0; j < fam.size(); ++j)
              if (j != i) nf.push_back(fam[j]);
            nf.push_back(c.compose(m, c.compose(iso, q.f)));
            nf.push_back(c.compose(m, c.compose(iso, q.g)));
            std::sort(nf.begin(), nf.end());
            nf.erase(std::unique(nf.begin(), nf.end()), nf.end());
            if (seen.insert(nf).second) next.push_back(nf);
          }
        }
      }
    for (const auto& fam : next) {
      Sieve s = sieve_generated(c, obj, fam);
      if (sieves_seen.insert(s.mem).second) out.push_back(s);
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  closed = frontier.empty();
  if (saturated) *saturated = closed;
  return out;
}

SimpleCoverVerdict is_simple_cover(const FinCategory& c, const std::vector<int>& family,
                                   const EcdStructure& p, int depth) {
  SimpleCoverVerdict v;
  if (family.empty()) return v;
  int base = c.tgt(family.front());
  Sieve target = sieve_generated(c, base, family);
  bool saturated = false;
  for (const auto& s : simple_cover_sieves(c, p, base, depth, &saturated))
    if (s.subset_of(target)) {
      v.is_simple = true;
      return v;
    }
  v.bound_reached = !saturated;
  return v;
}

int default_simple_cover_depth(const FinCategory& c) { return 2 * c.n_obj(); }

}  // namespace ecdsheaf
