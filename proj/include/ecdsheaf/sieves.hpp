#ifndef ECDSHEAF_SIEVES_HPP
#define ECDSHEAF_SIEVES_HPP

#include <optional>
#include <string>
#include <vector>

#include "ecdsheaf/ecd_types.hpp"
#include "ecdsheaf/fincat.hpp"

namespace ecdsheaf {

/// A sieve on `base`: a precomposition-closed set of morphisms into `base`,
/// stored as membership flags over arrows_into[base].
struct Sieve {
  int base = -1;
  std::vector<char> mem;

  bool contains_pos(int pos) const { return mem[static_cast<size_t>(pos)] != 0; }
  bool operator==(const Sieve& o) const { return base == o.base && mem == o.mem; }
  bool subset_of(const Sieve& o) const;
  Sieve intersect(const Sieve& o) const;
  Sieve unite(const Sieve& o) const;
  int size() const;
};

bool sieve_contains(const FinCategory& c, const Sieve& r, int mor);
Sieve empty_sieve(const FinCategory& c, int base);
Sieve maximal_sieve(const FinCategory& c, int base);
/// Members as morphism indices in canonical (id-sorted) order.
std::vector<int> sieve_members(const FinCategory& c, const Sieve& r);
/// True if closed under precomposition.
bool sieve_closed(const FinCategory& c, const Sieve& r);

/// Smallest sieve containing the family (all targets must agree).
Sieve sieve_generated(const FinCategory& c, int base, const std::vector<int>& family);
/// {h into src(f) : f∘h in r}.
Sieve pullback_sieve(const FinCategory& c, const Sieve& r, int f);
/// A minimal generating family: members not factoring through earlier choices.
std::vector<int> generating_family(const FinCategory& c, const Sieve& r);

/// Every sieve on an object (union closure of principal sieves plus empty).
std::vector<Sieve> all_sieves(const FinCategory& c, int base);

class Topology {
 public:
  const FinCategory* cat = nullptr;
  std::vector<std::vector<Sieve>> covers;  // per object, sorted large-to-small

  bool covering(const Sieve& r) const;
  /// Intersection of all covering sieves (itself covering on a finite site).
  const Sieve& minimal_cover(int obj) const;
  void sort_covers();

 private:
  mutable std::vector<std::optional<Sieve>> rmin_cache_;
};

/// Least topology containing the trivial one (maximal sieves everywhere plus
/// the empty sieve on the initial object) and the square cover families of P,
/// computed by fixpoint saturation under pullback stability and local
/// character. `order_seed` permutes the work order (the fixpoint is unique).
Topology generate_topology(const FinCategory& c, const EcdStructure& p,
                           unsigned long order_seed = 0);
/// Same from explicit seed families (base object, family of morphisms).
Topology generate_topology_from_seeds(const FinCategory& c,
                                      const std::vector<std::pair<int, std::vector<int>>>& seeds,
                                      unsigned long order_seed = 0);
/// Join of two topologies on the same category (union of covers, saturated).
Topology join_topologies(const Topology& a, const Topology& b);

struct TopologyAxiomReport {
  bool ok = true;
  std::vector<Violation> violations;
};

/// Independent full axiom check: maximality, pullback stability, local
/// character over the whole sieve lattice, the empty sieve on the initial
/// object, and precomposition closure of every listed sieve.
TopologyAxiomReport check_topology_axioms(const Topology& t);

/// All covering sieves of an object, largest first.
std::vector<Sieve> covering_sieves(const Topology& t, int obj);

/// Sieves generated by iterated square covers starting from {id}, up to
/// `depth` replacement steps; `saturated` reports whether the search closed.
std::vector<Sieve> simple_cover_sieves(const FinCategory& c, const EcdStructure& p, int obj,
                                       int depth, bool* saturated = nullptr);

struct SimpleCoverVerdict {
  bool is_simple = false;
  bool bound_reached = false;  // inconclusive marker
};

/// True iff the family's sieve contains the sieve of some cover built from at
/// most `depth` iterations of square covers of P at the common target.
SimpleCoverVerdict is_simple_cover(const FinCategory& c, const std::vector<int>& family,
                                   const EcdStructure& p, int depth);

int default_simple_cover_depth(const FinCategory& c);

}  // namespace ecdsheaf

#endif
