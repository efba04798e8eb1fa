#ifndef ECDSHEAF_RANDOM_GEN_HPP
#define ECDSHEAF_RANDOM_GEN_HPP

#include <random>

#include "ecdsheaf/complexes.hpp"
#include "ecdsheaf/qpresheaf.hpp"
#include "ecdsheaf/set_presheaf.hpp"

namespace ecdsheaf {

/// Deterministic generator (seeded mt19937_64; avoid std distributions, whose
/// output is not pinned across standard libraries).
class Rng {
 public:
  explicit Rng(unsigned long seed) : eng_(seed) {}
  unsigned long raw() { return eng_(); }
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(raw() % static_cast<unsigned long>(n)); }
  int in(int lo, int hi) { return lo + below(hi - lo + 1); }
  Rat small_rat(int span = 2) { return rat(in(-span, span)); }

 private:
  std::mt19937_64 eng_;
};

/// Disjoint unions of representables with random congruence collapses.
SetPresheaf random_set_presheaf(const FinCategory& c, Rng& rng, int max_pieces = 3,
                                int max_collapses = 2);

/// Quotients of finite sums of free linear presheaves by random subpresheaves.
QPresheaf random_qpresheaf(const FinCategory& c, Rng& rng, int max_pieces = 3,
                           int max_relations = 2, Eigen::Index dim_cap = 4);

/// Random sheaf: sheafified random presheaf.
QPresheafPtr random_linear_sheaf(const FinCategory& c, const Topology& t, Rng& rng,
                                 Eigen::Index dim_cap = 4);
SetPresheaf random_set_sheaf(const FinCategory& c, const Topology& t, Rng& rng);

/// Random bounded complex with natural differentials squaring to zero.
PresheafComplex random_complex(const FinCategory& c, Rng& rng, int max_len = 3,
                               Eigen::Index dim_cap = 4);

/// Random G-module: permutation action conjugated by a random change of basis.
GModule random_gmodule(const FinGroup& g, Rng& rng, Eigen::Index dim);

}  // namespace ecdsheaf

#endif
