#ifndef ECDSHEAF_SET_PRESHEAF_HPP
#define ECDSHEAF_SET_PRESHEAF_HPP

#include <optional>
#include <string>
#include <vector>

#include "ecdsheaf/ecd_types.hpp"
#include "ecdsheaf/sieves.hpp"

namespace ecdsheaf {

/// Presheaf of finite sets; elements are opaque tokens.
struct SetPresheaf {
  const FinCategory* cat = nullptr;
  std::vector<std::vector<std::string>> at;  // tokens per object
  std::vector<std::vector<int>> restr;       // per mor f: X->Y, size |at(Y)| -> index into at(X)

  int size(int obj) const { return static_cast<int>(at[static_cast<size_t>(obj)].size()); }
  int apply(int mor, int elem) const { return restr[static_cast<size_t>(mor)][static_cast<size_t>(elem)]; }
  std::optional<std::string> check_functorial() const;  // nullopt when functorial
};

struct SetMap {
  SetPresheaf src, tgt;
  std::vector<std::vector<int>> comp;  // per object: |src.at| -> index in tgt.at

  std::optional<std::string> check_natural() const;
};

SetPresheaf representable(const FinCategory& c, int s);
/// Map of representables induced by h: A -> B (postcomposition).
SetMap representable_map(const FinCategory& c, int h);

/// One plus construction: equivalence classes of matching families.
struct PlusResult {
  SetPresheaf out;
  SetMap unit;
};
PlusResult plus_construction(const SetPresheaf& f, const Topology& t);

/// Sheafification (plus twice); the result is verified against the sheaf
/// condition for every covering sieve.
PlusResult sheafify_set(const SetPresheaf& f, const Topology& t);

/// Does f satisfy the sheaf condition for every covering sieve of t?
bool is_sheaf(const SetPresheaf& f, const Topology& t);

/// Functorial action of sheafification on a map (between given sheafifications).
SetMap sheafify_set_map(const SetMap& phi, const PlusResult& shf, const PlusResult& shg,
                        const Topology& t);

/// Factor a presheaf map into a sheaf through the sheafification of its source.
SetMap descend_to_sheafification(const SetMap& psi, const PlusResult& shsrc, const Topology& t);

/// Orbit quotient of the representable of S under a group action, sheafified;
/// also returns the induced epimorphism from the sheafified representable.
struct QuotientSheafResult {
  SetPresheaf quotient_presheaf;  // pre-sheafification orbit presheaf
  SetMap quotient_unit;           // rho(S) -> orbit presheaf
  SetPresheaf sheaf;              // sheafified quotient
  SetMap epi;                     // rho_t(S) -> rho_t(S)_G
  PlusResult rho_t;               // sheafification of rho(S)
  PlusResult sheafified;          // sheafification of the orbit presheaf
};
QuotientSheafResult group_quotient_sheaf(const FinCategory& c, int s, const GroupAction& a,
                                         const Topology& t);

/// Local surjectivity of a map of t-sheaves (throws NotASheaf otherwise).
bool is_epi(const SetMap& phi, const Topology& t);

SetPresheaf fiber_product(const SetMap& phi, const SetMap& psi, SetMap* pr1 = nullptr,
                          SetMap* pr2 = nullptr);
SetPresheaf disjoint_union(const SetPresheaf& a, const SetPresheaf& b, SetMap* in1 = nullptr,
                           SetMap* in2 = nullptr);
SetPresheaf pushout(const SetMap& phi, const SetMap& psi, SetMap* from_tgt1 = nullptr,
                    SetMap* from_tgt2 = nullptr);

/// Natural bijection search.
bool set_presheaves_isomorphic(const SetPresheaf& a, const SetPresheaf& b);

/// Fixed-point elements of F(X) under an action on X (via F(sigma_g)).
std::vector<int> fixed_elements(const SetPresheaf& f, const GroupAction& a);

/// The comparison map of a square: both sides built from sheafified
/// representables; preconditions: the square is Cartesian and g is mono.
struct RegularityMapResult {
  SetPresheaf lhs, rhs;
  SetMap comparison;
};
RegularityMapResult regularity_map(const FinCategory& c, const EquivariantSquare& q,
                                   const Topology& t);

/// F(S) -> F(S') x_{F(X')^G} F(X)^G is a bijection (F a t-sheaf).
bool cartesian_sets_check(const SetPresheaf& f, const EquivariantSquare& q, const Topology& t);

/// The square of quotient sheaves is a pushout square.
bool cocartesian_check(const FinCategory& c, const EquivariantSquare& q, const Topology& t);

}  // namespace ecdsheaf

#endif
