#ifndef ECDSHEAF_ECD_TYPES_HPP
#define ECDSHEAF_ECD_TYPES_HPP

#include <optional>
#include <string>
#include <vector>

#include "ecdsheaf/fincat.hpp"

namespace ecdsheaf {

/// A commutative square
///     X' --gp--> X
///     |fp        |f
///     S' --g---> S
/// with compatible actions of one group on X over S and on X' over S',
/// gp equivariant (gp∘sigma'_h = sigma_h∘gp).
struct EquivariantSquare {
  std::string name;
  int Xp = -1, X = -1, Sp = -1, S = -1;
  int gp = -1, fp = -1, g = -1, f = -1;
  GroupAction act_X, act_Xp;

  /// The generating cover family {f, g} of the square's base.
  std::vector<int> cover_family() const { return {f, g}; }
};

std::vector<Violation> validate_square(const FinCategory& c, const EquivariantSquare& q);

/// All isomorphisms between two finite groups (exhaustive; small orders).
std::vector<std::vector<int>> group_isomorphisms(const FinGroup& a, const FinGroup& b);

/// Equivariant isomorphism of squares: a group isomorphism plus four object
/// isomorphisms commuting with the edges and intertwining the actions.
bool squares_isomorphic(const FinCategory& c, const EquivariantSquare& a,
                        const EquivariantSquare& b);

/// A collection of equivariant distinguished squares. Membership is closed
/// under equivariant square isomorphism (tested, never materialized).
struct EcdStructure {
  std::vector<EquivariantSquare> squares;

  bool member(const FinCategory& c, const EquivariantSquare& q) const;
};

/// Validate all squares and drop duplicates up to equivariant isomorphism.
EcdStructure validate_ecd(const FinCategory& c, const std::vector<EquivariantSquare>& squares);

EcdStructure union_ecd(const FinCategory& c, const EcdStructure& p1, const EcdStructure& p2);

/// Per-object descending families of incoming morphisms; the level lists
/// stabilize at the last entry.
struct DensityStructure {
  std::vector<std::vector<std::vector<int>>> levels;  // [object][level] -> sorted morphisms

  const std::vector<int>& level(int obj, int i) const;
  int n_levels(int obj) const { return static_cast<int>(levels[static_cast<size_t>(obj)].size()); }
};

std::vector<Violation> validate_density(const FinCategory& c, const DensityStructure& d);

/// Least level containing only isomorphisms; throws InfiniteDimension if the
/// stabilized family still contains a non-isomorphism.
int dim_d(const FinCategory& c, const DensityStructure& d, int obj);
int max_dim_d(const FinCategory& c, const DensityStructure& d);

/// Two-level density structure: level 0 all incoming morphisms, level 1 isos.
DensityStructure default_density(const FinCategory& c);

/// Slice category S/obj together with transport of squares and densities.
struct SliceResult {
  FinCategory cat;
  std::vector<int> obj_over;   // slice object -> morphism a: A -> S in the base
  std::vector<int> mor_under;  // slice morphism -> underlying base morphism
  EcdStructure ecd;
  DensityStructure density;
};

SliceResult localize_ecd(const FinCategory& c, const EcdStructure& p, const DensityStructure& d,
                         int s);

}  // namespace ecdsheaf

#endif
