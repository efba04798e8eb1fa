#ifndef ECDSHEAF_ECD_CHECKERS_HPP
#define ECDSHEAF_ECD_CHECKERS_HPP

#include <optional>
#include <string>
#include <vector>

#include "ecdsheaf/ecd_types.hpp"
#include "ecdsheaf/set_presheaf.hpp"
#include "ecdsheaf/sieves.hpp"

namespace ecdsheaf {

/// The derived trivial-group structure: for each square, the comparison square
/// between the group product G x X (a |G|-fold coproduct) and the fibered
/// products X x_S X, X' x_S' X'.
struct DerivePrimeResult {
  EcdStructure prime;
  EcdStructure with_original;  // P united with the derived squares
};
DerivePrimeResult derive_prime(const FinCategory& c, const EcdStructure& p);

enum class CompleteStatus { CompleteSufficient, CompleteDirect, Inconclusive, Incomplete };

struct CompleteVerdict {
  CompleteStatus status = CompleteStatus::Inconclusive;
  bool sufficient_route = false;  // isomorphisms-into-initial + base-change closure
  bool direct_route = false;      // every cover contains a simple-cover sieve
  std::string witness;

  bool passed() const {
    return status == CompleteStatus::CompleteSufficient || status == CompleteStatus::CompleteDirect;
  }
};

/// Base-change reading for the sufficient completeness route: along morphisms
/// into the square's base (default) or into its upper-right corner (the
/// literal text); both are exposed, neither endorsed.
enum class BaseChangeReading { IntoBase, IntoUpperRight };

CompleteVerdict check_complete(const FinCategory& c, const EcdStructure& p,
                               const Topology& t,
                               BaseChangeReading reading = BaseChangeReading::IntoBase);

struct RegularSquareVerdict {
  std::string square;
  bool cartesian = false;
  bool mono = false;
  bool comparison_epi = false;   // the sheaf comparison map is an epimorphism
  bool cover_route = false;      // the pullback-family cover certificate
  bool cover_route_available = false;
  bool regular = false;
  std::string detail;
};

struct RegularVerdict {
  std::vector<RegularSquareVerdict> squares;
  bool all_regular = true;
};
RegularVerdict check_regular(const FinCategory& c, const EcdStructure& p, const Topology& t);

/// Quantifier level for the upper-left corner of the reducing-square search:
/// SameLevel takes all corners at level i+1; LowerLevel uses level i for the
/// upper-left corner (strictly stronger, and unsatisfiable for single-square
/// structures with a non-initial upper-left corner).
enum class ReducingCorner { SameLevel, LowerLevel };

struct ReducingVerdict {
  bool reducing = true;
  std::string witness;  // first failing triple
};
ReducingVerdict is_reducing(const FinCategory& c, const EquivariantSquare& q,
                            const DensityStructure& d, const EcdStructure& p,
                            ReducingCorner corner = ReducingCorner::SameLevel);

struct BoundedVerdict {
  bool bounded = true;
  std::string witness;
};
BoundedVerdict check_bounded(const FinCategory& c, const EcdStructure& p,
                             const DensityStructure& d,
                             ReducingCorner corner = ReducingCorner::SameLevel);

/// Base change of a square along y: Y -> S when every corner pullback exists.
std::optional<EquivariantSquare> base_change_along(const FinCategory& c,
                                                   const EquivariantSquare& q, int y);
/// All base changes of a square that exist in the site.
std::vector<EquivariantSquare> base_change_squares(const FinCategory& c,
                                                   const EquivariantSquare& q);

}  // namespace ecdsheaf

#endif
