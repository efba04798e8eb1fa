#ifndef ECDSHEAF_DESCENT_HPP
#define ECDSHEAF_DESCENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "ecdsheaf/ecd_checkers.hpp"
#include "ecdsheaf/homological.hpp"

namespace ecdsheaf {

/// Acyclicity of the three-term totalization
///   K(S) -> K(S') (+) K(X)^G -> K(X')^G
/// (fixed points degreewise through the averaging projector).
bool homotopy_cartesian_square(const PresheafComplex& k, const EquivariantSquare& q,
                               int* witness_degree = nullptr);

/// Descent condition of the degenerate generating cover (the empty sieve on
/// the initial object): sections there must be acyclic. The generated
/// topology contains this cover alongside the square families, so the
/// square-wise table carries it as an extra row.
bool initial_cover_acyclic(const PresheafComplex& k, int* witness_degree = nullptr);

struct DescentVerdict {
  std::vector<std::pair<std::string, bool>> square_table;  // per square (incl. base changes in P)
  bool all_squares = true;
  LocalVerdict locality;
  std::optional<bool> agreement;  // set only when both sides are definitive
  bool conditional = false;       // hypothesis checkers not all conclusive
};

struct HypothesisReport {
  CompleteVerdict complete;
  RegularVerdict regular;
  BoundedVerdict bounded;
  bool all_pass() const {
    return complete.passed() && regular.all_regular && bounded.bounded;
  }
};
HypothesisReport check_hypotheses(const FinCategory& c, const EcdStructure& p,
                                  const DensityStructure& d, const Topology& t);

/// Square-wise locality equivalence: every distinguished square (including
/// base changes that are members of the structure) is homotopy Cartesian iff
/// the complex is t-local in the verified range.
DescentVerdict check_square_locality_equivalence(const FinCategory& c, const EcdStructure& p,
                                                 const DensityStructure& d, const Topology& t,
                                                 const PresheafComplex& k);

struct VanishingReport {
  bool hypotheses_pass = false;
  bool conditional = false;
  bool ok = true;  // every object vanishes strictly above its density dimension
  struct Row {
    int object;
    int dim;
    std::vector<Eigen::Index> dims;  // H^0 .. H^{dim+2}
  };
  std::vector<Row> table;
  std::string witness;
};

/// Cohomology vanishing above the density dimension, per object.
VanishingReport check_vanishing(const FinCategory& c, const EcdStructure& p,
                                const DensityStructure& d, const Topology& t,
                                const QPresheaf& f);

struct UnionPrimeReport {
  bool side_squares = true;   // derived squares homotopy Cartesian
  LocalVerdict base_local;    // t_P-locality
  LocalVerdict union_local;   // t_{P∪P'}-locality
  bool side_i = false;        // base_local && side_squares
  bool side_ii = false;
  bool agree = false;
};

/// Equivalence between locality for the base structure plus homotopy
/// Cartesianness of the derived trivial-group squares, and locality for the
/// union structure.
UnionPrimeReport check_union_prime_equivalence(const FinCategory& c, const EcdStructure& p,
                                               const DensityStructure& d, const Topology& t,
                                               const PresheafComplex& k);

}  // namespace ecdsheaf

#endif
