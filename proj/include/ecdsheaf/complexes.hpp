#ifndef ECDSHEAF_COMPLEXES_HPP
#define ECDSHEAF_COMPLEXES_HPP

#include <map>

#include "ecdsheaf/qpresheaf.hpp"

namespace ecdsheaf {

/// Bounded cochain complex of Q-linear presheaves, degrees lo..hi.
struct PresheafComplex {
  const FinCategory* cat = nullptr;
  int lo = 0, hi = -1;  // empty when hi < lo
  std::vector<QPresheafPtr> terms;  // terms[i] is degree lo+i
  std::vector<LinearMap> diffs;     // diffs[i]: terms[i] -> terms[i+1]

  bool empty() const { return hi < lo; }
  QPresheafPtr term(int deg) const;
  /// Differential out of `deg` (a zero map when out of range).
  LinearMap diff(int deg) const;
  std::optional<std::string> check_complex() const;

  static PresheafComplex single(QPresheafPtr f, int degree);
  static PresheafComplex zero_complex(const FinCategory& c);
};

struct ComplexMap {
  PresheafComplex src, tgt;
  std::map<int, LinearMap> comps;  // missing degrees are zero maps

  LinearMap at(int deg) const;
  std::optional<std::string> check_chain_map() const;
};

/// Sections of the complex at an object: matrices of the differentials.
struct SectionComplex {
  int lo = 0, hi = -1;
  std::vector<Eigen::Index> dims;  // per degree lo..hi
  std::vector<Mat> d;              // d[i]: dims[i] -> dims[i+1]

  Eigen::Index dim(int deg) const;
  Mat dmat(int deg) const;  // zero-extended outside the range
  Eigen::Index homology_dim(int deg) const;
};
SectionComplex sections_at(const PresheafComplex& k, int obj);

/// Homology dimensions at an object for all degrees with possible homology.
std::map<int, Eigen::Index> homology_dims(const PresheafComplex& k, int obj);

/// Does the chain map induce isomorphisms on homology at `obj` for all
/// degrees in [lo_deg, hi_deg]?
bool induces_homology_iso(const ComplexMap& u, int obj, int lo_deg, int hi_deg,
                          int* fail_degree = nullptr);

/// Levelwise sheafification with its unit chain map.
struct ComplexPlusResult {
  PresheafComplex out;
  ComplexMap unit;
};
ComplexPlusResult sheafify_complex(const PresheafComplex& k, const Topology& t);

/// Degreewise fixed points of a complex valued at the carrier of an action:
/// the subcomplex of sections complexes (matrices restricted to fixed bases).
SectionComplex fixed_sections(const PresheafComplex& k, const GroupAction& a);

/// Direct sum of two section complexes.
SectionComplex section_sum(const SectionComplex& a, const SectionComplex& b);

/// Total complex of a two-step map sequence A -> B -> C of section complexes
/// (aux degrees 0,1,2); acyclic iff the square-type diagram is homotopy
/// Cartesian.
struct ThreeTermTotal {
  SectionComplex total;
  bool acyclic = true;
  int witness_degree = 0;
};
ThreeTermTotal three_term_total(const SectionComplex& a, const SectionComplex& b,
                                const SectionComplex& c, const std::vector<Mat>& alpha,
                                const std::vector<Mat>& beta, int lo_deg);

}  // namespace ecdsheaf

#endif
