#ifndef ECDSHEAF_QPRESHEAF_HPP
#define ECDSHEAF_QPRESHEAF_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ecdsheaf/ecd_types.hpp"
#include "ecdsheaf/linalg.hpp"
#include "ecdsheaf/sieves.hpp"

namespace ecdsheaf {

/// Presheaf of finite-dimensional Q-vector spaces. Restriction along
/// f: X -> Y is a dim(X) x dim(Y) matrix acting on column vectors of F(Y).
struct QPresheaf {
  const FinCategory* cat = nullptr;
  std::vector<Eigen::Index> dim;
  std::vector<Mat> restr;

  Eigen::Index d(int obj) const { return dim[static_cast<size_t>(obj)]; }
  const Mat& r(int mor) const { return restr[static_cast<size_t>(mor)]; }
  std::optional<std::string> check_functorial() const;
  Eigen::Index total_dim() const;
  bool is_zero() const { return total_dim() == 0; }

  static QPresheaf zero(const FinCategory& c);
};

using QPresheafPtr = std::shared_ptr<const QPresheaf>;
inline QPresheafPtr share(QPresheaf f) { return std::make_shared<const QPresheaf>(std::move(f)); }
/// Cached zero presheaf of a category (hot path in complex accessors).
QPresheafPtr zero_presheaf_ptr(const FinCategory& c);

struct LinearMap {
  QPresheafPtr src, tgt;
  std::vector<Mat> comp;  // per object: dim tgt(x) x dim src(x)

  const Mat& at(int obj) const { return comp[static_cast<size_t>(obj)]; }
  std::optional<std::string> check_natural() const;
  static LinearMap zero(QPresheafPtr s, QPresheafPtr t);
  static LinearMap identity(QPresheafPtr s);
};

LinearMap compose(const LinearMap& g, const LinearMap& f);  // g∘f
LinearMap add(const LinearMap& a, const LinearMap& b);
LinearMap negate(const LinearMap& a);

/// Lambda(S): U |-> Q[Hom(U,S)].
QPresheaf free_linear(const FinCategory& c, int s);
/// Postcomposition map Lambda(A) -> Lambda(B) induced by h: A -> B.
LinearMap free_linear_map(const FinCategory& c, int h);

struct SumResult {
  QPresheafPtr sum;
  std::vector<LinearMap> in;   // injections
  std::vector<LinearMap> out;  // projections
};
SumResult direct_sum(const std::vector<QPresheafPtr>& parts);

/// Subpresheaf spanned by given vectors, closed under restriction.
struct SubPresheaf {
  QPresheafPtr sub;
  LinearMap incl;
  std::vector<Mat> basis;  // per object, columns in ambient coordinates
};
SubPresheaf span_subpresheaf(QPresheafPtr ambient, const std::vector<Mat>& generators);

struct QuotientResult {
  QPresheafPtr quot;
  LinearMap proj;
};
QuotientResult quotient_by(QPresheafPtr ambient, const std::vector<Mat>& sub_basis);

SubPresheaf kernel_presheaf(const LinearMap& f);
SubPresheaf image_presheaf(const LinearMap& f);

/// Linear matching families over the minimal cover of each object.
struct LinearPlusInternal;
struct LinearPlusResult {
  QPresheafPtr out;
  LinearMap unit;
  std::shared_ptr<const LinearPlusInternal> data;  // carried matching data
};
LinearPlusResult plus_linear(const QPresheaf& f, const Topology& t);
LinearPlusResult sheafify_linear(const QPresheaf& f, const Topology& t);

/// Dimension of the space of matching families of f over r.
Eigen::Index linear_matching_dim(const QPresheaf& f, const Sieve& r);
/// Does f satisfy the linear sheaf condition for every covering sieve?
bool is_linear_sheaf(const QPresheaf& f, const Topology& t);

/// a(phi) between given sheafifications.
LinearMap sheafify_linear_map(const LinearMap& phi, const LinearPlusResult& shf,
                              const LinearPlusResult& shg, const Topology& t);
/// Factor psi: F -> G (G a sheaf) through the sheafification of F.
LinearMap descend_linear(const LinearMap& psi, const LinearPlusResult& shsrc, const Topology& t);

/// Finite-dimensional representation of a finite group.
struct GModule {
  std::shared_ptr<const FinGroup> group;
  Eigen::Index dim = 0;
  std::vector<Mat> act;  // per element, invertible dim x dim

  std::optional<std::string> check_representation() const;
};

struct FixedPoints {
  Mat projector;  // the averaging projector
  Mat basis;      // columns spanning the fixed subspace
};
/// Averaging projector (1/|G|) sum sigma_g; verified idempotent and G-fixed.
FixedPoints fixed_points(const GModule& m);

struct LinearQuotientResult {
  QPresheaf invariants;    // presheaf of averaging-projector images of Lambda(S)
  LinearPlusResult sheaf;  // its sheafification = Lambda_t(S)_G
  LinearPlusResult free_sheaf;  // Lambda_t(S)
  LinearMap epi;           // Lambda_t(S) -> Lambda_t(S)_G
};
LinearQuotientResult linear_group_quotient(const FinCategory& c, int s, const GroupAction& a,
                                           const Topology& t);

/// ker(unit: M -> aM) objectwise, with its inclusion.
SubPresheaf torsion_part(const QPresheaf& m, const Topology& t);
/// True if sheafification kills m.
bool is_torsion(const QPresheaf& m, const Topology& t);

/// The short exact sheaf sequence of a square:
/// 0 -> L_t(X')_G -> L_t(X)_G (+) L_t(S') -> L_t(S) -> 0
/// with maps x |-> (g'x, f'x) and (a,b) |-> fa - gb.
struct MvRecord {
  LinearMap first, second;
  bool exact = false;
  std::string witness;      // failing object / stage when not exact
  std::string convention = "first=(gp_*,fp_*), second=f_*-g_*";
};
MvRecord mv_sequence(const FinCategory& c, const EquivariantSquare& q, const Topology& t);

/// Basis of the space of natural maps a -> b.
std::vector<LinearMap> hom_space(QPresheafPtr a, QPresheafPtr b);

}  // namespace ecdsheaf

#endif
