#ifndef ECDSHEAF_FINCAT_HPP
#define ECDSHEAF_FINCAT_HPP

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace ecdsheaf {

/// Engine error with a stable code ("MissingPullback", "NotASheaf", ...).
struct EngineError : std::runtime_error {
  std::string code;
  EngineError(std::string c, const std::string& what)
      : std::runtime_error(c + ": " + what), code(std::move(c)) {}
};

struct Violation {
  std::string code;    // NotAssociative, NotInitial, MalformedComposition, ...
  std::string detail;  // witness description
};

/// Unvalidated category description (as parsed from a site file).
struct RawCategory {
  struct Mor {
    std::string id, src, tgt;
  };
  std::vector<std::string> objects;
  std::string initial;
  std::vector<Mor> morphisms;
  std::map<std::string, std::string> identities;               // object -> morphism id
  std::vector<std::array<std::string, 3>> compose;             // [g, f, g∘f]
};

/// A finite category with a designated initial object.
/// Objects and morphisms are referenced by dense indices internally;
/// external ids are opaque strings.
class FinCategory {
 public:
  struct Mor {
    std::string id;
    int src = -1, tgt = -1;
  };

  std::vector<std::string> objects;
  std::vector<Mor> mors;
  int initial = -1;
  std::vector<int> id_mor;                         // object -> identity morphism
  std::vector<std::vector<int>> comp;              // comp[g][f] = g∘f, -1 if not composable
  std::vector<std::vector<std::vector<int>>> hom;  // hom[x][y]
  std::vector<std::vector<int>> arrows_into;       // tgt-indexed, canonical (id-sorted) order
  std::unordered_map<std::string, int> obj_ix, mor_ix;

  int n_obj() const { return static_cast<int>(objects.size()); }
  int n_mor() const { return static_cast<int>(mors.size()); }
  int src(int m) const { return mors[static_cast<size_t>(m)].src; }
  int tgt(int m) const { return mors[static_cast<size_t>(m)].tgt; }
  const std::string& mor_id(int m) const { return mors[static_cast<size_t>(m)].id; }
  int compose(int g, int f) const;  // g∘f (g after f); throws if not composable
  bool composable(int g, int f) const { return src(g) == tgt(f); }
  int obj(const std::string& id) const;
  int mor(const std::string& id) const;
  /// Position of morphism m in arrows_into[tgt(m)].
  int into_pos(int m) const;

  bool is_iso(int m, int* inverse = nullptr) const;
  std::vector<int> isos_between(int x, int y) const;

  RawCategory to_raw() const;
};

using CategoryOrViolations = std::variant<FinCategory, std::vector<Violation>>;

/// Validate a raw description: totality and typing of composition,
/// associativity, identities, uniqueness of the map out of the initial object.
CategoryOrViolations validate_category(const RawCategory& raw);
/// Same but throws EngineError on the first violation class found.
FinCategory validate_category_or_throw(const RawCategory& raw);

bool is_mono(const FinCategory& c, int f);

/// A certified limit/colimit: the universal object with mediating witnesses.
struct ConeWitness {
  int from_obj;      // cone/cocone apex being mediated
  int leg1, leg2;    // its two legs (leg2 = -1 for coproduct witnesses)
  int mediator;
};

struct PullbackResult {
  int apex;
  int to_x, to_y;  // projections apex->X, apex->Y for the cospan X -f-> S <-g- Y
  std::vector<ConeWitness> mediators;
};

struct CoproductResult {
  int obj;
  std::vector<int> injections;
  std::vector<ConeWitness> mediators;
};

/// Pullback of f: X->S along g: Y->S, certified by exhaustive cone search.
std::optional<PullbackResult> pullback(const FinCategory& c, int f, int g);
/// Coproduct of a list of objects (empty list yields the initial object).
std::optional<CoproductResult> coproduct(const FinCategory& c, const std::vector<int>& objs);

struct FinGroup {
  std::vector<std::string> elems;
  std::vector<std::vector<int>> mul;  // mul[a][b] = a*b
  int unit = -1;
  std::vector<int> inv;

  int n() const { return static_cast<int>(elems.size()); }
  std::vector<Violation> validate() const;
  static FinGroup trivial();
  static FinGroup cyclic(int n);
  static FinGroup symmetric3();
};

/// Action of a finite group on an object X over a structural morphism X -> S:
/// every sigma_g is an automorphism of X with over ∘ sigma_g = over.
struct GroupAction {
  std::shared_ptr<const FinGroup> group;
  int carrier = -1;
  int over = -1;             // structural morphism carrier -> base
  std::vector<int> act;      // group element -> endomorphism of carrier
};

std::vector<Violation> validate_group_action(const FinCategory& c, const GroupAction& a);
GroupAction trivial_action(const FinCategory& c, int x, int over_mor);

}  // namespace ecdsheaf

#endif
