#ifndef ECDSHEAF_RATIONAL_HPP
#define ECDSHEAF_RATIONAL_HPP

#include <gmpxx.h>

#include <Eigen/Core>
#include <string>

namespace Eigen {

// Exact rational scalar for dense types (GMP mpq_class).
template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 120,
    MulCost = 120
  };
};

}  // namespace Eigen

namespace ecdsheaf {

using Rat = mpq_class;

/// Canonicalized rational from an integer pair.
inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

/// Parse "p" or "p/q" (canonicalizes; throws std::invalid_argument on junk).
Rat rat_parse(const std::string& s);

/// Canonical textual form: "p" or "p/q".
std::string rat_print(const Rat& x);

}  // namespace ecdsheaf

#endif
