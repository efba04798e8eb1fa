#ifndef ECDSHEAF_ZOO_HPP
#define ECDSHEAF_ZOO_HPP

#include <memory>
#include <string>
#include <vector>

#include "ecdsheaf/complexes.hpp"
#include "ecdsheaf/ecd_types.hpp"
#include "ecdsheaf/qpresheaf.hpp"
#include "ecdsheaf/sieves.hpp"

namespace ecdsheaf {

/// A canonical finite test site with its distinguished squares, density
/// structure, generated topology and expected checker verdicts.
struct Fixture {
  std::string name;
  std::shared_ptr<const FinCategory> cat;
  EcdStructure ecd;
  DensityStructure density;
  std::shared_ptr<const Topology> topology;

  struct Expected {
    bool complete = false;
    bool regular = false;
    bool bounded = false;
    bool regular_via_cover_route = false;  // pullback-family cover certificate
  } expected;

  const FinCategory& c() const { return *cat; }
  const Topology& t() const { return *topology; }

  /// Named linear presheaves exercising the engine (free and sheafified ones).
  std::vector<std::pair<std::string, QPresheafPtr>> sample_presheaves() const;
  /// Small complexes used by the descent checks.
  std::vector<std::pair<std::string, PresheafComplex>> sample_complexes() const;
};

std::vector<std::string> fixture_names();
Fixture build_fixture(const std::string& name);  // throws UnknownFixture

/// Helper for poset-shaped sites: objects plus a reflexive-transitive order.
FinCategory make_poset(const std::vector<std::string>& objects,
                       const std::vector<std::pair<std::string, std::string>>& covers_rel,
                       const std::string& initial);

}  // namespace ecdsheaf

#endif
