#ifndef ECDSHEAF_IO_HPP
#define ECDSHEAF_IO_HPP

#include <string>

#include "ecdsheaf/complexes.hpp"
#include "ecdsheaf/descent.hpp"
#include "ecdsheaf/zoo.hpp"
#include "json.hpp"

namespace ecdsheaf {

using Json = nlohmann::ordered_json;

/// Canonical textual form used for every emitted file (diffable, byte-stable).
std::string dump_canonical(const Json& j);

Json site_to_json(const FinCategory& c);
RawCategory site_from_json(const Json& j);  // throws ParseError

Json group_to_json(const FinGroup& g);
FinGroup group_from_json(const Json& j);

Json ecd_to_json(const FinCategory& c, const EcdStructure& p);
EcdStructure ecd_from_json(const FinCategory& c, const Json& j);

Json density_to_json(const FinCategory& c, const DensityStructure& d);
DensityStructure density_from_json(const FinCategory& c, const Json& j);

/// Covering sieves per object as sorted morphism-id lists.
Json topology_dump(const Topology& t);

Json set_presheaf_to_json(const SetPresheaf& f);
SetPresheaf set_presheaf_from_json(const FinCategory& c, const Json& j);

Json qpresheaf_to_json(const QPresheaf& f);
QPresheaf qpresheaf_from_json(const FinCategory& c, const Json& j);

Json complex_to_json(const PresheafComplex& k);
PresheafComplex complex_from_json(const FinCategory& c, const Json& j);

/// Machine-readable verdict records.
Json report_to_json(const HypothesisReport& r, const FinCategory& c);
Json report_to_json(const DescentVerdict& v);
Json report_to_json(const VanishingReport& r, const FinCategory& c);
Json report_to_json(const UnionPrimeReport& r);
Json report_to_json(const CohomologyReport& r, const FinCategory& c);

/// Plain-text one-line-per-verdict renderings (same verdicts as the JSON).
std::string report_to_text(const HypothesisReport& r, const FinCategory& c);
std::string report_to_text(const DescentVerdict& v);
std::string report_to_text(const VanishingReport& r, const FinCategory& c);
std::string report_to_text(const UnionPrimeReport& r);
std::string report_to_text(const CohomologyReport& r, const FinCategory& c);

/// Golden files for a fixture: site/ecd/density/topology plus linear samples.
void emit_fixture(const Fixture& fx, const std::string& dir);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace ecdsheaf

#endif
