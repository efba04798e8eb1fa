#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "ecdsheaf/io.hpp"
#include "ecdsheaf/random_gen.hpp"
#include "ecdsheaf/zoo.hpp"

using namespace ecdsheaf;

TEST_CASE("fixtures validate and reproduce their expected verdict tables") {
  for (auto name : fixture_names()) {
    Fixture fx = build_fixture(name);
    INFO(name);
    CHECK(check_topology_axioms(fx.t()).ok);
    CHECK(validate_density(fx.c(), fx.density).empty());
    auto hyp = check_hypotheses(fx.c(), fx.ecd, fx.density, fx.t());
    CHECK(hyp.complete.passed() == fx.expected.complete);
    CHECK(hyp.regular.all_regular == fx.expected.regular);
    CHECK(hyp.bounded.bounded == fx.expected.bounded);
  }
  CHECK_THROWS_WITH_AS(build_fixture("NOPE"), doctest::Contains("UnknownFixture"), EngineError);
}

TEST_CASE("the additive fixture splits the base sheaf") {
  Fixture add2 = build_fixture("ADD2");
  const FinCategory& c = add2.c();
  auto s = sheafify_linear(free_linear(c, c.obj("AB")), add2.t());
  auto a = sheafify_linear(free_linear(c, c.obj("A")), add2.t());
  auto b = sheafify_linear(free_linear(c, c.obj("B")), add2.t());
  for (int x = 0; x < c.n_obj(); ++x)
    CHECK(s.out->d(x) == a.out->d(x) + b.out->d(x));
}

TEST_CASE("site files round-trip byte-identically") {
  namespace fs = std::filesystem;
  for (auto name : {"Z3", "GS+", "PRODUCT(Z3,GS+)"}) {
    Fixture fx = build_fixture(name);
    std::string first = dump_canonical(site_to_json(fx.c()));
    FinCategory reparsed = validate_category_or_throw(site_from_json(Json::parse(first)));
    std::string second = dump_canonical(site_to_json(reparsed));
    CHECK(first == second);
    // ecd and density round-trips against the reparsed category
    std::string e1 = dump_canonical(ecd_to_json(fx.c(), fx.ecd));
    EcdStructure p2 = ecd_from_json(reparsed, Json::parse(e1));
    CHECK(dump_canonical(ecd_to_json(reparsed, p2)) == e1);
    std::string d1 = dump_canonical(density_to_json(fx.c(), fx.density));
    DensityStructure dd = density_from_json(reparsed, Json::parse(d1));
    CHECK(dump_canonical(density_to_json(reparsed, dd)) == d1);
  }
}

TEST_CASE("presheaf and complex files round-trip") {
  Fixture z3 = build_fixture("Z3");
  const FinCategory& c = z3.c();
  Rng rng(101);
  SUBCASE("set presheaves") {
    SetPresheaf f = random_set_presheaf(c, rng);
    std::string s1 = dump_canonical(set_presheaf_to_json(f));
    SetPresheaf g = set_presheaf_from_json(c, Json::parse(s1));
    CHECK(dump_canonical(set_presheaf_to_json(g)) == s1);
  }
  SUBCASE("linear presheaves keep exact rational entries") {
    QPresheaf f = random_qpresheaf(c, rng);
    std::string s1 = dump_canonical(qpresheaf_to_json(f));
    QPresheaf g = qpresheaf_from_json(c, Json::parse(s1));
    CHECK(dump_canonical(qpresheaf_to_json(g)) == s1);
    CHECK(rat_parse("-3/7") == rat(-3, 7));
    CHECK(rat_print(rat(4, 2)) == "2");
  }
  SUBCASE("complexes") {
    PresheafComplex k = random_complex(c, rng, 2, 3);
    std::string s1 = dump_canonical(complex_to_json(k));
    PresheafComplex g = complex_from_json(c, Json::parse(s1));
    CHECK(dump_canonical(complex_to_json(g)) == s1);
  }
  SUBCASE("malformed input raises ParseError") {
    CHECK_THROWS_WITH_AS(qpresheaf_from_json(c, Json::parse("{\"dim\": {}}")),
                         doctest::Contains("ParseError"), EngineError);
  }
}

TEST_CASE("emitted golden files re-validate byte-identically") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "ecdsheaf_golden_test";
  fs::remove_all(dir);
  Fixture fx = build_fixture("Z3");
  emit_fixture(fx, dir.string());
  std::string site = read_file((dir / "site.json").string());
  FinCategory c2 = validate_category_or_throw(site_from_json(Json::parse(site)));
  CHECK(dump_canonical(site_to_json(c2)) == site);
  std::string ecd = read_file((dir / "ecd.json").string());
  EcdStructure p2 = ecd_from_json(c2, Json::parse(ecd));
  CHECK(dump_canonical(ecd_to_json(c2, p2)) == ecd);
  fs::remove_all(dir);
}

#ifdef ECDSHEAF_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(ECDSHEAF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("command-line round trips and exit codes") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "ecdsheaf_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string d = dir.string();
  SUBCASE("emitted fixtures pass the checkers end to end") {
    CHECK(run_cli("fixture Z3 --emit --dir " + d) == 0);
    CHECK(run_cli("check-ecd --site " + d + "/site.json --ecd " + d + "/ecd.json --density " + d +
                  "/density.json") == 0);
    CHECK(run_cli("topology --site " + d + "/site.json --ecd " + d + "/ecd.json") == 0);
  }
  SUBCASE("cohomology of the glued free sheaf") {
    CHECK(run_cli("fixture Z3 --emit --dir " + d) == 0);
    Fixture fx = build_fixture("Z3");
    write_file(d + "/lam.json",
               dump_canonical(qpresheaf_to_json(free_linear(fx.c(), fx.c().obj("S")))));
    CHECK(run_cli("cohomology --site " + d + "/site.json --ecd " + d +
                  "/ecd.json --linear " + d + "/lam.json --object S --max-degree 3") == 0);
  }
  SUBCASE("a failing descent check exits with the mathematical-failure code") {
    CHECK(run_cli("fixture Z3 --emit --dir " + d) == 0);
    Fixture fx = build_fixture("Z3");
    write_file(d + "/bad.json",
               dump_canonical(complex_to_json(
                   PresheafComplex::single(share(free_linear(fx.c(), fx.c().obj("U"))), 0))));
    CHECK(run_cli("check-descent --theorem 2.3 --site " + d + "/site.json --ecd " + d +
                  "/ecd.json --density " + d + "/density.json --complex " + d + "/bad.json") == 1);
  }
  SUBCASE("an insufficient verified range exits as inconclusive") {
    CHECK(run_cli("fixture Z3 --emit --dir " + d) == 0);
    Fixture fx = build_fixture("Z3");
    auto lam = sheafify_linear(free_linear(fx.c(), fx.c().obj("S")), fx.t());
    write_file(d + "/good.json",
               dump_canonical(complex_to_json(PresheafComplex::single(lam.out, 0))));
    CHECK(run_cli("check-descent --theorem 2.3 --max-degree 0 --site " + d + "/site.json --ecd " +
                  d + "/ecd.json --density " + d + "/density.json --complex " + d +
                  "/good.json") == 3);
  }
  SUBCASE("missing files and malformed json exit with the input-error code") {
    CHECK(run_cli("check-ecd --site /nonexistent.json --ecd /nonexistent.json") == 2);
    write_file(d + "/junk.json", "{not json");
    CHECK(run_cli("check-ecd --site " + d + "/junk.json --ecd " + d + "/junk.json") == 2);
  }
  fs::remove_all(dir);
}
#endif
