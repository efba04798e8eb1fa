// Batch front door: load site/ecd/density/presheaf descriptions, run the
// checkers, emit reports.
//
// Exit codes: 0 all checks pass; 1 a mathematical check failed (witness in
// the report); 2 input error; 3 inconclusive (a bound was reached).

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "ecdsheaf/io.hpp"

using namespace ecdsheaf;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitMathFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitInconclusive = 3;

struct Inputs {
  std::string site, ecd, density, linear, set, complex_file, object;
  int max_degree = -1;
  bool machine = false;
  unsigned long seed = 0;
};

int default_max_degree() {
  if (const char* env = std::getenv("ECDSHEAF_MAX_DEGREE")) return std::max(1, atoi(env));
  return 3;
}

FinCategory load_site(const Inputs& in) {
  if (in.site.empty()) throw EngineError("ParseError", "--site is required");
  Json j = Json::parse(read_file(in.site), nullptr, true);
  auto res = validate_category(site_from_json(j));
  if (std::holds_alternative<FinCategory>(res)) return std::get<FinCategory>(std::move(res));
  const auto& bad = std::get<std::vector<Violation>>(res);
  std::string what;
  for (const auto& v : bad) what += v.code + ": " + v.detail + "\n";
  throw EngineError("SiteInvalid", what);
}

EcdStructure load_ecd(const FinCategory& c, const Inputs& in) {
  if (in.ecd.empty()) throw EngineError("ParseError", "--ecd is required");
  return ecd_from_json(c, Json::parse(read_file(in.ecd), nullptr, true));
}

DensityStructure load_density(const FinCategory& c, const Inputs& in) {
  if (in.density.empty()) return default_density(c);
  return density_from_json(c, Json::parse(read_file(in.density), nullptr, true));
}

bool input_error(const EngineError& e) {
  return e.code == "ParseError" || e.code == "UnknownObject" || e.code == "UnknownMorphism" ||
         e.code == "UnknownFixture";
}

void print_report(const Inputs& in, const Json& machine, const std::string& text) {
  if (in.machine)
    std::cout << dump_canonical(machine);
  else
    std::cout << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact verification engine for equivariant cd-structures on finite sites"};
  app.require_subcommand(1);
  Inputs in;
  app.add_option("--seed", in.seed, "seed for any randomized auxiliary checks");
  app.add_flag("--json", in.machine, "machine-readable reports");

  auto add_common = [&](CLI::App* cmd, bool need_ecd) {
    cmd->add_option("--site", in.site, "site description file")->required();
    auto* e = cmd->add_option("--ecd", in.ecd, "ecd description file");
    if (need_ecd) e->required();
    cmd->add_option("--density", in.density, "density structure file");
  };

  auto* cmd_validate = app.add_subcommand("validate", "validate site, ecd and density inputs");
  add_common(cmd_validate, false);

  auto* cmd_topology = app.add_subcommand("topology", "generate the topology and dump its covers");
  add_common(cmd_topology, true);

  auto* cmd_sheafify = app.add_subcommand("sheafify", "sheafify a presheaf of sets or Q-modules");
  add_common(cmd_sheafify, true);
  cmd_sheafify->add_option("--linear", in.linear, "linear presheaf file");
  cmd_sheafify->add_option("--set", in.set, "presheaf-of-sets file");

  auto* cmd_cohomology = app.add_subcommand("cohomology", "sheaf cohomology of a linear presheaf");
  add_common(cmd_cohomology, true);
  cmd_cohomology->add_option("--linear", in.linear, "linear presheaf file")->required();
  cmd_cohomology->add_option("--object", in.object, "object whose cohomology is computed")->required();
  cmd_cohomology->add_option("--max-degree", in.max_degree, "top degree (default ECDSHEAF_MAX_DEGREE)");

  auto* cmd_checkecd = app.add_subcommand("check-ecd", "completeness/regularity/boundedness checkers");
  add_common(cmd_checkecd, true);
  bool only_complete = false, only_regular = false, only_bounded = false;
  cmd_checkecd->add_flag("--complete", only_complete, "only the completeness checker");
  cmd_checkecd->add_flag("--regular", only_regular, "only the regularity checker");
  cmd_checkecd->add_flag("--bounded", only_bounded, "only the boundedness checker");

  auto* cmd_descent = app.add_subcommand("check-descent", "theorem-level descent checkers");
  add_common(cmd_descent, true);
  std::string theorem;
  cmd_descent->add_option("--theorem", theorem, "which criterion: 2.3, 2.14 or 2.16")->required();
  cmd_descent->add_option("--complex", in.complex_file, "bounded complex file (2.3, 2.16)");
  cmd_descent->add_option("--linear", in.linear, "linear presheaf file (2.14)");
  cmd_descent->add_option("--max-degree", in.max_degree, "verified range bound");

  auto* cmd_fixture = app.add_subcommand("fixture", "build a canonical fixture");
  std::string fixture_name, emit_dir = ".";
  bool do_emit = false;
  cmd_fixture->add_option("name", fixture_name, "fixture name")->required();
  cmd_fixture->add_flag("--emit", do_emit, "write the golden files");
  cmd_fixture->add_option("--dir", emit_dir, "output directory (default .)");

  CLI11_PARSE(app, argc, argv);
  if (in.max_degree < 0) in.max_degree = default_max_degree();

  try {
    if (*cmd_validate) {
      FinCategory c = load_site(in);
      Json j;
      j["site"] = "valid";
      std::string text = "site: valid (" + std::to_string(c.n_obj()) + " objects, " +
                         std::to_string(c.n_mor()) + " morphisms)\n";
      if (!in.ecd.empty()) {
        EcdStructure p = load_ecd(c, in);
        j["ecd"] = "valid";
        j["squares"] = p.squares.size();
        text += "ecd: valid (" + std::to_string(p.squares.size()) + " squares)\n";
      }
      if (!in.density.empty()) {
        load_density(c, in);
        j["density"] = "valid";
        text += "density: valid\n";
      }
      print_report(in, j, text);
      return kExitPass;
    }
    if (*cmd_topology) {
      FinCategory c = load_site(in);
      EcdStructure p = load_ecd(c, in);
      Topology t = generate_topology(c, p);
      auto rep = check_topology_axioms(t);
      Json j = topology_dump(t);
      j["axioms"] = rep.ok ? "pass" : "fail";
      std::string text = dump_canonical(topology_dump(t)) +
                         std::string("axioms: ") + (rep.ok ? "pass\n" : "fail\n");
      print_report(in, j, text);
      return rep.ok ? kExitPass : kExitMathFail;
    }
    if (*cmd_sheafify) {
      FinCategory c = load_site(in);
      EcdStructure p = load_ecd(c, in);
      Topology t = generate_topology(c, p);
      if (!in.linear.empty()) {
        QPresheaf f = qpresheaf_from_json(c, Json::parse(read_file(in.linear), nullptr, true));
        auto sh = sheafify_linear(f, t);
        Json j;
        j["sheaf"] = qpresheaf_to_json(*sh.out);
        bool iso = true;
        for (int x = 0; x < c.n_obj(); ++x)
          if (rank_of(sh.unit.at(x)) != f.d(x) || sh.out->d(x) != f.d(x)) iso = false;
        j["unit_is_iso"] = iso;
        print_report(in, j, dump_canonical(j));
        return kExitPass;
      }
      if (!in.set.empty()) {
        SetPresheaf f = set_presheaf_from_json(c, Json::parse(read_file(in.set), nullptr, true));
        auto sh = sheafify_set(f, t);
        Json j;
        j["sheaf"] = set_presheaf_to_json(sh.out);
        print_report(in, j, dump_canonical(j));
        return kExitPass;
      }
      throw EngineError("ParseError", "sheafify needs --linear or --set");
    }
    if (*cmd_cohomology) {
      FinCategory c = load_site(in);
      EcdStructure p = load_ecd(c, in);
      Topology t = generate_topology(c, p);
      QPresheaf f = qpresheaf_from_json(c, Json::parse(read_file(in.linear), nullptr, true));
      CohomologyReport rep = sheaf_cohomology(c, c.obj(in.object), f, t, in.max_degree);
      print_report(in, report_to_json(rep, c), report_to_text(rep, c));
      return kExitPass;
    }
    if (*cmd_checkecd) {
      FinCategory c = load_site(in);
      EcdStructure p = load_ecd(c, in);
      DensityStructure d = load_density(c, in);
      Topology t = generate_topology(c, p);
      bool all = !(only_complete || only_regular || only_bounded);
      Json j;
      std::string text;
      bool pass = true, inconclusive = false;
      if (all || only_complete) {
        auto v = check_complete(c, p, t);
        j["complete"] = report_to_json(HypothesisReport{v, {}, {}}, c)["complete"];
        text += std::string("complete: ") + (v.passed() ? "yes" : "no") + "\n";
        if (v.status == CompleteStatus::Inconclusive) inconclusive = true;
        if (v.status == CompleteStatus::Incomplete) pass = false;
      }
      if (all || only_regular) {
        auto v = check_regular(c, p, t);
        HypothesisReport hr;
        hr.regular = v;
        j["regular"] = report_to_json(hr, c)["regular_squares"];
        text += std::string("regular: ") + (v.all_regular ? "yes" : "no") + "\n";
        pass = pass && v.all_regular;
      }
      if (all || only_bounded) {
        auto v = check_bounded(c, p, d);
        j["bounded"] = v.bounded;
        text += std::string("bounded: ") + (v.bounded ? "yes" : "no") + "\n";
        pass = pass && v.bounded;
      }
      print_report(in, j, text);
      if (!pass) return kExitMathFail;
      return inconclusive ? kExitInconclusive : kExitPass;
    }
    if (*cmd_descent) {
      FinCategory c = load_site(in);
      EcdStructure p = load_ecd(c, in);
      DensityStructure d = load_density(c, in);
      Topology t = generate_topology(c, p);
      if (theorem == "2.14") {
        if (in.linear.empty()) throw EngineError("ParseError", "--linear is required for 2.14");
        QPresheaf f = qpresheaf_from_json(c, Json::parse(read_file(in.linear), nullptr, true));
        auto rep = check_vanishing(c, p, d, t, f);
        print_report(in, report_to_json(rep, c), report_to_text(rep, c));
        if (!rep.ok) return kExitMathFail;
        return rep.conditional ? kExitInconclusive : kExitPass;
      }
      if (in.complex_file.empty()) throw EngineError("ParseError", "--complex is required");
      PresheafComplex k = complex_from_json(c, Json::parse(read_file(in.complex_file), nullptr, true));
      if (theorem == "2.3") {
        // honor a caller-imposed range cap (can force an inconclusive verdict)
        DescentVerdict v;
        HypothesisReport hyp = check_hypotheses(c, p, d, t);
        v.conditional = !hyp.all_pass();
        std::vector<EquivariantSquare> squares = p.squares;
        for (const auto& q : p.squares)
          for (auto& b : base_change_squares(c, q))
            if (p.member(c, b)) squares.push_back(b);
        for (const auto& q : squares) {
          bool ok = homotopy_cartesian_square(k, q);
          v.square_table.push_back({q.name, ok});
          v.all_squares = v.all_squares && ok;
        }
        bool empt = initial_cover_acyclic(k);
        v.square_table.push_back({"empty-cover(initial)", empt});
        v.all_squares = v.all_squares && empt;
        int needed = std::max(1, max_dim_d(c, d));
        int n = std::min(needed, in.max_degree);
        v.locality = is_t_local(k, t, n, hyp.all_pass() && n >= needed);
        if (v.locality.verdict != Locality::Inconclusive)
          v.agreement = (v.locality.verdict == Locality::Local) == v.all_squares;
        print_report(in, report_to_json(v), report_to_text(v));
        if (v.locality.verdict == Locality::Inconclusive) return kExitInconclusive;
        if (v.agreement && !*v.agreement) return kExitMathFail;
        if (v.locality.verdict == Locality::NotLocal || !v.all_squares) return kExitMathFail;
        return kExitPass;
      }
      if (theorem == "2.16") {
        auto rep = check_union_prime_equivalence(c, p, d, t, k);
        print_report(in, report_to_json(rep), report_to_text(rep));
        if (!rep.agree) return kExitMathFail;
        if (rep.base_local.verdict == Locality::Inconclusive ||
            rep.union_local.verdict == Locality::Inconclusive)
          return kExitInconclusive;
        return rep.side_ii ? kExitPass : kExitMathFail;
      }
      throw EngineError("ParseError", "unknown criterion " + theorem + " (use 2.3, 2.14 or 2.16)");
    }
    if (*cmd_fixture) {
      Fixture fx = build_fixture(fixture_name);
      auto rep = check_topology_axioms(fx.t());
      Json j;
      j["name"] = fx.name;
      j["objects"] = fx.c().n_obj();
      j["squares"] = fx.ecd.squares.size();
      j["topology_axioms"] = rep.ok;
      std::string text = "fixture " + fx.name + ": " + std::to_string(fx.c().n_obj()) +
                         " objects, " + std::to_string(fx.ecd.squares.size()) + " squares\n";
      if (do_emit) {
        emit_fixture(fx, emit_dir);
        j["emitted"] = emit_dir;
        text += "golden files written to " + emit_dir + "\n";
      }
      print_report(in, j, text);
      return rep.ok ? kExitPass : kExitMathFail;
    }
  } catch (const EngineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (input_error(e)) return kExitInput;
    if (e.code == "SiteInvalid" || e.code == "AxiomViolation" || e.code == "NotExact" ||
        e.code == "NotCommutative" || e.code == "NotEquivariant" || e.code == "NotOver" ||
        e.code == "NotHomomorphism" || e.code == "NotInitial" || e.code == "NotUnital" ||
        e.code == "NotAssociative" || e.code == "MalformedComposition" || e.code == "NotASheaf" ||
        e.code == "NotCartesian" || e.code == "NotMono" || e.code == "MixedTargets" ||
        e.code == "InfiniteDimension" || e.code == "MissingPullback" ||
        e.code == "MissingCoproduct" || e.code == "NonExistent")
      return kExitMathFail;
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitPass;
}
