#include "ecdsheaf/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace ecdsheaf {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw EngineError("ParseError", what); }

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(e.what());
  }
}

}  // namespace

std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EngineError("ParseError", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

Json site_to_json(const FinCategory& c) {
  RawCategory raw = c.to_raw();
  Json j;
  j["objects"] = raw.objects;
  j["initial"] = raw.initial;
  Json mors = Json::array();
  for (const auto& m : raw.morphisms) {
    Json jm;
    jm["id"] = m.id;
    jm["src"] = m.src;
    jm["tgt"] = m.tgt;
    mors.push_back(jm);
  }
  j["morphisms"] = mors;
  Json ids = Json::object();
  for (const auto& [o, i] : raw.identities) ids[o] = i;
  j["identities"] = ids;
  Json comp = Json::array();
  for (const auto& e : raw.compose) comp.push_back(Json::array({e[0], e[1], e[2]}));
  j["compose"] = comp;
  return j;
}

RawCategory site_from_json(const Json& j) {
  return guarded([&] {
    RawCategory raw;
    raw.objects = j.at("objects").get<std::vector<std::string>>();
    raw.initial = j.at("initial").get<std::string>();
    for (const auto& m : j.at("morphisms"))
      raw.morphisms.push_back({m.at("id").get<std::string>(), m.at("src").get<std::string>(),
                               m.at("tgt").get<std::string>()});
    for (auto it = j.at("identities").begin(); it != j.at("identities").end(); ++it)
      raw.identities[it.key()] = it.value().get<std::string>();
    for (const auto& e : j.at("compose")) {
      if (e.size() != 3) parse_fail("compose entries must be [g, f, gf] triples");
      raw.compose.push_back({e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<std::string>()});
    }
    return raw;
  });
}

Json group_to_json(const FinGroup& g) {
  Json j;
  j["elements"] = g.elems;
  j["unit"] = g.elems[static_cast<size_t>(g.unit)];
  Json mul = Json::array();
  for (int a = 0; a < g.n(); ++a)
    for (int b = 0; b < g.n(); ++b)
      mul.push_back(Json::array({g.elems[static_cast<size_t>(a)], g.elems[static_cast<size_t>(b)],
                                 g.elems[static_cast<size_t>(g.mul[static_cast<size_t>(a)][static_cast<size_t>(b)])]}));
  j["mul"] = mul;
  Json inv = Json::object();
  for (int a = 0; a < g.n(); ++a)
    inv[g.elems[static_cast<size_t>(a)]] = g.elems[static_cast<size_t>(g.inv[static_cast<size_t>(a)])];
  j["inv"] = inv;
  return j;
}

FinGroup group_from_json(const Json& j) {
  return guarded([&] {
    FinGroup g;
    g.elems = j.at("elements").get<std::vector<std::string>>();
    auto ix = [&](const std::string& e) {
      for (size_t i = 0; i < g.elems.size(); ++i)
        if (g.elems[i] == e) return static_cast<int>(i);
      parse_fail("unknown group element " + e);
    };
    g.unit = ix(j.at("unit").get<std::string>());
    g.mul.assign(g.elems.size(), std::vector<int>(g.elems.size(), -1));
    for (const auto& e : j.at("mul"))
      g.mul[static_cast<size_t>(ix(e[0].get<std::string>()))]
           [static_cast<size_t>(ix(e[1].get<std::string>()))] = ix(e[2].get<std::string>());
    g.inv.assign(g.elems.size(), -1);
    for (auto it = j.at("inv").begin(); it != j.at("inv").end(); ++it)
      g.inv[static_cast<size_t>(ix(it.key()))] = ix(it.value().get<std::string>());
    auto bad = g.validate();
    if (!bad.empty()) parse_fail("invalid group: " + bad.front().detail);
    return g;
  });
}

Json ecd_to_json(const FinCategory& c, const EcdStructure& p) {
  Json squares = Json::array();
  for (const auto& q : p.squares) {
    Json jq;
    jq["name"] = q.name;
    jq["objects"] = {{"Xp", c.objects[static_cast<size_t>(q.Xp)]},
                     {"X", c.objects[static_cast<size_t>(q.X)]},
                     {"Sp", c.objects[static_cast<size_t>(q.Sp)]},
                     {"S", c.objects[static_cast<size_t>(q.S)]}};
    jq["morphisms"] = {{"gp", c.mor_id(q.gp)},
                       {"fp", c.mor_id(q.fp)},
                       {"g", c.mor_id(q.g)},
                       {"f", c.mor_id(q.f)}};
    jq["group"] = group_to_json(*q.act_X.group);
    Json ax = Json::object(), axp = Json::object();
    for (int g = 0; g < q.act_X.group->n(); ++g) {
      ax[q.act_X.group->elems[static_cast<size_t>(g)]] = c.mor_id(q.act_X.act[static_cast<size_t>(g)]);
      axp[q.act_Xp.group->elems[static_cast<size_t>(g)]] = c.mor_id(q.act_Xp.act[static_cast<size_t>(g)]);
    }
    jq["action_X"] = ax;
    jq["action_Xp"] = axp;
    squares.push_back(jq);
  }
  Json j;
  j["squares"] = squares;
  return j;
}

EcdStructure ecd_from_json(const FinCategory& c, const Json& j) {
  return guarded([&] {
    std::vector<EquivariantSquare> squares;
    for (const auto& jq : j.at("squares")) {
      EquivariantSquare q;
      q.name = jq.at("name").get<std::string>();
      q.Xp = c.obj(jq.at("objects").at("Xp").get<std::string>());
      q.X = c.obj(jq.at("objects").at("X").get<std::string>());
      q.Sp = c.obj(jq.at("objects").at("Sp").get<std::string>());
      q.S = c.obj(jq.at("objects").at("S").get<std::string>());
      q.gp = c.mor(jq.at("morphisms").at("gp").get<std::string>());
      q.fp = c.mor(jq.at("morphisms").at("fp").get<std::string>());
      q.g = c.mor(jq.at("morphisms").at("g").get<std::string>());
      q.f = c.mor(jq.at("morphisms").at("f").get<std::string>());
      auto grp = std::make_shared<FinGroup>(group_from_json(jq.at("group")));
      q.act_X.group = grp;
      q.act_X.carrier = q.X;
      q.act_X.over = q.f;
      q.act_Xp.group = grp;
      q.act_Xp.carrier = q.Xp;
      q.act_Xp.over = q.fp;
      q.act_X.act.resize(static_cast<size_t>(grp->n()));
      q.act_Xp.act.resize(static_cast<size_t>(grp->n()));
      for (int g = 0; g < grp->n(); ++g) {
        q.act_X.act[static_cast<size_t>(g)] =
            c.mor(jq.at("action_X").at(grp->elems[static_cast<size_t>(g)]).get<std::string>());
        q.act_Xp.act[static_cast<size_t>(g)] =
            c.mor(jq.at("action_Xp").at(grp->elems[static_cast<size_t>(g)]).get<std::string>());
      }
      squares.push_back(std::move(q));
    }
    return validate_ecd(c, squares);
  });
}

Json density_to_json(const FinCategory& c, const DensityStructure& d) {
  Json levels = Json::object();
  for (int x = 0; x < c.n_obj(); ++x) {
    Json per = Json::array();
    for (int i = 0; i < d.n_levels(x); ++i) {
      std::vector<std::string> ids;
      for (int m : d.level(x, i)) ids.push_back(c.mor_id(m));
      std::sort(ids.begin(), ids.end());
      per.push_back(ids);
    }
    levels[c.objects[static_cast<size_t>(x)]] = per;
  }
  Json j;
  j["levels"] = levels;
  return j;
}

DensityStructure density_from_json(const FinCategory& c, const Json& j) {
  return guarded([&] {
    DensityStructure d;
    d.levels.resize(static_cast<size_t>(c.n_obj()));
    for (auto it = j.at("levels").begin(); it != j.at("levels").end(); ++it) {
      int x = c.obj(it.key());
      for (const auto& lvl : it.value()) {
        std::vector<int> mors;
        for (const auto& id : lvl) mors.push_back(c.mor(id.get<std::string>()));
        std::sort(mors.begin(), mors.end());
        d.levels[static_cast<size_t>(x)].push_back(mors);
      }
    }
    auto bad = validate_density(c, d);
    if (!bad.empty()) throw EngineError(bad.front().code, bad.front().detail);
    return d;
  });
}

Json topology_dump(const Topology& t) {
  const FinCategory& c = *t.cat;
  Json covers = Json::object();
  for (int x = 0; x < c.n_obj(); ++x) {
    Json per = Json::array();
    for (const auto& r : t.covers[static_cast<size_t>(x)]) {
      std::vector<std::string> ids;
      for (int m : sieve_members(c, r)) ids.push_back(c.mor_id(m));
      std::sort(ids.begin(), ids.end());
      per.push_back(ids);
    }
    covers[c.objects[static_cast<size_t>(x)]] = per;
  }
  Json j;
  j["covers"] = covers;
  return j;
}

Json set_presheaf_to_json(const SetPresheaf& f) {
  const FinCategory& c = *f.cat;
  Json at = Json::object();
  for (int x = 0; x < c.n_obj(); ++x) at[c.objects[static_cast<size_t>(x)]] = f.at[static_cast<size_t>(x)];
  Json restr = Json::object();
  for (int m = 0; m < c.n_mor(); ++m) {
    Json table = Json::object();
    for (int e = 0; e < f.size(c.tgt(m)); ++e)
      table[f.at[static_cast<size_t>(c.tgt(m))][static_cast<size_t>(e)]] =
          f.at[static_cast<size_t>(c.src(m))][static_cast<size_t>(f.apply(m, e))];
    restr[c.mor_id(m)] = table;
  }
  Json j;
  j["at"] = at;
  j["restrict"] = restr;
  return j;
}

SetPresheaf set_presheaf_from_json(const FinCategory& c, const Json& j) {
  return guarded([&] {
    SetPresheaf f;
    f.cat = &c;
    f.at.resize(static_cast<size_t>(c.n_obj()));
    for (auto it = j.at("at").begin(); it != j.at("at").end(); ++it)
      f.at[static_cast<size_t>(c.obj(it.key()))] = it.value().get<std::vector<std::string>>();
    f.restr.resize(static_cast<size_t>(c.n_mor()));
    auto token_ix = [&](int x, const std::string& tok) {
      const auto& v = f.at[static_cast<size_t>(x)];
      for (size_t i = 0; i < v.size(); ++i)
        if (v[i] == tok) return static_cast<int>(i);
      parse_fail("unknown element token " + tok);
    };
    for (int m = 0; m < c.n_mor(); ++m) {
      const auto& table = j.at("restrict").at(c.mor_id(m));
      auto& r = f.restr[static_cast<size_t>(m)];
      r.resize(f.at[static_cast<size_t>(c.tgt(m))].size());
      for (int e = 0; e < f.size(c.tgt(m)); ++e)
        r[static_cast<size_t>(e)] = token_ix(
            c.src(m), table.at(f.at[static_cast<size_t>(c.tgt(m))][static_cast<size_t>(e)]).get<std::string>());
    }
    if (auto err = f.check_functorial()) parse_fail("presheaf not functorial: " + *err);
    return f;
  });
}

Json qpresheaf_to_json(const QPresheaf& f) {
  const FinCategory& c = *f.cat;
  Json dim = Json::object();
  for (int x = 0; x < c.n_obj(); ++x)
    dim[c.objects[static_cast<size_t>(x)]] = static_cast<long>(f.d(x));
  Json restr = Json::object();
  for (int m = 0; m < c.n_mor(); ++m) {
    Json rows = Json::array();
    const Mat& mat = f.r(m);
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index jx = 0; jx < mat.cols(); ++jx) row.push_back(rat_print(mat(i, jx)));
      rows.push_back(row);
    }
    restr[c.mor_id(m)] = rows;
  }
  Json j;
  j["dim"] = dim;
  j["restrict"] = restr;
  return j;
}

QPresheaf qpresheaf_from_json(const FinCategory& c, const Json& j) {
  return guarded([&] {
    QPresheaf f;
    f.cat = &c;
    f.dim.assign(static_cast<size_t>(c.n_obj()), 0);
    for (auto it = j.at("dim").begin(); it != j.at("dim").end(); ++it)
      f.dim[static_cast<size_t>(c.obj(it.key()))] = it.value().get<long>();
    f.restr.resize(static_cast<size_t>(c.n_mor()));
    for (int m = 0; m < c.n_mor(); ++m) {
      const auto& rows = j.at("restrict").at(c.mor_id(m));
      Mat mat(f.d(c.src(m)), f.d(c.tgt(m)));
      if (static_cast<Eigen::Index>(rows.size()) != mat.rows())
        parse_fail("matrix row count mismatch for " + c.mor_id(m));
      for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        const auto& row = rows[static_cast<size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != mat.cols())
          parse_fail("matrix column count mismatch for " + c.mor_id(m));
        for (Eigen::Index jx = 0; jx < mat.cols(); ++jx)
          mat(i, jx) = rat_parse(row[static_cast<size_t>(jx)].get<std::string>());
      }
      f.restr[static_cast<size_t>(m)] = mat;
    }
    if (auto err = f.check_functorial()) parse_fail("linear presheaf not functorial: " + *err);
    return f;
  });
}

Json complex_to_json(const PresheafComplex& k) {
  Json j;
  j["min_degree"] = k.lo;
  j["max_degree"] = k.hi;
  Json terms = Json::object();
  Json diffs = Json::object();
  for (int d = k.lo; d <= k.hi; ++d) terms[std::to_string(d)] = qpresheaf_to_json(*k.term(d));
  const FinCategory& c = *k.cat;
  for (int d = k.lo; d < k.hi; ++d) {
    Json per = Json::object();
    for (int x = 0; x < c.n_obj(); ++x) {
      Json rows = Json::array();
      const Mat& mat = k.diff(d).at(x);
      for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index jx = 0; jx < mat.cols(); ++jx) row.push_back(rat_print(mat(i, jx)));
        rows.push_back(row);
      }
      per[c.objects[static_cast<size_t>(x)]] = rows;
    }
    diffs[std::to_string(d)] = per;
  }
  j["terms"] = terms;
  j["differentials"] = diffs;
  return j;
}

PresheafComplex complex_from_json(const FinCategory& c, const Json& j) {
  return guarded([&] {
    PresheafComplex k;
    k.cat = &c;
    k.lo = j.at("min_degree").get<int>();
    k.hi = j.at("max_degree").get<int>();
    for (int d = k.lo; d <= k.hi; ++d)
      k.terms.push_back(share(qpresheaf_from_json(c, j.at("terms").at(std::to_string(d)))));
    for (int d = k.lo; d < k.hi; ++d) {
      LinearMap dm = LinearMap::zero(k.terms[static_cast<size_t>(d - k.lo)],
                                     k.terms[static_cast<size_t>(d + 1 - k.lo)]);
      const auto& per = j.at("differentials").at(std::to_string(d));
      for (int x = 0; x < c.n_obj(); ++x) {
        const auto& rows = per.at(c.objects[static_cast<size_t>(x)]);
        Mat mat(k.terms[static_cast<size_t>(d + 1 - k.lo)]->d(x),
                k.terms[static_cast<size_t>(d - k.lo)]->d(x));
        if (static_cast<Eigen::Index>(rows.size()) != mat.rows()) parse_fail("differential shape mismatch");
        for (Eigen::Index i = 0; i < mat.rows(); ++i)
          for (Eigen::Index jx = 0; jx < mat.cols(); ++jx)
            mat(i, jx) = rat_parse(rows[static_cast<size_t>(i)][static_cast<size_t>(jx)].get<std::string>());
        dm.comp[static_cast<size_t>(x)] = mat;
      }
      k.diffs.push_back(std::move(dm));
    }
    if (auto err = k.check_complex()) parse_fail("invalid complex: " + *err);
    return k;
  });
}

namespace {

const char* complete_str(CompleteStatus s) {
  switch (s) {
    case CompleteStatus::CompleteSufficient:
      return "complete(sufficient)";
    case CompleteStatus::CompleteDirect:
      return "complete(direct)";
    case CompleteStatus::Incomplete:
      return "incomplete";
    default:
      return "inconclusive";
  }
}

const char* locality_str(const LocalVerdict& v) {
  switch (v.verdict) {
    case Locality::Local:
      return "local";
    case Locality::NotLocal:
      return "not-local";
    default:
      return "inconclusive";
  }
}

}  // namespace

Json report_to_json(const HypothesisReport& r, const FinCategory& c) {
  (void)c;
  Json j;
  j["complete"] = complete_str(r.complete.status);
  Json sq = Json::array();
  for (const auto& s : r.regular.squares) {
    Json e;
    e["square"] = s.square;
    e["cartesian"] = s.cartesian;
    e["mono"] = s.mono;
    e["comparison_epi"] = s.comparison_epi;
    e["cover_route"] = s.cover_route;
    e["cover_route_available"] = s.cover_route_available;
    e["regular"] = s.regular;
    sq.push_back(e);
  }
  j["regular"] = r.regular.all_regular;
  j["regular_squares"] = sq;
  j["bounded"] = r.bounded.bounded;
  if (!r.bounded.witness.empty()) j["bounded_witness"] = r.bounded.witness;
  j["all_pass"] = r.all_pass();
  return j;
}

std::string report_to_text(const HypothesisReport& r, const FinCategory& c) {
  (void)c;
  std::ostringstream ss;
  ss << "complete: " << complete_str(r.complete.status) << "\n";
  for (const auto& s : r.regular.squares)
    ss << "regular[" << s.square << "]: " << (s.regular ? "yes" : "no")
       << " (cartesian=" << s.cartesian << " mono=" << s.mono << " epi=" << s.comparison_epi
       << " cover=" << s.cover_route << ")\n";
  ss << "bounded: " << (r.bounded.bounded ? "yes" : "no") << "\n";
  ss << "all: " << (r.all_pass() ? "pass" : "fail") << "\n";
  return ss.str();
}

Json report_to_json(const DescentVerdict& v) {
  Json j;
  Json sq = Json::array();
  for (const auto& [name, ok] : v.square_table)
    sq.push_back(Json{{"square", name}, {"homotopy_cartesian", ok}});
  j["squares"] = sq;
  j["all_squares"] = v.all_squares;
  j["locality"] = locality_str(v.locality);
  if (v.locality.verdict == Locality::NotLocal) {
    j["witness_object"] = v.locality.witness_obj;
    j["witness_degree"] = v.locality.witness_deg;
  }
  if (v.agreement) j["agreement"] = *v.agreement;
  j["conditional"] = v.conditional;
  return j;
}

std::string report_to_text(const DescentVerdict& v) {
  std::ostringstream ss;
  for (const auto& [name, ok] : v.square_table)
    ss << "square " << name << ": " << (ok ? "homotopy-cartesian" : "FAILS") << "\n";
  ss << "locality: " << locality_str(v.locality) << "\n";
  if (v.agreement) ss << "agreement: " << (*v.agreement ? "yes" : "NO") << "\n";
  if (v.conditional) ss << "verdict is conditional (hypotheses not fully certified)\n";
  return ss.str();
}

Json report_to_json(const VanishingReport& r, const FinCategory& c) {
  Json j;
  j["hypotheses_pass"] = r.hypotheses_pass;
  j["conditional"] = r.conditional;
  j["ok"] = r.ok;
  Json rows = Json::array();
  for (const auto& row : r.table) {
    Json e;
    e["object"] = c.objects[static_cast<size_t>(row.object)];
    e["dim"] = row.dim;
    Json dims = Json::array();
    for (auto d : row.dims) dims.push_back(static_cast<long>(d));
    e["h"] = dims;
    rows.push_back(e);
  }
  j["table"] = rows;
  if (!r.witness.empty()) j["witness"] = r.witness;
  return j;
}

std::string report_to_text(const VanishingReport& r, const FinCategory& c) {
  std::ostringstream ss;
  for (const auto& row : r.table) {
    ss << "H^*(" << c.objects[static_cast<size_t>(row.object)] << ") dim=" << row.dim << ":";
    for (auto d : row.dims) ss << " " << d;
    ss << "\n";
  }
  ss << "vanishing above the density dimension: " << (r.ok ? "holds" : "FAILS") << "\n";
  if (r.conditional) ss << "verdict is conditional (hypotheses not fully certified)\n";
  return ss.str();
}

Json report_to_json(const UnionPrimeReport& r) {
  Json j;
  j["derived_squares_cartesian"] = r.side_squares;
  j["base_local"] = locality_str(r.base_local);
  j["union_local"] = locality_str(r.union_local);
  j["side_i"] = r.side_i;
  j["side_ii"] = r.side_ii;
  j["agree"] = r.agree;
  return j;
}

std::string report_to_text(const UnionPrimeReport& r) {
  std::ostringstream ss;
  ss << "derived squares homotopy-cartesian: " << (r.side_squares ? "yes" : "no") << "\n";
  ss << "base locality: " << locality_str(r.base_local) << "\n";
  ss << "union locality: " << locality_str(r.union_local) << "\n";
  ss << "agreement: " << (r.agree ? "yes" : "NO") << "\n";
  return ss.str();
}

Json report_to_json(const CohomologyReport& r, const FinCategory& c) {
  Json j;
  j["object"] = c.objects[static_cast<size_t>(r.object)];
  Json dims = Json::array();
  for (auto d : r.dims) dims.push_back(static_cast<long>(d));
  j["h"] = dims;
  j["resolution_length"] = r.resolution_length;
  return j;
}

std::string report_to_text(const CohomologyReport& r, const FinCategory& c) {
  std::ostringstream ss;
  ss << "H^*(" << c.objects[static_cast<size_t>(r.object)] << "):";
  for (auto d : r.dims) ss << " " << d;
  ss << " (resolution length " << r.resolution_length << ")\n";
  return ss.str();
}

void emit_fixture(const Fixture& fx, const std::string& dir) {
  write_file(dir + "/site.json", dump_canonical(site_to_json(fx.c())));
  write_file(dir + "/ecd.json", dump_canonical(ecd_to_json(fx.c(), fx.ecd)));
  write_file(dir + "/density.json", dump_canonical(density_to_json(fx.c(), fx.density)));
  write_file(dir + "/topology.json", dump_canonical(topology_dump(fx.t())));
  Json samples = Json::object();
  for (const auto& [name, f] : fx.sample_presheaves()) samples[name] = qpresheaf_to_json(*f);
  write_file(dir + "/presheaves.json", dump_canonical(samples));
}

}  // namespace ecdsheaf
