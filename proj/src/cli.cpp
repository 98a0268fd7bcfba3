#include "hochdef/cli.hpp"

#include <chrono>
#include <sstream>

#include "hochdef/diffop.hpp"

namespace hochdef {

using Json = nlohmann::ordered_json;

int exit_code_for(const std::exception& e) {
  if (const auto* m = dynamic_cast<const ManifestError*>(&e))
    return m->kind() == ManifestError::Kind::invariant ? kExitInvariant : kExitParse;
  if (dynamic_cast<const CapExceeded*>(&e)) return kExitCap;
  if (dynamic_cast<const PreconditionFailed*>(&e)) return kExitPrecondition;
  if (dynamic_cast<const InvariantViolation*>(&e)) return kExitInvariant;
  if (dynamic_cast<const Error*>(&e)) return kExitInvariant;
  return kExitUsage;
}

namespace {

struct Context {
  const Manifest& m;
  const RunOptions& opt;
  const CommandDecl& cmd;
  int degree_cap;
  std::size_t order_cap;
  std::size_t size_cap;
};

Json strings(const Vector& v) { return Json(to_strings(v)); }

Json strings(const std::vector<Vector>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(strings(v));
  return out;
}

Json strings(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(strings(m.row(r)));
  return out;
}

std::optional<std::string> param(const Context& c, const std::string& key) {
  auto it = c.cmd.params.find(key);
  if (it == c.cmd.params.end()) return std::nullopt;
  return it->second;
}

template <class T>
const std::string& first_name(const std::vector<std::pair<std::string, T>>& v, const char* what) {
  if (v.empty()) throw PreconditionFailed(std::string("the manifest declares no ") + what);
  return v.front().first;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::size_t> cover_of(const Context& c) {
  if (!c.m.site) throw PreconditionFailed("a cover needs a [site] section");
  auto given = param(c, "cover");
  if (!given) {
    if (c.m.site->cover.empty()) throw PreconditionFailed("no cover given on the command or in [site]");
    return c.m.site->cover;
  }
  std::vector<std::size_t> out;
  for (const auto& n : split_list(*given)) out.push_back(c.m.site->site.index_of(n));
  if (out.empty()) throw PreconditionFailed("empty cover");
  return out;
}

std::vector<std::string> object_names(const Context& c, const std::vector<std::size_t>& objs) {
  std::vector<std::string> out;
  for (std::size_t u : objs) out.push_back(c.m.site->objects[u]);
  return out;
}

// H^0..nmax; degrees past the top of the complex are zero.
std::vector<Cohomology> complex_cohomology(const CochainComplex& cx, int nmax) {
  std::vector<Cohomology> out;
  for (int n = 0; n <= nmax; ++n) out.push_back(n > cx.highest() ? Cohomology{} : cohomology(cx, n));
  return out;
}

Json dims_and_reps(const Context& c, const std::vector<Cohomology>& hs, Json& result) {
  Json dims = Json::array(), reps = Json::array();
  for (const auto& h : hs) {
    dims.push_back(h.dim);
    reps.push_back(strings(h.representatives));
  }
  result["dims"] = dims;
  if (c.opt.emit_representatives) result["representatives"] = reps;
  return result;
}

struct AlgebraChoice {
  std::string algebra, bimodule;
  const Algebra* a = nullptr;
  Bimodule m;
};

AlgebraChoice choose_bimodule(const Context& c, const ExtensionDatum* forced = nullptr) {
  AlgebraChoice out;
  if (auto b = param(c, "bimodule")) {
    out.bimodule = *b;
    out.algebra = c.m.bimodule_over.at(*b);
    out.a = c.m.algebra(out.algebra);
    out.m = *c.m.bimodule(*b);
  } else {
    out.algebra = param(c, "algebra").value_or(first_name(c.m.algebras, "algebra"));
    out.a = c.m.algebra(out.algebra);
    out.bimodule = "regular";
    out.m = regular_bimodule(*out.a);
  }
  if (forced) out.m = forced->module();
  return out;
}

const ExtensionDecl* extension_param(const Context& c) {
  auto e = param(c, "extension");
  return e ? c.m.extension(*e) : nullptr;
}

const ExtensionDatum& algebra_extension(const ExtensionDecl& x) {
  if (!x.algebra_extension) throw PreconditionFailed("extension '" + x.bimodule + "' is a presheaf extension, not an algebra extension");
  return *x.algebra_extension;
}

Json run_hochschild(const Context& c) {
  AlgebraChoice ch = choose_bimodule(c);
  CochainComplex cx = bar_cochain_complex(*ch.a, ch.m, c.degree_cap + 1, c.size_cap);
  Json r;
  r["algebra"] = ch.algebra;
  r["bimodule"] = ch.bimodule;
  r["degrees"] = c.degree_cap;
  dims_and_reps(c, complex_cohomology(cx, c.degree_cap), r);
  r["checks"] = {{"d_squared_zero", cx.d_squared_zero()}};
  return r;
}

Json run_exal(const Context& c) {
  const ExtensionDecl* x = extension_param(c);
  const ExtensionDatum* e = x ? &algebra_extension(*x) : nullptr;
  AlgebraChoice ch = choose_bimodule(c, e);
  if (x) ch.bimodule = x->bimodule;
  const Algebra& a = e ? e->base() : *ch.a;
  CohomologySpace h2 = hh_space(a, ch.m, 2, false, c.size_cap);
  Derivations d = derivations(ch.m);
  SplitAutomorphisms aut = split_automorphisms(ch.m);
  Json r;
  r["algebra"] = x ? c.m.bimodule_over.at(x->bimodule) : ch.algebra;
  r["bimodule"] = ch.bimodule;
  r["exal_dim"] = h2.dim();
  r["derivations_dim"] = d.der.size();
  r["inner_derivations_dim"] = d.inner.size();
  r["outer_derivations_dim"] = d.outer_dim;
  Json checks;
  checks["outer_derivations_equal_hh1"] = d.outer_dim == hh(a, ch.m, 1, c.size_cap).dim;
  checks["split_automorphisms_are_derivations"] = aut.verified;
  if (c.opt.emit_representatives) r["exal_representatives"] = strings(h2.representatives());
  if (e) {
    SplitResult s = is_split(*e);
    r["extension"] = *param(c, "extension");
    r["split"] = s.split;
    r["class"] = strings(s.hh2_class);
    checks["split_iff_class_zero"] = s.split == is_zero(s.hh2_class);
    checks["cocycle_round_trip"] = extension_to_cocycle(*e, e->canonical_section()) == x->cocycle;
    if (s.section) {
      checks["section_multiplicative"] = is_multiplicative_section(*e, *s.section);
      if (c.opt.emit_representatives) r["section"] = strings(*s.section);
    }
  }
  r["checks"] = checks;
  return r;
}

struct LinearChoice {
  std::string name;
  LinearPresheaf f;
};

LinearChoice choose_linear(const Context& c) {
  if (auto p = param(c, "presheaf")) {
    const AlgebraPresheaf& a = c.m.presheaf(*p)->presheaf;
    const FiniteSite& s = a.site();
    std::vector<std::size_t> dims;
    std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
    for (std::size_t u = 0; u < s.size(); ++u) {
      dims.push_back(a.at(u).dim());
      for (std::size_t v = 0; v < s.size(); ++v)
        if (s.less(v, u)) given[{u, v}] = a.restriction(u, v);
    }
    return {*p, LinearPresheaf(s, a.field(), dims, given)};
  }
  std::string name = param(c, "bimodule_presheaf").value_or(first_name(c.m.bimodule_presheaves, "bimodule_presheaf"));
  return {name, c.m.bimodule_presheaf(name)->presheaf.linear()};
}

Json run_nerve(const Context& c) {
  LinearChoice ch = choose_linear(c);
  CochainComplex cx = nerve_complex(ch.f);
  Json r;
  r["presheaf"] = ch.name;
  r["degrees"] = c.degree_cap;
  dims_and_reps(c, complex_cohomology(cx, c.degree_cap), r);
  r["checks"] = {{"d_squared_zero", cx.d_squared_zero()}};
  return r;
}

Json run_cech(const Context& c) {
  LinearChoice ch = choose_linear(c);
  std::vector<std::size_t> cover = cover_of(c);
  CochainComplex cx = cech_complex(ch.f, cover, c.degree_cap + 1);
  Json r;
  r["presheaf"] = ch.name;
  r["cover"] = object_names(c, cover);
  r["degrees"] = c.degree_cap;
  dims_and_reps(c, complex_cohomology(cx, c.degree_cap), r);
  r["checks"] = {{"d_squared_zero", cx.d_squared_zero()}};
  return r;
}

const BimodulePresheaf& choose_bimodule_presheaf(const Context& c, std::string& name) {
  name = param(c, "bimodule_presheaf").value_or(first_name(c.m.bimodule_presheaves, "bimodule_presheaf"));
  return c.m.bimodule_presheaf(name)->presheaf;
}

Json run_gs(const Context& c) {
  std::string name;
  const BimodulePresheaf& m = choose_bimodule_presheaf(c, name);
  const int nmax = c.degree_cap;
  GSComplex t(m, static_cast<std::size_t>(nmax) + 1, nullptr, c.size_cap);
  GSSequence seq(t, nmax);
  Json ext = Json::array(), ha = Json::array(), nerve = Json::array();
  for (int n = 0; n <= nmax; ++n) {
    ext.push_back(seq.ext(n).dim());
    ha.push_back(seq.ha(n).dim());
    nerve.push_back(seq.nerve(n).dim());
  }
  Json r;
  r["bimodule_presheaf"] = name;
  r["degrees"] = nmax;
  r["ext_dims"] = ext;
  r["h_a_dims"] = ha;
  r["nerve_dims"] = nerve;
  if (c.opt.emit_representatives) {
    Json reps = Json::array();
    for (int n = 0; n <= nmax; ++n) reps.push_back(strings(seq.ext(n).representatives()));
    r["ext_representatives"] = reps;
  }
  r["checks"] = {{"double_complex_commutes", t.bicomplex().check().ok()}, {"total_d_squared_zero", t.total().d_squared_zero()}};
  return r;
}

Json les_nodes(const LesReport& l) {
  Json out = Json::array();
  for (const auto& n : l.nodes)
    out.push_back({{"space", n.space}, {"degree", n.degree}, {"dim", n.dim}, {"kernel", n.kernel}, {"image", n.image}, {"exact", n.exact()}});
  return out;
}

bool symmetric_presheaf(const BimodulePresheaf& m) {
  for (std::size_t u = 0; u < m.site().size(); ++u)
    if (!is_symmetric(m.at(u))) return false;
  return true;
}

Json run_les(const Context& c) {
  std::string name;
  const BimodulePresheaf& m = choose_bimodule_presheaf(c, name);
  LesReport l = les_check(m, c.degree_cap, c.size_cap);
  LesReport five = five_term_check(m, c.size_cap);
  Json r;
  r["bimodule_presheaf"] = name;
  r["degrees"] = c.degree_cap;
  r["ext_dims"] = l.ext;
  r["h_a_dims"] = l.ha;
  r["nerve_dims"] = l.nerve;
  r["nodes"] = les_nodes(l);
  r["five_term_nodes"] = les_nodes(five);
  const bool symmetric = symmetric_presheaf(m);
  r["symmetric"] = symmetric;
  Json checks = {{"exact", l.exact()}, {"five_term_exact", five.exact()}};
  if (symmetric) checks["splits"] = l.splits();
  r["checks"] = checks;
  return r;
}

Json run_obstruct(const Context& c) {
  const ExtensionDecl* x = extension_param(c);
  if (!x) {
    for (const auto& [n, e] : c.m.extensions)
      if (e.presheaf_extension) {
        x = &e;
        break;
      }
    if (!x) throw PreconditionFailed("the manifest declares no presheaf extension");
  }
  if (!x->presheaf_extension) throw PreconditionFailed("obstruct needs a presheaf extension");
  std::string name;
  for (const auto& [n, e] : c.m.extensions)
    if (&e == x) name = n;
  std::vector<std::size_t> cover = cover_of(c);
  ObstructionReport o = obstruction_cascade(*x->presheaf_extension, cover, c.size_cap);
  const bool emit = c.opt.emit_representatives;
  Json r;
  r["extension"] = name;
  r["cover"] = object_names(c, cover);
  r["stage"] = o.stage;
  r["rho"] = {{"exal_class", strings(o.rho.ha_class)},
              {"ext_class", strings(o.rho.ext_class)},
              {"nerve_image", strings(o.rho.nerve_image)},
              {"ext_zero", o.rho.ext_zero()},
              {"in_connecting_image", o.rho.in_connecting_image}};
  Json a1 = Json::array();
  for (const auto& m : o.alpha1) {
    Json j = {{"member", c.m.site->objects[m.member]}, {"zero", m.zero()}, {"class_dim", m.slice_class.size()}};
    if (emit) j["class"] = strings(m.slice_class), j["hh2_class"] = strings(m.hh2_class);
    a1.push_back(j);
  }
  r["alpha1"] = a1;
  Json checks;
  if (o.alpha2) {
    const Alpha2Result& a = *o.alpha2;
    Json j = {{"zero", a.zero()}, {"class_dim", a.cech_class.size()}, {"class", strings(a.cech_class)}};
    if (emit) j["local_classes"] = strings(a.local_classes);
    r["alpha2"] = j;
    checks["alpha2_derivations"] = a.derivations;
    checks["alpha2_compatible"] = a.compatible;
  }
  if (o.alpha3) {
    const Alpha3Result& a = *o.alpha3;
    Json j = {{"zero", a.zero()}, {"class_dim", a.cech_class.size()}, {"class", strings(a.cech_class)}};
    if (emit) j["m_pairs"] = strings(a.m_pairs), j["m_triples"] = strings(a.m_triples);
    r["alpha3"] = j;
  }
  // A split extension has zero Ext^2 class, and any detected alpha is nonzero.
  checks["stage_consistent"] = o.stage != "split" || o.rho.ext_zero();
  r["checks"] = checks;
  return r;
}

KnAlgebra deformation(const Context& c, const Algebra& a) {
  const std::size_t n = c.m.settings.deformation_order;
  const ExtensionDecl* x = extension_param(c);
  if (!x) return KnAlgebra::trivial(a, n);
  const ExtensionDatum& e = algebra_extension(*x);
  if (!(e.module() == regular_bimodule(e.base())))
    throw PreconditionFailed("a deformation needs an extension by the regular bimodule");
  return defn_lift(e, n);
}

const Algebra& diffop_algebra(const Context& c, std::string& name) {
  if (const ExtensionDecl* x = extension_param(c)) {
    name = c.m.bimodule_over.at(x->bimodule);
    return *c.m.algebra(name);
  }
  name = param(c, "algebra").value_or(first_name(c.m.algebras, "algebra"));
  return *c.m.algebra(name);
}

Json run_diffop(const Context& c) {
  std::string name;
  const Algebra& a = diffop_algebra(c, name);
  DiffOpFiltration d = diffops(a, c.order_cap);
  KnAlgebra b = deformation(c, a);
  GradedDiffMap g = gamma(b, c.order_cap);
  GammaCheck gc = gamma_iso_check(g);
  KnCompatReport kc = kn_compat_check(a, b.order(), c.order_cap);
  Json r;
  r["algebra"] = name;
  r["dims"] = d.dims();
  r["stabilized"] = d.stabilized;
  r["stable_order"] = d.top_order();
  r["deformation"] = param(c, "extension").value_or("trivial");
  r["deformation_order"] = b.order();
  r["gamma"] = {{"source_dims", g.source_dims},
                {"ranks", g.ranks},
                {"target_dim", g.target_dim},
                {"outcome", gc.outcome},
                {"injective", gc.injective},
                {"surjective", gc.surjective}};
  Json rows = Json::array();
  for (const auto& row : kc.rows) rows.push_back({{"order", row.order}, {"lhs", row.lhs}, {"rhs", row.rhs}});
  r["kn_compat"] = rows;
  Json checks = {{"gamma_lands_in_target", g.lands_in_target}, {"gamma_not_one_sided", gc.injective == gc.surjective}};
  if (kc.stabilized) checks["kn_compat_factor"] = kc.pass();
  r["checks"] = checks;
  return r;
}

Json run_induced(const Context& c) {
  std::string name;
  const Algebra& a = diffop_algebra(c, name);
  KnAlgebra b = deformation(c, a);
  InducedDeformation d = induced_deformation(b, c.order_cap);
  Triviality t = kn_triviality(d.algebra);
  Json r;
  r["algebra"] = name;
  r["deformation"] = param(c, "extension").value_or("trivial");
  r["deformation_order"] = b.order();
  r["diffop_dim"] = d.reference_ops.size();
  r["induced_dim"] = d.algebra.total().dim();
  r["induced_trivial"] = t.decided ? Json(t.trivial) : Json(nullptr);
  r["triviality_method"] = t.method;
  Json checks;
  if (t.section) {
    FreenessReport f = freeness_check(b, d, *t.section);
    RingComparison rc = diffop_ring_comparison(b, d, *t.section, c.order_cap);
    r["ring_comparison"] = {{"dim_b", rc.dim_b}, {"dim_tilde", rc.dim_tilde}, {"dim_sum", rc.dim_sum}, {"stabilized", rc.stabilized}};
    checks["section_multiplicative"] = f.section_multiplicative;
    checks["beta_linear"] = f.beta_linear;
    checks["freeness_invertible"] = f.invertible;
    checks["module_iso"] = f.module_iso;
    if (rc.stabilized) checks["rings_equal"] = rc.equal();
  }
  r["checks"] = checks;
  return r;
}

Json run_selftest(const Context& c) {
  if (!c.opt.selftest) throw PreconditionFailed("selftest is not available in this build");
  Json s = c.opt.selftest(c.opt.seed);
  Json r;
  r["seed"] = c.opt.seed;
  r["criteria"] = s.at("criteria");
  r["checks"] = {{"acceptance", s.at("passed").get<bool>()}};
  return r;
}

Json dispatch(const Context& c) {
  const std::string& n = c.cmd.name;
  if (n == "hochschild") return run_hochschild(c);
  if (n == "exal") return run_exal(c);
  if (n == "nerve") return run_nerve(c);
  if (n == "cech") return run_cech(c);
  if (n == "gs") return run_gs(c);
  if (n == "les") return run_les(c);
  if (n == "obstruct") return run_obstruct(c);
  if (n == "diffop") return run_diffop(c);
  if (n == "induced") return run_induced(c);
  if (n == "selftest") return run_selftest(c);
  throw PreconditionFailed("unknown command '" + n + "'");
}

bool all_checks(const Json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "checks") {
        for (const auto& v : *it)
          if (v.is_boolean() && !v.get<bool>()) return false;
      } else if (!all_checks(*it)) {
        return false;
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j)
      if (!all_checks(v)) return false;
  }
  return true;
}

}  // namespace

Json run(const Manifest& m, const std::string& command, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  static const std::vector<std::string> known = {"hochschild", "exal", "nerve",   "cech",    "gs",
                                                 "les",        "obstruct", "diffop", "induced", "selftest"};
  if (std::find(known.begin(), known.end(), command) == known.end())
    throw PreconditionFailed("unknown command '" + command + "'");
  std::vector<CommandDecl> entries;
  for (const auto& c : m.commands)
    if (c.name == command) entries.push_back(c);
  if (entries.empty()) entries.push_back(CommandDecl{command, {}, 0});

  Json report;
  report["command"] = command;
  report["field"] = m.settings.field.name();
  const int degree_cap = options.degree_cap.value_or(m.settings.degree_cap);
  const std::size_t order_cap = options.order_cap.value_or(m.settings.order_cap);
  report["degree_cap"] = degree_cap;
  report["order_cap"] = order_cap;
  Json results = Json::array();
  for (const auto& e : entries) {
    Context c{m, options, e, degree_cap, order_cap, m.settings.size_cap};
    Json r = dispatch(c);
    if (!e.params.empty()) r["params"] = e.params;
    results.push_back(std::move(r));
  }
  report["results"] = results;
  report["checks_passed"] = all_checks(results);
  const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  report["wall_time_seconds"] = took.count();
  return report;
}

bool checks_passed(const Json& report) { return report.contains("checks_passed") && report["checks_passed"].get<bool>(); }

}  // namespace hochdef
