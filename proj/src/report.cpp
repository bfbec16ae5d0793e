#include "mspec/report.hpp"

#include "mspec/asymptotics.hpp"
#include "mspec/levels.hpp"
#include "mspec/multicone.hpp"
#include "mspec/restriction.hpp"
#include "mspec/semigroup.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <cmath>
#include <regex>
#include <sstream>

#ifndef MSPEC_FIXTURE_DIR
#define MSPEC_FIXTURE_DIR "fixtures"
#endif

namespace mspec {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

json pairs_json(const GenSet& s) {
    json out = json::array();
    for (const auto& p : s) out.push_back(p.str());
    return out;
}

json mono_map(const std::map<int, Monomial>& m) {
    json out = json::object();
    for (const auto& [k, f] : m) out[std::to_string(k)] = f.pretty();
    return out;
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);)
        if (!trim(line).empty()) out.push_back(line);
    return out;
}

// option helpers: a wrong type is an input error of the report layer
template <class T>
T opt(const json& o, const std::string& key, const T& fallback) {
    if (!o.contains(key) || o.at(key).is_null()) return fallback;
    try {
        return o.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError("option \"" + key + "\" has the wrong type", "options");
    }
}

Vec q_vector(const json& j, const std::string& key) {
    Vec out;
    if (j.is_string()) {
        for (const auto& s : split_list(j.get<std::string>())) out.push_back(parse_q(s));
        return out;
    }
    if (!j.is_array()) throw InputError("option \"" + key + "\" must be a list", "options");
    for (const auto& x : j) out.push_back(x.is_string() ? parse_q(x.get<std::string>()) : parse_q(x.dump()));
    return out;
}

IndexVec index_vector(const Scenario& sc) {
    IndexVec N;
    if (sc.options.contains("N")) {
        for (const auto& q : q_vector(sc.options.at("N"), "N")) {
            if (!is_integer(q)) throw InputError("N must be integral", "options");
            N.push_back(to_ll(num(q)));
        }
    } else {
        N.assign(static_cast<size_t>(sc.d.ell), 2);
    }
    return N;
}

std::string linear_str(const Vec& coeffs) {
    std::string lin;
    for (size_t j = 0; j < coeffs.size(); ++j) {
        const Q& c = coeffs[j];
        if (c == 0) continue;
        const Q mag = c < 0 ? Q(-c) : c;
        lin += lin.empty() ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
        lin += (mag == 1 ? "" : q_str(mag) + "*") + "n" + std::to_string(j + 1);
    }
    return lin.empty() ? "0" : lin;
}

// plain-text notation to LaTeX, one line at a time
std::string to_latex(std::string s) {
    static const std::vector<std::pair<std::regex, std::string>> rules = {
        {std::regex(R"(\|xi(\d+)\|)"), R"(|\xi^{($1)}|)"},
        {std::regex(R"(\|z(\d+)\|)"), R"(|z^{($1)}|)"},
        {std::regex(R"(\|a(\d+)\|)"), R"(|\alpha^{($1)}|)"},
        {std::regex(R"(\bz(\d+) in W(\d+))"), R"(z^{($1)} \in W_{$2})"},
        {std::regex(R"(\bt(\d+)\b)"), R"(\tau_{$1})"},
        {std::regex(R"(\bl(\d+)\b)"), R"(\lambda_{$1})"},
        {std::regex(R"(\bn(\d+)\b)"), R"(n_{$1})"},
        {std::regex(R"(\beps0\b)"), R"(\varepsilon_0)"},
        {std::regex(R"(\beps\b)"), R"(\varepsilon)"},
        {std::regex(R"(\^\(([^()]*)\))"), R"(^{$1})"},
        {std::regex(R"(\^(-?\d+))"), R"(^{$1})"},
        {std::regex(R"(<=)"), R"(\le)"},
        {std::regex(R"(\bmax\b)"), R"(\max)"},
        {std::regex(R"(\bmin\b)"), R"(\min)"},
        {std::regex(R"(\*)"), R"(\,)"},
    };
    for (const auto& [re, rep] : rules) s = std::regex_replace(s, re, rep);
    return "$" + s + "$";
}

std::string module_of(const std::string& command) {
    static const std::map<std::string, std::string> mods = {
        {"analyze", "cli-report"},          {"pipeline", "semigroup-engine"},
        {"levels", "level-functions"},      {"multicone", "multicone-geometry"},
        {"closure", "multicone-geometry"},  {"project", "multicone-geometry"},
        {"probe", "multicone-geometry"},    {"restrict", "restriction-analyzer"},
        {"expand", "asymptotics"},          {"map-check", "asymptotics"},
        {"classify2", "asymptotics"},       {"verify", "asymptotics"},
        {"model", "deformation-model"},
    };
    auto it = mods.find(command);
    return it == mods.end() ? "cli-report" : it->second;
}

// --- command builders ---

Model model_of(const Scenario& sc) { return Model::make(sc.d, sc.p); }

json header(const std::string& command, const Scenario& sc) {
    return {{"command", command}, {"deformation", to_json(sc.d)}, {"point", to_json(sc.p)}};
}

Report cmd_model(const Scenario& sc) {
    Report r;
    r.doc = header("model", sc);
    const Model md = model_of(sc);
    r.doc["action"] = to_string(classify_action(sc.d));
    r.doc["rank"] = md.r.L;
    r.doc["sigma"] = q_str(md.r.sigma);
    r.doc["basis_rows"] = md.r.basis_rows;
    r.doc["basis_cols"] = md.r.basis_cols;
    r.doc["phi"] = mono_map(md.dm.phi);
    r.doc["phi_inv"] = mono_map(md.dm.phi_inv);
    r.doc["psi"] = mono_map(md.dm.psi);
    r.doc["fixed_point"] = is_fixed_point(sc.d, sc.p);
    json bundle = json::array();
    try {
        for (const auto& b : bundle_decomposition(sc.d)) bundle.push_back(b.text);
        r.doc["bundle"] = bundle;
    } catch (const InputError& e) {
        r.doc["bundle"] = nullptr;
        r.text.push_back(std::string("no bundle decomposition: ") + e.what());
    }
    if (!sc.d.warnings.empty()) r.doc["warnings"] = sc.d.warnings;

    r.text.push_back("A = " + matrix_str(sc.d.A));
    r.text.push_back("action: " + r.doc["action"].get<std::string>() + ", rank " + std::to_string(md.r.L) +
                     ", sigma " + q_str(md.r.sigma));
    for (const auto& [k, f] : md.dm.phi) r.text.push_back("phi" + std::to_string(k) + " = " + f.pretty());
    for (const auto& [j, f] : md.dm.phi_inv) r.text.push_back("phi_inv" + std::to_string(j) + " = " + f.pretty());
    for (const auto& [k, f] : md.dm.psi) r.text.push_back("psi" + std::to_string(k) + " = " + f.pretty());
    for (const auto& b : bundle) r.text.push_back("bundle: " + b.get<std::string>());
    for (const auto& [k, f] : md.dm.phi)
        r.latex.push_back(to_latex("phi" + std::to_string(k) + " = " + f.pretty()));
    return r;
}

Report cmd_pipeline(const Scenario& sc) {
    Report r = cmd_model(sc);
    r.doc["command"] = "pipeline";
    const Model md = model_of(sc);
    const PipelineResult pr = run_pipeline(md);
    r.doc["G"] = pairs_json(pr.G);
    json f0 = json::array(), fs = json::array();
    for (const auto& [lam, s] : pr.F0_stages) f0.push_back({{"lambda", lam}, {"set", pairs_json(s)}});
    for (const auto& [k, s] : pr.F_stages) fs.push_back({{"block", k}, {"set", pairs_json(s)}});
    r.doc["F0_stages"] = f0;
    r.doc["F_stages"] = fs;
    r.doc["F0"] = pairs_json(pr.F0);
    r.doc["Fq"] = pairs_json(pr.Fq);
    r.doc["q"] = pr.q;

    r.text.push_back("G = " + genset_str(pr.G));
    for (const auto& [lam, s] : pr.F0_stages)
        r.text.push_back("after eliminating l" + std::to_string(lam) + ": " + genset_str(s));
    for (const auto& [k, s] : pr.F_stages) r.text.push_back("after block " + std::to_string(k) + ": " + genset_str(s));
    r.text.push_back("F0 = " + genset_str(pr.F0));
    r.text.push_back("Fq = " + genset_str(pr.Fq) + "  (q = " + std::to_string(pr.q) + ")");
    r.latex.push_back(to_latex("G = " + genset_str(pr.G)));
    r.latex.push_back(to_latex("F^q = " + genset_str(pr.Fq)));
    return r;
}

json levels_json(const LevelFamily& fam, const Deformation& d, std::vector<std::string>& text,
                 std::vector<std::string>& latex, const std::string& label) {
    json rho = json::object(), strict = json::object();
    for (int j = 1; j <= fam.ell; ++j) {
        const std::string key = std::to_string(j);
        rho[key] = fam.rho(j).str();
        const bool s = is_strict(fam, d, j);
        strict[key] = s;
        text.push_back(label + key + " = " + fam.rho(j).str() + (s ? "" : "   (not strict)"));
        latex.push_back(to_latex(label + key + " = " + fam.rho(j).str()));
    }
    return {{"rho", rho}, {"strict", strict}};
}

Report cmd_levels(const Scenario& sc) {
    Report r;
    r.doc = header("levels", sc);
    const Model md = model_of(sc);
    const PipelineResult pr = run_pipeline(md);
    const LevelFamily fam = build_levels(md, pr);
    json body = levels_json(fam, sc.d, r.text, r.latex, "rho");
    r.doc["rho"] = body["rho"];
    r.doc["strict"] = body["strict"];
    json stages = json::object();
    for (const auto& [j, e] : fam.rho_stages) {
        stages[std::to_string(j)] = {{"rho", e.str()}, {"lower_set", pairs_json(fam.lower_sets.at(j))}};
        r.text.push_back("stage " + std::to_string(j) + ": " + e.str() + " from " + genset_str(fam.lower_sets.at(j)));
    }
    r.doc["stages"] = stages;
    if (opt<bool>(sc.options, "hat", false)) {
        const LevelFamily hat = build_generalized_levels(sc.d, sc.p);
        json h = levels_json(hat, sc.d, r.text, r.latex, "rho_hat");
        h["orders"] = hat.permutations.size();
        r.doc["hat"] = h;
    }
    return r;
}

MulticoneSystem system_of(const Scenario& sc, const Model& md, const PipelineResult& pr) {
    const std::string mode = opt<std::string>(sc.options, "eps_mode", "single");
    if (mode != "single" && mode != "per-pair") throw InputError("eps_mode is single or per-pair", "options");
    MulticoneSystem s = build_multicone(md, pr, mode == "single" ? EpsMode::Single : EpsMode::PerPair);
    if (opt<bool>(sc.options, "one_sided", false)) s = to_one_sided(s);
    return s;
}

void put_system(Report& r, const MulticoneSystem& s) {
    json rows = json::array();
    for (const auto& q : s.inequalities) rows.push_back(inequality_str(q));
    r.doc["system"] = rows;
    r.doc["one_sided"] = s.one_sided;
    r.doc["eps_mode"] = s.eps_mode == EpsMode::Single ? "single" : "per-pair";
    r.doc["removed"] = s.removed;
    r.doc["text"] = system_str(s);
    for (const auto& line : lines_of(system_str(s))) {
        r.text.push_back(line);
        r.latex.push_back(to_latex(line));
    }
}

Report cmd_multicone(const Scenario& sc) {
    Report r;
    r.doc = header("multicone", sc);
    const Model md = model_of(sc);
    const PipelineResult pr = run_pipeline(md);
    r.doc["Fq"] = pairs_json(pr.Fq);
    put_system(r, system_of(sc, md, pr));
    return r;
}

Report cmd_project(const Scenario& sc) {
    Report r;
    r.doc = header("project", sc);
    const Model md = model_of(sc);
    const PipelineResult pr = run_pipeline(md);
    MulticoneSystem s = to_one_sided(system_of(sc, md, pr));
    if (!sc.options.contains("drop")) throw InputError("project needs the option \"drop\"", "options");
    std::vector<int> drops;
    if (sc.options.at("drop").is_array()) drops = opt<std::vector<int>>(sc.options, "drop", {});
    else drops.push_back(opt<int>(sc.options, "drop", 0));
    for (int k : drops) s = project(s, k, opt<bool>(sc.options, "zero", sc.p.is_zero(k)));
    put_system(r, s);
    return r;
}

BlockPoint point_option(const Scenario& sc, const std::string& key) {
    BlockPoint z;
    for (const auto& q : q_vector(sc.options.at(key), key)) z.norms.push_back(to_double(q));
    if (static_cast<int>(z.norms.size()) != sc.d.m)
        throw InputError("option \"" + key + "\" needs one norm per block", "options");
    return z;
}

Report cmd_closure(const Scenario& sc) {
    Report r;
    r.doc = header("closure", sc);
    const Model md = model_of(sc);
    const PipelineResult pr = run_pipeline(md);
    const ClosureSystem c = closure(md, pr, opt<size_t>(sc.options, "cap", 10000));
    json rows = json::array();
    for (const auto& q : c.inequalities) {
        rows.push_back(closed_inequality_str(q));
        r.text.push_back(closed_inequality_str(q));
        r.latex.push_back(to_latex(closed_inequality_str(q)));
    }
    r.doc["Fq"] = pairs_json(c.Fq);
    r.doc["elements"] = c.K.size();
    r.doc["system"] = rows;
    if (sc.options.contains("point")) {
        EpsValues eps;
        eps.eps = eps.eps0 = opt<double>(sc.options, "eps", 0.1);
        const bool in = member_closed(c, point_option(sc, "point"), eps);
        r.doc["member"] = in;
        r.text.push_back(std::string("point ") + (in ? "lies in" : "is outside") + " the closure");
    }
    return r;
}

Report cmd_restrict(const Scenario& sc) {
    Report r;
    r.doc = header("restrict", sc);
    if (!sc.options.contains("beta")) throw InputError("restrict needs the option \"beta\"", "options");
    const Vec beta = q_vector(sc.options.at("beta"), "beta");
    const Model md = model_of(sc);
    const RestrictionVerdict v = check_restriction(md, beta);
    json b = json::array();
    for (const auto& x : beta) b.push_back(q_str(x));
    r.doc["beta"] = b;
    r.doc["case"] = to_string(v.kase);
    r.doc["holds"] = v.holds;
    json ws = json::array();
    for (const auto& w : v.witnesses)
        ws.push_back({{"pair", w.pair.str()}, {"log", q_str(w.log_value)}, {"condition", w.condition}});
    r.doc["witnesses"] = ws;
    r.doc["conditions"] = v.citations;
    json bv = json::object();
    for (const auto& [k, x] : v.b_values) bv[std::to_string(k)] = q_str(x);
    r.doc["b_values"] = bv;
    r.doc["failed_columns"] = v.failed_columns;
    r.doc["cone_sufficient"] = v.cone_sufficient;
    if (v.kase == RestrictionCase::RankPlusOne) {
        r.doc["pivot"] = v.pivot;
        r.doc["phi_inv_B"] = mono_map(v.phi_inv_B);
        r.doc["psi_B"] = mono_map(v.psi_B);
    }
    r.doc["no_unit_pairs"] = v.no_unit_pairs;
    r.doc["Fq_A"] = pairs_json(v.Fq);
    const Model mb = restricted_model(md, beta);
    r.doc["Fq_B"] = pairs_json(run_pipeline(mb).Fq);

    r.text.push_back("beta = (" + join(b.get<std::vector<std::string>>(), ", ") + "), " + to_string(v.kase));
    r.text.push_back("Fq(A) = " + genset_str(v.Fq));
    r.text.push_back(v.holds ? "the restriction condition holds" : "the restriction condition fails");
    static const std::map<std::string, std::string> words = {
        {kZeroValueSign, "a pair with value 0 needs log f(e^beta) >= 0"},
        {kUnitValueBalance, "a pair with nonzero value needs log f(e^beta) = 0"},
        {kFreeColumnExponent, "every column off the pivot needs b = 0"},
    };
    for (const auto& w : v.witnesses) {
        auto it = words.find(w.condition);
        r.text.push_back("  " + w.pair.str() + ": log = " + q_str(w.log_value) + "; " +
                         (it == words.end() ? w.condition : it->second));
    }
    for (int k : v.failed_columns) r.text.push_back("  column " + std::to_string(k) + " has b != 0");
    return r;
}

Report cmd_probe(const Scenario& sc) {
    Report r;
    r.doc = header("probe", sc);
    if (!sc.options.contains("set")) throw InputError("probe needs the option \"set\"", "options");
    const Model md = model_of(sc);
    const PointSet Z = PointSet::parse(opt<std::string>(sc.options, "set", ""), sc.d.m);
    auto doubles = [&](const std::string& key, std::vector<double> fallback) {
        if (!sc.options.contains(key)) return fallback;
        std::vector<double> out;
        for (const auto& q : q_vector(sc.options.at(key), key)) out.push_back(to_double(q));
        return out;
    };
    const auto dir = opt<std::vector<int>>(sc.options, "direction", {});
    const auto res = normal_cone_probe(md, Z, dir, doubles("eps", {0.5, 0.1, 0.01}), doubles("balls", {0.5, 0.1}),
                                       opt<int>(sc.options, "samples", 4000), opt<std::uint64_t>(sc.options, "seed", 1));
    r.doc["verdict"] = to_string(res.verdict);
    r.doc["eps"] = res.eps;
    r.doc["radius"] = res.radius;
    r.doc["hits"] = res.hits;
    r.doc["z_samples"] = res.z_samples;
    r.text.push_back("verdict: " + to_string(res.verdict));
    std::ostringstream os;
    os << "eps " << res.eps << ", radius " << res.radius << ", hits " << res.hits << " of " << res.z_samples;
    r.text.push_back(os.str());
    return r;
}

Report cmd_expand(const Scenario& sc) {
    Report r;
    r.doc = header("expand", sc);
    const IndexVec N = index_vector(sc);
    r.doc["N"] = N;
    json cons = json::object();
    for (const auto& J : nonempty_subsets(sc.d.ell)) {
        cons[set_str(J)] = index_constraints(sc.d, J);
        r.text.push_back("T_" + set_str(J) + ": " + join(index_constraints(sc.d, J), ", "));
        r.latex.push_back(to_latex(join(index_constraints(sc.d, J), ",\\ ")));
    }
    r.doc["constraints"] = cons;
    const AppTemplate t = app_template(sc.d, N);
    r.doc["template"] = t.str();
    r.doc["template_terms"] = t.terms.size();
    r.text.push_back("App = " + t.str());

    // the remainder needs the level family at the point
    try {
        const Model md = model_of(sc);
        const LevelFamily fam = build_levels(md);
        const auto forms = remainder_linear_forms(fam, sc.d.m);
        const Q sigma = sigma_of(sc.d.A);
        json ex = json::object(), coeffs = json::object();
        for (const auto& [k, v] : forms) {
            Vec scaled;
            json c = json::array();
            for (const auto& x : v) {
                scaled.push_back(x / sigma);
                c.push_back(q_str(x / sigma));
            }
            ex[std::to_string(k)] = linear_str(scaled);
            coeffs[std::to_string(k)] = c;
        }
        r.doc["remainder"] = remainder_symbolic(fam, sc.d);
        r.doc["remainder_exponents"] = ex;
        r.doc["remainder_coefficients"] = coeffs;
        r.text.push_back("remainder: " + remainder_symbolic(fam, sc.d));
        r.latex.push_back(to_latex(remainder_symbolic(fam, sc.d)));
    } catch (const InputError& e) {
        r.doc["remainder"] = nullptr;
        r.doc["remainder_note"] = e.what();
        r.text.push_back(std::string("remainder: not available (") + e.what() + ")");
    }

    if (sc.options.contains("function")) {
        const BlockPoly f = BlockPoly::parse(opt<std::string>(sc.options, "function", ""));
        const BlockPoly a = app(sc.d, N, family_from_function(f, sc.d));
        r.doc["function"] = f.str();
        r.doc["app"] = a.str();
        r.doc["difference"] = (f - a).str();
        r.text.push_back("f = " + f.str());
        r.text.push_back("App(f) = " + a.str());
        r.text.push_back("f - App(f) = " + (f - a).str());
    }
    return r;
}

Deformation target_of(const json& j) {
    if (j.is_string()) return Deformation::make(parse_matrix_text(j.get<std::string>()));
    if (j.is_array()) return deformation_from_json(json{{"A", j}});
    return deformation_from_json(j);
}

Report cmd_map_check(const Scenario& sc) {
    Report r;
    r.doc = header("map-check", sc);
    if (!sc.options.contains("target") || !sc.options.contains("map"))
        throw InputError("map-check needs the options \"target\" and \"map\"", "options");
    PolyMapSpec spec{sc.d, target_of(sc.options.at("target")), {}};
    const auto comps = opt<std::vector<std::string>>(sc.options, "map", {});
    std::vector<Coord> coords;
    for (int k = 1; k <= spec.target.m; ++k)
        for (int i = 1; i <= spec.target.block_dims[static_cast<size_t>(k - 1)]; ++i) coords.push_back({k, i});
    if (comps.size() != coords.size())
        throw InputError("the map needs " + std::to_string(coords.size()) + " components", "options");
    for (size_t i = 0; i < coords.size(); ++i) spec.components[coords[i]] = BlockPoly::parse(comps[i]);
    const MapCheck mc = check_map(spec);
    r.doc["target"] = to_json(spec.target);
    r.doc["ok"] = mc.ok;
    r.doc["reason"] = mc.reason;
    json induced = json::object();
    for (const auto& [c, p] : mc.induced) induced[coord_name(c, "x")] = p.str("x");
    r.doc["induced"] = induced;
    r.text.push_back(mc.ok ? "the map is a morphism of the deformations" : "the map is not compatible: " + mc.reason);
    for (const auto& [c, p] : mc.induced) r.text.push_back("  " + coord_name(c, "x") + " -> " + p.str("x"));
    return r;
}

Report cmd_classify2(const Scenario& sc) {
    Report r;
    r.doc = header("classify2", sc);
    const TwoManifoldCase c = classify_two_manifolds(sc.d.A);
    r.doc["case"] = to_json(c);
    if (!c.in_catalog) {
        r.text.push_back(c.message);
        return r;
    }
    r.text.push_back("case " + c.label + ", normal form " + matrix_str(c.catalog_matrix));
    for (const auto& line : lines_of(c.system)) {
        r.text.push_back(line);
        r.latex.push_back(to_latex(line));
    }
    for (const auto& s : c.constraints) r.text.push_back("index set: " + s);
    r.text.push_back("remainder: " + c.remainder);
    r.latex.push_back(to_latex(c.remainder));
    return r;
}

Report cmd_verify(const Scenario& sc) {
    Report r;
    r.doc = header("verify", sc);
    if (!sc.options.contains("function")) throw InputError("verify needs the option \"function\"", "options");
    const BlockPoly f = BlockPoly::parse(opt<std::string>(sc.options, "function", ""));
    const IndexVec N = index_vector(sc);
    const Model md = model_of(sc);
    const EstimateReport e = verify_estimate(md, f, N, opt<double>(sc.options, "eps", 0.1),
                                             opt<int>(sc.options, "samples", 400),
                                             opt<std::uint64_t>(sc.options, "seed", 1));
    r.doc["function"] = f.str();
    r.doc["N"] = N;
    r.doc["pass"] = e.pass;
    r.doc["exact"] = e.exact;
    r.doc["samples"] = e.samples;
    r.doc["C_fit"] = e.C_fit;
    r.doc["C_half"] = e.C_half;
    r.doc["M_fit"] = e.M_fit;
    r.doc["M_pushed"] = e.M_pushed;
    r.doc["max_violation"] = e.max_violation;
    r.text.push_back(std::string(e.pass ? "PASS" : "FAIL") + ": f = " + f.str());
    if (e.exact) {
        r.text.push_back("f - App vanishes identically");
    } else {
        std::ostringstream os;
        os << "C(eps) = " << e.C_fit << ", C(eps/2) = " << e.C_half << ", majorant " << e.M_fit << " -> "
           << e.M_pushed << ", worst ratio " << e.max_violation;
        r.text.push_back(os.str());
    }
    return r;
}

Report cmd_analyze(const Scenario& sc) {
    Report r = cmd_pipeline(sc);
    r.doc["command"] = "analyze";
    auto section = [&](const std::string& key, Report (*fn)(const Scenario&)) {
        try {
            Report sub = fn(sc);
            json body = sub.doc;
            for (const char* k : {"command", "deformation", "point"}) body.erase(k);
            r.doc[key] = body;
            r.text.push_back("");
            r.text.push_back("[" + key + "]");
            r.text.insert(r.text.end(), sub.text.begin(), sub.text.end());
            r.latex.insert(r.latex.end(), sub.latex.begin(), sub.latex.end());
        } catch (const InputError& e) {
            r.doc[key] = {{"unavailable", e.what()}, {"rule", e.where}};
            r.text.push_back("");
            r.text.push_back("[" + key + "] unavailable: " + e.what());
        }
    };
    section("levels", cmd_levels);
    section("multicone", cmd_multicone);
    section("expand", cmd_expand);
    return r;
}

using Builder = Report (*)(const Scenario&);

const std::map<std::string, Builder>& builders() {
    static const std::map<std::string, Builder> b = {
        {"analyze", cmd_analyze},     {"model", cmd_model},       {"pipeline", cmd_pipeline},
        {"levels", cmd_levels},       {"multicone", cmd_multicone}, {"closure", cmd_closure},
        {"project", cmd_project},     {"restrict", cmd_restrict}, {"probe", cmd_probe},
        {"expand", cmd_expand},       {"map-check", cmd_map_check}, {"classify2", cmd_classify2},
        {"verify", cmd_verify},
    };
    return b;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, sep))
        if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

Matrix parse_matrix_text(const std::string& text) {
    Matrix A;
    for (const auto& row : split_list(text, ';')) {
        Vec r;
        for (const auto& x : split_list(row, ',')) r.push_back(parse_q(x));
        A.push_back(r);
    }
    if (A.empty()) throw InputError("empty matrix", "matrix");
    return A;
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw InputError("a scenario is a JSON object", "json");
    if (!j.contains("deformation")) throw InputError("missing field \"deformation\"", "json");
    Scenario sc;
    try {
        const json& d = j.at("deformation");
        sc.d = d.is_string() ? Deformation::make(parse_matrix_text(d.get<std::string>())) : deformation_from_json(d);
        if (j.contains("point")) sc.p = point_from_json(j.at("point"));
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed scenario: ") + e.what(), "json");
    }
    if (j.contains("options")) {
        if (!j.at("options").is_object()) throw InputError("\"options\" must be an object", "json");
        sc.options = j.at("options");
    }
    return sc;
}

json to_json(const Scenario& s) {
    return {{"deformation", to_json(s.d)}, {"point", to_json(s.p)}, {"options", s.options}};
}

Format parse_format(const std::string& name) {
    if (name == "text") return Format::Text;
    if (name == "json") return Format::Json;
    if (name == "latex") return Format::Latex;
    throw InputError("unknown format '" + name + "' (text, json or latex)", "format");
}

json error_json(const CommandError& e) {
    return {{"error", {{"module", e.module}, {"rule", e.rule}, {"message", e.what()}}}};
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [k, v] : builders()) out.push_back(k);
        return out;
    }();
    return names;
}

Report run_command(const std::string& command, const Scenario& sc) {
    auto it = builders().find(command);
    if (it == builders().end()) throw CommandError("unknown command '" + command + "'", "cli-report", "command");
    try {
        return it->second(sc);
    } catch (const CommandError&) {
        throw;
    } catch (const InputError& e) {
        throw CommandError(e.what(), module_of(command), e.where.empty() ? "input" : e.where);
    } catch (const json::exception& e) {
        throw CommandError(e.what(), "cli-report", "options");
    } catch (const std::invalid_argument& e) {
        throw CommandError(e.what(), "exact-monomials", "number");
    }
}

std::string render(const Report& r, Format f) {
    switch (f) {
        case Format::Json: return r.doc.dump(2) + "\n";
        case Format::Latex: {
            std::string out;
            for (const auto& l : r.latex) out += l + "\n";
            return out;
        }
        case Format::Text: break;
    }
    std::string out;
    for (const auto& l : r.text) out += l + "\n";
    return out;
}

// --- fixtures ---

std::string default_fixture_dir() { return MSPEC_FIXTURE_DIR; }

std::vector<FixtureCase> load_fixtures(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<FixtureCase> out;
    if (!fs::is_directory(dir)) return out;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::ifstream in(path);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw InputError(path.filename().string() + ": " + e.what(), "json");
        }
        if (!doc.is_array()) throw InputError(path.filename().string() + ": expected an array of cases", "json");
        for (const auto& c : doc) {
            FixtureCase fc;
            fc.file = path.filename().string();
            fc.name = c.value("name", "");
            fc.group = c.value("group", path.stem().string());
            fc.command = c.value("command", "analyze");
            fc.scenario = c.value("scenario", json::object());
            fc.expect = c.value("expect", json::array());
            out.push_back(std::move(fc));
        }
    }
    return out;
}

std::vector<FixtureCase> filter_fixtures(const std::vector<FixtureCase>& all, const std::string& filter) {
    if (filter.empty()) return all;
    std::vector<FixtureCase> out;
    for (const auto& c : all)
        if (c.group == filter || c.name.find(filter) != std::string::npos) out.push_back(c);
    return out;
}

namespace {

GenPair parse_pair(const std::string& text) {
    std::string s = trim(text);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw InputError("pair must be '(f, v)': " + text, "fixture");
    s = s.substr(1, s.size() - 2);
    const size_t comma = s.rfind(',');
    if (comma == std::string::npos) throw InputError("pair must be '(f, v)': " + text, "fixture");
    const Monomial f = parse_monomial(trim(s.substr(0, comma)));
    const std::string v = trim(s.substr(comma + 1));
    if (v == "0") return {f, Value::zero()};
    static const std::regex xi(R"(\|xi(\d+)\|)");
    return {f, Value::of(parse_monomial(std::regex_replace(v, xi, "x$1")))};
}

GenSet parse_pairs(const json& arr, bool modulo_unit) {
    GenSet out;
    for (const auto& s : arr) out.insert(parse_pair(s.get<std::string>()));
    if (modulo_unit) out.erase(GenPair{Monomial{}, Value::unit()});
    return out;
}

LevelExpr canonical_level(const std::string& s) { return absorb_factors(parse_level(s)); }

// Products of two extrema have no single canonical shape, so unequal forms are compared
// as functions: piecewise monomial, hence equal everywhere once equal on a dense sample.
bool same_level(const std::string& a, const std::string& b) {
    const LevelExpr x = canonical_level(a), y = canonical_level(b);
    if (x == y) return true;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> exponent(-6.0, 6.0);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> tau(12);
        for (auto& t : tau) t = std::pow(10.0, exponent(rng));
        const double u = evaluate_level(x, tau), v = evaluate_level(y, tau);
        if (std::abs(u - v) > 1e-9 * std::max(std::abs(u), std::abs(v))) return false;
    }
    return true;
}

CheckResult check_one(const json& e, const json& doc, const FixtureCase& c) {
    CheckResult r;
    r.path = e.value("path", "");
    r.kind = e.value("kind", "equals");
    const json want = e.value("value", json());
    json got;
    if (r.kind != "witness") {
        try {
            got = doc.at(json::json_pointer(r.path));
        } catch (const json::exception&) {
            r.detail = "path missing from the report";
            return r;
        }
    }
    if (r.kind == "equals") {
        r.ok = got == want;
        if (!r.ok) r.detail = "got " + got.dump() + ", want " + want.dump();
    } else if (r.kind == "strings") {
        auto a = got.get<std::vector<std::string>>(), b = want.get<std::vector<std::string>>();
        if (e.value("modulo_eps_power", false)) {
            // eps^k from clearing fractional exponents is the same family of sets as eps
            static const std::regex power(R"(eps\^\d+)");
            for (auto& x : a) x = std::regex_replace(x, power, "eps");
            for (auto& x : b) x = std::regex_replace(x, power, "eps");
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        r.ok = a == b;
        if (!r.ok) r.detail = "got " + json(a).dump() + ", want " + json(b).dump();
    } else if (r.kind == "contains") {
        const auto a = got.get<std::vector<std::string>>();
        for (const auto& x : want.get<std::vector<std::string>>())
            if (std::find(a.begin(), a.end(), x) == a.end()) r.detail += (r.detail.empty() ? "missing " : ", ") + x;
        r.ok = r.detail.empty();
    } else if (r.kind == "pairs") {
        const bool mod = e.value("modulo_unit", false);
        const GenSet a = parse_pairs(got, mod), b = parse_pairs(want, mod);
        r.ok = a == b;
        if (!r.ok) r.detail = "got " + genset_str(a) + ", want " + genset_str(b);
    } else if (r.kind == "level") {
        r.ok = same_level(got.get<std::string>(), want.get<std::string>());
        if (!r.ok) r.detail = "got " + got.get<std::string>() + ", want " + want.get<std::string>();
    } else if (r.kind == "witness") {
        // a failing pair given in another but equal form: reported outright, or a G-semigroup
        // member of A with negative log, and in either case outside the radical of Fq(B)
        const Scenario sc = scenario_from_json(c.scenario);
        const Vec beta = q_vector(sc.options.at("beta"), "beta");
        const Model md = model_of(sc);
        const GenPair w = parse_pair(want.get<std::string>());
        const RestrictionVerdict v = check_restriction(md, beta);
        bool reported = false;
        for (const auto& x : v.witnesses) reported = reported || x.pair == w;
        const bool member_A = in_calG(w, md) && log_at_exp_beta(w.f, beta) < 0;
        const GenSet FqB = run_pipeline(restricted_model(md, beta)).Fq;
        const bool outside_B = radical_member(w, FqB, 64).verdict == Verdict::No;
        r.ok = (reported || member_A) && outside_B;
        if (!r.ok)
            r.detail = w.str() + ": reported " + std::to_string(reported) + ", G-member with negative log " +
                       std::to_string(member_A) + ", outside Fq(B) " + std::to_string(outside_B);
    } else if (r.kind == "error") {
        r.detail = "expected the command to be refused with rule " + want.dump();
    } else {
        r.detail = "unknown check kind '" + r.kind + "'";
    }
    return r;
}

}  // namespace

FixtureResult run_fixture(const FixtureCase& c) {
    FixtureResult out;
    out.name = c.name;
    out.group = c.group;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Report rep = run_command(c.command, scenario_from_json(c.scenario));
        out.ok = true;
        for (const auto& e : c.expect) {
            CheckResult r;
            try {
                r = check_one(e, rep.doc, c);
            } catch (const std::exception& ex) {
                r.path = e.value("path", "");
                r.kind = e.value("kind", "equals");
                r.detail = ex.what();
            }
            out.ok = out.ok && r.ok;
            out.checks.push_back(std::move(r));
        }
        if (c.expect.empty()) {
            out.ok = false;
            out.error = "no expectations";
        }
    } catch (const CommandError& e) {
        out.error = std::string(e.what()) + " [" + e.module + "/" + e.rule + "]";
        // a case may expect the command to be refused
        for (const auto& x : c.expect)
            if (x.value("kind", "") == "error" && x.value("value", "") == e.rule) out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace mspec
