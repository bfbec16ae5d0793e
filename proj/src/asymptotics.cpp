#include "mspec/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace mspec {

std::set<int> blocks_of(const Deformation& d, const std::set<int>& J) {
    std::set<int> K;
    for (int j : J) {
        if (j < 1 || j > d.ell) throw InputError("row index " + std::to_string(j) + " out of range", "index-set");
        K.insert(d.K[static_cast<size_t>(j - 1)].begin(), d.K[static_cast<size_t>(j - 1)].end());
    }
    return K;
}

std::vector<std::set<int>> nonempty_subsets(int ell) {
    if (ell > 8) throw InputError("more than 8 submanifolds: subset enumeration refused", "subsets");
    std::vector<std::set<int>> out;
    for (unsigned mask = 1; mask < (1u << ell); ++mask) {
        std::set<int> J;
        for (int j = 1; j <= ell; ++j)
            if (mask & (1u << (j - 1))) J.insert(j);
        out.push_back(J);
    }
    // by size, then lexicographic
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

std::string set_str(const std::set<int>& J) {
    std::string s = "{";
    for (int j : J) s += (s.size() > 1 ? "," : "") + std::to_string(j);
    return s + "}";
}

namespace {

void check_N(const Deformation& d, const IndexVec& N) {
    if (static_cast<int>(N.size()) != d.ell)
        throw InputError("N needs " + std::to_string(d.ell) + " entries", "index-set");
    for (long long n : N)
        if (n < 0) throw InputError("N must be non-negative", "index-set");
}

// every multi-index over the coordinates of block k with total length L
void compositions(const Deformation& d, int k, int L, std::vector<MultiIndex>& out) {
    const int dim = d.block_dims[static_cast<size_t>(k - 1)];
    MultiIndex cur;
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == dim) {
            MultiIndex a = cur;
            if (left > 0) a[{k, i}] = left;
            out.push_back(a);
            return;
        }
        for (int e = 0; e <= left; ++e) {
            if (e > 0) cur[{k, i}] = e;
            else cur.erase({k, i});
            rec(i + 1, left - e);
        }
        cur.erase({k, i});
    };
    rec(1, L);
}

}  // namespace

IndexSet index_set(const Deformation& d, const std::set<int>& J, const IndexVec& N) {
    check_N(d, N);
    if (J.empty()) throw InputError("J must be nonempty", "index-set");
    IndexSet out;
    out.J = J;
    out.N = N;
    out.K = blocks_of(d, J);
    const Q sigma = sigma_of(d.A);
    std::map<int, Q> bound;
    for (int j : J) bound[j] = Q(N[static_cast<size_t>(j - 1)]) / sigma;

    std::vector<int> Ks(out.K.begin(), out.K.end());
    std::vector<int> lengths(Ks.size(), 0);
    std::function<void(size_t, std::map<int, Q>)> rec = [&](size_t idx, std::map<int, Q> sums) {
        if (idx == Ks.size()) {
            std::vector<MultiIndex> acc{MultiIndex{}};
            for (size_t t = 0; t < Ks.size(); ++t) {
                std::vector<MultiIndex> parts, next;
                compositions(d, Ks[t], lengths[t], parts);
                for (const auto& a : acc)
                    for (const auto& p : parts) next.push_back(add(a, p));
                acc.swap(next);
            }
            out.members.insert(out.members.end(), acc.begin(), acc.end());
            return;
        }
        const int k = Ks[idx];
        for (int L = 0;; ++L) {
            std::map<int, Q> s = sums;
            bool ok = true;
            for (int j : J) {
                s[j] += d.a(j, k) * L;
                if (s[j] >= bound[j]) ok = false;
            }
            if (!ok) break;
            lengths[idx] = L;
            rec(idx + 1, s);
        }
        lengths[idx] = 0;
    };
    std::map<int, Q> zero;
    for (int j : J) zero[j] = 0;
    bool any = true;
    for (int j : J)
        if (bound[j] <= 0) any = false;
    if (any) rec(0, zero);
    std::sort(out.members.begin(), out.members.end());
    return out;
}

std::vector<std::string> index_constraints(const Deformation& d, const std::set<int>& J) {
    const Q sigma = sigma_of(d.A);
    std::vector<std::string> out;
    for (int j : J) {
        std::string lhs;
        for (int k = 1; k <= d.m; ++k) {
            const Q& a = d.a(j, k);
            if (a == 0) continue;
            if (!lhs.empty()) lhs += " + ";
            lhs += (a == 1 ? "" : q_str(a)) + "|a" + std::to_string(k) + "|";
        }
        const Q inv = 1 / sigma;
        std::string rhs = (inv == 1 ? "" : q_str(inv) + "*") + "n" + std::to_string(j);
        out.push_back(lhs + " < " + rhs);
    }
    return out;
}

std::optional<BlockPoly> CoefficientFamily::get(const std::set<int>& J, const MultiIndex& a) const {
    auto it = coeffs.find(J);
    if (it != coeffs.end()) {
        auto jt = it->second.find(a);
        if (jt != it->second.end()) return jt->second;
    }
    if (zero_default) return BlockPoly{};
    return std::nullopt;
}

CoefficientFamily family_from_function(const BlockPoly& f, const Deformation& d) {
    for (int k : f.blocks())
        if (k > d.m) throw InputError("polynomial uses block " + std::to_string(k) + " beyond m", "polynomial");
    CoefficientFamily F;
    F.zero_default = true;
    for (const auto& J : nonempty_subsets(d.ell)) {
        const std::set<int> K = blocks_of(d, J);
        auto& slot = F.coeffs[J];
        // only alpha = gamma restricted to K_J can survive differentiation and restriction
        std::set<MultiIndex> alphas;
        for (const auto& [g, c] : f.terms) {
            MultiIndex a;
            for (const auto& [v, e] : g)
                if (K.count(v.first)) a[v] = e;
            alphas.insert(a);
        }
        for (const auto& a : alphas) {
            BlockPoly c = f.derivative(a).restrict_zero(K);
            if (!c.is_zero()) slot[a] = c;
        }
    }
    return F;
}

CoefficientFamily zero_family() {
    CoefficientFamily F;
    F.zero_default = true;
    return F;
}

std::string AppTemplate::str() const {
    std::string s;
    for (const auto& t : terms) {
        s += (s.empty() ? (t.sign < 0 ? "-" : "") : (t.sign < 0 ? " - " : " + "));
        s += "f_{" + set_str(t.J) + "," + multi_index_str(t.alpha) + "} z^a/a!";
    }
    return s.empty() ? "0" : s;
}

AppTemplate app_template(const Deformation& d, const IndexVec& N) {
    check_N(d, N);
    AppTemplate t;
    t.N = N;
    for (const auto& J : nonempty_subsets(d.ell)) {
        const int sign = J.size() % 2 == 1 ? 1 : -1;
        for (const auto& a : index_set(d, J, N).members) t.terms.push_back({J, sign, a});
    }
    return t;
}

BlockPoly app_polynomial(const AppTemplate& t, const CoefficientFamily& F) {
    BlockPoly out;
    for (const auto& term : t.terms) {
        auto c = F.get(term.J, term.alpha);
        if (!c)
            throw InputError("missing coefficient f_{" + set_str(term.J) + "," + multi_index_str(term.alpha) + "}",
                             "coefficients");
        out = out + (*c * BlockPoly::monomial(term.alpha, 1 / factorial(term.alpha))).scaled(term.sign);
    }
    return out;
}

BlockPoly app(const Deformation& d, const IndexVec& N, const CoefficientFamily& F) {
    return app_polynomial(app_template(d, N), F);
}

BlockPoly truncation(const Deformation& d, const std::set<int>& J, const IndexVec& N, const CoefficientFamily& F) {
    BlockPoly out;
    for (const auto& a : index_set(d, J, N).members) {
        auto c = F.get(J, a);
        if (!c)
            throw InputError("missing coefficient f_{" + set_str(J) + "," + multi_index_str(a) + "}", "coefficients");
        out = out + *c * BlockPoly::monomial(a, 1 / factorial(a));
    }
    return out;
}

BlockPoly taylor_oracle(const Deformation& d, const std::set<int>& J, const IndexVec& N, const BlockPoly& f) {
    check_N(d, N);
    const Q sigma = sigma_of(d.A);
    BlockPoly out;
    for (const auto& [g, c] : f.terms) {
        bool keep = true;
        for (int j : J) {
            Q w = 0;
            for (const auto& [v, e] : g) w += sigma * d.a(j, v.first) * e;
            if (w >= N[static_cast<size_t>(j - 1)]) keep = false;
        }
        if (keep) out.terms[g] = c;
    }
    return out;
}

LevelExpr remainder_exponent(const LevelFamily& fam, const Deformation& d, const IndexVec& N) {
    check_N(d, N);
    const Q sigma = sigma_of(d.A);
    std::vector<LevelExpr> parts;
    for (int j = 1; j <= d.ell; ++j) {
        const long long n = N[static_cast<size_t>(j - 1)];
        if (n != 0) parts.push_back(LevelExpr::pow(fam.rho(j), Q(n) / sigma));
    }
    return LevelExpr::prod(parts);
}

std::map<int, Vec> remainder_linear_forms(const LevelFamily& fam, int m) {
    std::map<int, Vec> out;
    for (int k = 1; k <= m; ++k) out[k] = Vec(static_cast<size_t>(fam.ell), Q(0));
    for (int j = 1; j <= fam.ell; ++j) {
        const LevelExpr& e = fam.rho(j);
        if (e.kind() != LevelExpr::Kind::Mono || !e.mono().only_kind(VarKind::Tau))
            if (!e.is_one())
                throw InputError("level function " + std::to_string(j) + " is not a monomial in tau", "remainder");
        for (const auto& [v, q] : e.mono().exponents()) out[v.index][static_cast<size_t>(j - 1)] = q;
    }
    return out;
}

std::string remainder_symbolic(const LevelFamily& fam, const Deformation& d) {
    const auto forms = remainder_linear_forms(fam, d.m);
    std::string body;
    for (const auto& [k, coeffs] : forms) {
        std::string lin;
        for (size_t j = 0; j < coeffs.size(); ++j) {
            const Q& c = coeffs[j];
            if (c == 0) continue;
            const Q mag = c < 0 ? Q(-c) : c;
            lin += lin.empty() ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
            lin += (mag == 1 ? "" : q_str(mag) + "*") + "n" + std::to_string(j + 1);
        }
        if (lin.empty()) continue;
        if (!body.empty()) body += " * ";
        body += "|z" + std::to_string(k) + "|^(" + lin + ")";
    }
    if (body.empty()) return "1";
    const Q inv = 1 / sigma_of(d.A);
    return inv == 1 ? body : "(" + body + ")^(" + q_str(inv) + ")";
}

IndexVec derivative_shift(const Deformation& d, const IndexVec& N, int k) {
    check_N(d, N);
    if (k < 1 || k > d.m) throw InputError("block out of range", "derivative");
    const Q sigma = sigma_of(d.A);
    IndexVec out = N;
    for (int j = 1; j <= d.ell; ++j) {
        const Q step = sigma * d.a(j, k);
        if (!is_integer(step)) throw std::logic_error("sigma_A * a_jk must be an integer");
        out[static_cast<size_t>(j - 1)] += to_ll(num(step));
    }
    return out;
}

CoefficientFamily shift_family(const CoefficientFamily& F, const Deformation& d, const Coord& c) {
    CoefficientFamily out;
    out.zero_default = F.zero_default;
    for (const auto& [J, entries] : F.coeffs) {
        const bool inside = blocks_of(d, J).count(c.first) > 0;
        auto& slot = out.coeffs[J];
        for (const auto& [a, poly] : entries) {
            if (!inside) {
                BlockPoly p = poly.derivative(c);
                if (!p.is_zero() || !F.zero_default) slot[a] = p;
                continue;
            }
            auto it = a.find(c);
            if (it == a.end()) continue;
            MultiIndex b = a;
            if (it->second == 1) b.erase(c);
            else b[c] = it->second - 1;
            slot[b] = poly;
        }
    }
    return out;
}

ConsistencyReport consistency_C1(const CoefficientFamily& F, const Deformation& d) {
    ConsistencyReport rep;
    const auto subsets = nonempty_subsets(d.ell);
    auto entries = [&](const std::set<int>& J) {
        std::map<MultiIndex, BlockPoly> out;
        auto it = F.coeffs.find(J);
        if (it == F.coeffs.end()) return out;
        for (const auto& [a, p] : it->second)
            if (!(F.zero_default && p.is_zero())) out[a] = p;
        return out;
    };
    for (size_t x = 0; x < subsets.size(); ++x)
        for (size_t y = x + 1; y < subsets.size(); ++y) {
            if (blocks_of(d, subsets[x]) != blocks_of(d, subsets[y])) continue;
            rep.checked.emplace_back(subsets[x], subsets[y]);
            if (entries(subsets[x]) != entries(subsets[y])) {
                rep.failed.emplace_back(subsets[x], subsets[y]);
                rep.ok = false;
            }
        }
    return rep;
}

std::vector<int> induced_actions(const Deformation& d, const std::set<int>& J) {
    const std::set<int> K = blocks_of(d, J);
    std::vector<int> kept;
    std::vector<Vec> rows;
    for (int j = 1; j <= d.ell; ++j) {
        Vec row;
        bool trivial = true;
        for (int k = 1; k <= d.m; ++k)
            if (!K.count(k)) {
                row.push_back(d.a(j, k));
                if (d.a(j, k) != 0) trivial = false;
            }
        if (trivial || std::find(rows.begin(), rows.end(), row) != rows.end()) continue;
        rows.push_back(row);
        kept.push_back(j);
    }
    return kept;
}

MapCheck check_map(const PolyMapSpec& spec) {
    const Deformation& M = spec.source;
    const Deformation& N = spec.target;
    if (M.ell != N.ell) throw InputError("source and target need the same number of submanifolds", "map");
    MapCheck out;
    auto weight_str = [](const Vec& w) {
        std::string s = "(";
        for (size_t i = 0; i < w.size(); ++i) s += (i ? ", " : "") + q_str(w[i]);
        return s + ")";
    };
    auto comp_name = [&](const Coord& c) {
        std::string s = "f^(" + std::to_string(c.first) + ")";
        if (N.block_dims[static_cast<size_t>(c.first - 1)] > 1) s += "_" + std::to_string(c.second);
        return s;
    };
    for (const auto& [c, poly] : spec.components) {
        if (c.first < 1 || c.first > N.m) throw InputError("target block out of range", "map");
        for (int k : poly.blocks())
            if (k > M.m) throw InputError("component uses source block " + std::to_string(k) + " beyond m", "map");
    }

    // weight condition: every monomial of f^(k) weighs at least column k of the target
    for (const auto& [c, poly] : spec.components) {
        const Vec target = N.column(c.first);
        BlockPoly top;
        for (const auto& [g, coeff] : poly.terms) {
            Vec w(static_cast<size_t>(M.ell), Q(0));
            for (int j = 1; j <= M.ell; ++j)
                for (const auto& [v, e] : g) w[static_cast<size_t>(j - 1)] += M.a(j, v.first) * e;
            for (int j = 1; j <= M.ell; ++j)
                if (w[static_cast<size_t>(j - 1)] < target[static_cast<size_t>(j - 1)]) {
                    out.reason = "monomial " + BlockPoly::monomial(g).str("x") + " of " + comp_name(c) +
                                 " has weight " + weight_str(w) + ", below " + weight_str(target) + " in row " +
                                 std::to_string(j);
                    return out;
                }
            if (w == target) top.terms[g] = coeff;
        }
        out.induced[c] = top;
    }

    // f(M_j) inside N_j, by substitution
    for (int j = 1; j <= M.ell; ++j)
        for (const auto& [c, poly] : spec.components) {
            if (N.a(j, c.first) == 0) continue;
            if (!poly.restrict_zero(M.K[static_cast<size_t>(j - 1)]).is_zero()) {
                out.reason = comp_name(c) + " does not vanish on M_" + std::to_string(j);
                out.induced.clear();
                return out;
            }
        }
    out.ok = true;
    return out;
}

namespace {

struct Fit {
    double C = 0;
    double M = 0;
    double M_pushed = 0;
    int samples = 0;
};

struct Ratio {
    long double actual = 0;
    long double majorant = 0;
};

Ratio ratio_at(const Deformation& d, const BlockPoly& diff, const LevelFamily& fam, const IndexVec& N,
               const std::vector<double>& norms, const std::vector<std::vector<double>>& dirs) {
    std::map<Coord, long double> x;
    for (int k = 1; k <= d.m; ++k)
        for (int i = 1; i <= d.block_dims[static_cast<size_t>(k - 1)]; ++i)
            x[{k, i}] = static_cast<long double>(norms[static_cast<size_t>(k - 1)]) *
                        dirs[static_cast<size_t>(k - 1)][static_cast<size_t>(i - 1)];
    long double val = 0, maj = 0;
    for (const auto& [g, c] : diff.terms) {
        long double t = static_cast<long double>(to_double(c));
        for (const auto& [v, e] : g) t *= std::pow(x.at(v), e);
        val += t;
        maj += std::fabs(t);
    }
    const long double sigma = to_double(sigma_of(d.A));
    long double log_rem = 0;
    for (int j = 1; j <= d.ell; ++j) {
        const long long n = N[static_cast<size_t>(j - 1)];
        if (n != 0) log_rem += static_cast<long double>(n) / sigma * std::log(static_cast<long double>(evaluate_level(fam.rho(j), norms)));
    }
    auto div = [&](long double v) {
        if (v == 0) return static_cast<long double>(0);
        return std::min(std::exp(std::log(v) - log_rem), static_cast<long double>(1e300));
    };
    return {div(std::fabs(val)), div(maj)};
}

Fit fit_constant(const MulticoneSystem& s, const Deformation& d, const BlockPoly& diff, const LevelFamily& fam,
                 const IndexVec& N, double eps, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> G(0.0, 1.0);
    EpsValues ev;
    ev.eps = ev.eps0 = eps;
    Fit fit;
    int tries = 0;
    while (fit.samples < samples && tries < samples * 20) {
        ++tries;
        auto z = sample_member(s, ev, rng, 200);
        if (!z) continue;
        ++fit.samples;
        // a random unit direction inside each block
        std::vector<std::vector<double>> dirs;
        for (int k = 1; k <= d.m; ++k) {
            std::vector<double> u(static_cast<size_t>(d.block_dims[static_cast<size_t>(k - 1)]));
            double nrm = 0;
            for (auto& t : u) {
                t = G(rng);
                nrm += t * t;
            }
            for (auto& t : u) t /= std::sqrt(nrm);
            dirs.push_back(u);
        }
        const Ratio r = ratio_at(d, diff, fam, N, z->norms, dirs);
        fit.C = std::max(fit.C, static_cast<double>(r.actual));
        fit.M = std::max(fit.M, static_cast<double>(r.majorant));
        for (int j = 1; j <= d.ell; ++j) {
            std::vector<double> lambda(static_cast<size_t>(d.ell), 1.0);
            lambda[static_cast<size_t>(j - 1)] = 1e-3;
            const BlockPoint w = act(s, *z, lambda);
            fit.M_pushed = std::max(fit.M_pushed, static_cast<double>(ratio_at(d, diff, fam, N, w.norms, dirs).majorant));
        }
    }
    if (fit.samples < std::max(1, samples / 2)) throw std::runtime_error("estimate sampling starved");
    return fit;
}

}  // namespace

EstimateReport verify_estimate(const Model& md, const BlockPoly& f, const CoefficientFamily& F, const IndexVec& N,
                               double eps, int samples, std::uint64_t seed) {
    EstimateReport rep;
    const BlockPoly diff = f - app(md.d, N, F);
    if (diff.is_zero()) {
        rep.exact = rep.pass = true;
        return rep;
    }
    const PipelineResult pr = run_pipeline(md);
    const MulticoneSystem s = build_multicone(md, pr);
    const LevelFamily fam = build_levels(md, pr);
    const Fit base = fit_constant(s, md.d, diff, fam, N, eps, samples, seed);
    const Fit half = fit_constant(s, md.d, diff, fam, N, eps / 2, samples, seed + 1);
    rep.C_fit = base.C;
    rep.C_half = half.C;
    rep.M_fit = base.M;
    rep.M_pushed = base.M_pushed;
    rep.samples = base.samples + half.samples;
    auto growth = [](double a, double b) {
        if (a == 0) return 0.0;
        if (b == 0) return std::numeric_limits<double>::infinity();
        return a / b;
    };
    rep.max_violation = std::max(growth(rep.C_half, rep.C_fit), growth(rep.M_pushed, rep.M_fit));
    rep.pass = rep.max_violation <= 2.0;
    return rep;
}

EstimateReport verify_estimate(const Model& md, const BlockPoly& f, const IndexVec& N, double eps, int samples,
                               std::uint64_t seed) {
    return verify_estimate(md, f, family_from_function(f, md.d), N, eps, samples, seed);
}

bool flatness_check(const Model& md, const BlockPoly& f, int degree, double eps, int samples, std::uint64_t seed) {
    const CoefficientFamily zero = zero_family();
    IndexVec N(static_cast<size_t>(md.d.ell), 0);
    for (;;) {
        if (!verify_estimate(md, f, zero, N, eps, samples, seed).pass) return false;
        size_t i = 0;
        while (i < N.size() && N[i] == degree) N[i++] = 0;
        if (i == N.size()) return true;
        ++N[i];
    }
}

}  // namespace mspec
