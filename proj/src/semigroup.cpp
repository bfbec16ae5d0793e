#include "mspec/semigroup.hpp"

#include "mspec/cone.hpp"
#include "mspec/lattice.hpp"
#include "mspec/linalg.hpp"
#include "mspec/lp.hpp"

#include <algorithm>
#include <stdexcept>

namespace mspec {

Value psi_value(const Model& md, int k) {
    if (md.zero(k)) return Value::zero();
    Monomial n;
    for (const auto& [v, e] : md.dm.psi.at(k).exponents()) {
        int c = v.index;
        if (md.r.is_basis_col(c) && (md.zero(c) || md.p.normalized)) continue;
        n.set(xi_var(c), e);
    }
    return Value::of(n);
}

GenSet build_G(const Model& md) {
    GenSet g;
    for (const auto& [j, f] : md.dm.phi_inv) g.insert({f, Value::zero()});
    for (const auto& [k, f] : md.dm.psi) g.insert({f, psi_value(md, k)});
    for (int j : md.r.other_rows()) g.insert({Monomial::lambda(j), Value::zero()});
    return fraction_closure(g);
}

GenSet build_G_hat(const Model& md) {
    GenSet g;
    for (int k = 1; k <= md.d.m; ++k) {
        Value v = Value::zero();
        if (!md.zero(k))
            v = (md.p.normalized && md.r.is_basis_col(k)) ? Value::unit() : Value::of(Monomial::xi(k));
        g.insert({Monomial::tau(k) / md.dm.phi.at(k), v});
    }
    for (int j = 1; j <= md.d.ell; ++j) g.insert({Monomial::lambda(j), Value::zero()});
    return fraction_closure(g);
}

namespace {

GenPair balanced(const GenPair& p, const GenPair& q, const Q& np, const Q& nq, int sign_q) {
    auto [a, b] = balance(abs(np), abs(nq));
    GenPair x = pair_pow(p, Q(a));
    GenPair y = sign_q > 0 ? pair_pow(q, Q(b)) : GenPair{q.f.pow(-Q(b)), q.v.pow(-Q(b))};
    return x * y;
}

// shared body of L_k and L_j^lambda: F1, optional F2, F3
GenSet eliminate(const GenSet& F, const VarId& var, bool with_f2) {
    GenSet out;
    std::vector<const GenPair*> pos, neg;
    for (const auto& p : F) {
        Q e = p.f.exponent(var);
        if (e == 0)
            out.insert(p);
        else
            (e > 0 ? pos : neg).push_back(&p);
    }
    if (with_f2)
        for (auto* p : pos) out.insert({p->f, Value::zero()});
    for (auto* p : pos)
        for (auto* n : neg) out.insert(balanced(*p, *n, p->f.exponent(var), n->f.exponent(var), 1));
    return out;
}

struct Split {
    std::vector<const GenPair*> zero_pos, zero_neg, unit_pos, unit_neg;
};

Split split(const GenSet& F, const VarId& var) {
    Split s;
    for (const auto& p : F) {
        Q e = p.f.exponent(var);
        if (e == 0) continue;
        bool z = p.v.is_zero();
        if (e > 0)
            (z ? s.zero_pos : s.unit_pos).push_back(&p);
        else
            (z ? s.zero_neg : s.unit_neg).push_back(&p);
    }
    return s;
}

// F~1, F~3 and F~4 are common to both modified operations
void modified_common(const GenSet& F, const VarId& var, const Split& s, GenSet& out) {
    for (const auto& p : F)
        if (p.f.exponent(var) == 0) out.insert(p);
    auto any_pos = s.zero_pos;
    any_pos.insert(any_pos.end(), s.unit_pos.begin(), s.unit_pos.end());
    auto any_neg = s.zero_neg;
    any_neg.insert(any_neg.end(), s.unit_neg.begin(), s.unit_neg.end());
    for (auto* p : any_pos)
        for (auto* n : any_neg) out.insert(balanced(*p, *n, p->f.exponent(var), n->f.exponent(var), 1));
    for (auto* p : any_pos)
        for (auto* g : s.unit_pos) out.insert(balanced(*p, *g, p->f.exponent(var), g->f.exponent(var), -1));
    for (auto* p : any_neg)
        for (auto* g : s.unit_neg) out.insert(balanced(*p, *g, p->f.exponent(var), g->f.exponent(var), -1));
}

}  // namespace

GenSet apply_Lk(const GenSet& F, int k) { return eliminate(F, tau_var(k), true); }

GenSet apply_Lj_lambda(const GenSet& F, int j) { return eliminate(F, lambda_var(j), false); }

GenSet apply_Lk_modified(const GenSet& F, int k) {
    VarId var = tau_var(k);
    Split s = split(F, var);
    GenSet out;
    modified_common(F, var, s, out);
    for (auto* p : s.zero_pos) out.insert({p->f, Value::zero()});
    for (auto* p : s.unit_pos) out.insert({p->f, Value::zero()});
    for (auto* g : s.unit_neg) out.insert({g->f.inverse(), Value::zero()});
    return out;
}

GenSet apply_Lj_lambda_modified(const GenSet& F, int j) {
    VarId var = lambda_var(j);
    Split s = split(F, var);
    GenSet out;
    modified_common(F, var, s, out);
    auto f2 = [&](const Monomial& f) {
        Q e = -f.exponent(var);  // positive
        Z a = num(e), b = den(e);
        out.insert({Monomial::lambda(j, Q(a)) * f.pow(Q(b)), Value::zero()});
    };
    for (auto* p : s.zero_neg) f2(p->f);
    for (auto* p : s.unit_neg) f2(p->f);
    for (auto* g : s.unit_pos) f2(g->f.inverse());
    return out;
}

PipelineResult run_pipeline(const Model& md) {
    PipelineResult pr;
    pr.G = build_G(md);
    GenSet F = pr.G;
    for (int j : md.r.other_rows()) {
        F = apply_Lj_lambda(F, j);
        pr.F0_stages.push_back({j, F});
    }
    pr.F0 = F;
    pr.zero_cols_L = md.zero_basis_cols();
    for (int k : pr.zero_cols_L) {
        F = apply_Lk(F, k);
        pr.F_stages.push_back({k, F});
    }
    pr.q = int(pr.zero_cols_L.size());
    pr.Fq = F;
    if (pr.q == 0 && md.r.L == md.d.ell && !(pr.Fq == pr.G))
        throw std::logic_error("pipeline without eliminations must return G");
    return pr;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        case Verdict::Unknown: return "unknown";
    }
    return "?";
}

namespace {

std::vector<VarId> coordinates(const std::vector<Monomial>& ms) {
    std::set<VarId> vars;
    for (const auto& m : ms)
        for (const auto& [v, e] : m.exponents()) vars.insert(v);
    return {vars.begin(), vars.end()};
}

Vec coords_of(const Monomial& m, const std::vector<VarId>& vars) {
    Vec out;
    for (const auto& v : vars) out.push_back(m.exponent(v));
    return out;
}

Membership from_result(const CombinationResult& r, const std::vector<size_t>& index, size_t total) {
    Membership out;
    using S = CombinationResult::Status;
    out.verdict = r.status == S::Found ? Verdict::Yes : r.status == S::None ? Verdict::No : Verdict::Unknown;
    if (r.status == S::Found) {
        out.witness.assign(total, 0);
        for (size_t i = 0; i < index.size(); ++i) out.witness[index[i]] = to_ll(r.coeffs[i]);
    }
    return out;
}

// monomial with the value folded in as xi coordinates (values must be nonzero)
Monomial folded(const GenPair& p) { return p.f * p.v.mono(); }

}  // namespace

Membership mono_membership(const Monomial& f, const GenSet& H, int bound) {
    std::vector<Monomial> ms{f};
    for (const auto& p : H) ms.push_back(p.f);
    auto vars = coordinates(ms);
    CombinationQuery q;
    std::vector<size_t> index;
    size_t i = 0;
    for (const auto& p : H) {
        q.gens.push_back(coords_of(p.f, vars));
        index.push_back(i++);
    }
    q.target = coords_of(f, vars);
    q.bound = bound;
    return from_result(find_combination(q), index, H.size());
}

Membership pair_membership(const GenPair& p, const GenSet& H, int bound) {
    CombinationQuery q;
    q.bound = bound;
    std::vector<size_t> index;
    if (!p.v.is_zero()) {
        std::vector<Monomial> ms{folded(p)};
        for (const auto& h : H)
            if (!h.v.is_zero()) ms.push_back(folded(h));
        auto vars = coordinates(ms);
        size_t i = 0;
        for (const auto& h : H) {
            if (!h.v.is_zero()) {
                q.gens.push_back(coords_of(folded(h), vars));
                index.push_back(i);
            }
            ++i;
        }
        q.target = coords_of(folded(p), vars);
    } else {
        std::vector<Monomial> ms{p.f};
        for (const auto& h : H) ms.push_back(h.f);
        auto vars = coordinates(ms);
        size_t i = 0;
        for (const auto& h : H) {
            q.gens.push_back(coords_of(h.f, vars));
            q.zero_gen.push_back(h.v.is_zero());
            index.push_back(i++);
        }
        q.target = coords_of(p.f, vars);
        q.need_zero = true;
    }
    return from_result(find_combination(q), index, H.size());
}

namespace {

// Rational relaxation of p^N in [H] for some N: returns a rational exponent vector if one exists.
std::optional<Vec> rational_witness(const GenPair& p, const GenSet& H) {
    std::vector<const GenPair*> gens;
    std::vector<Monomial> ms;
    bool zero = p.v.is_zero();
    ms.push_back(zero ? p.f : folded(p));
    for (const auto& h : H) {
        if (!zero && h.v.is_zero()) continue;
        gens.push_back(&h);
        ms.push_back(zero ? h.f : folded(h));
    }
    auto vars = coordinates(ms);
    lp::Problem pr(gens.size());
    for (size_t c = 0; c < vars.size(); ++c) {
        Vec row;
        for (size_t i = 0; i < gens.size(); ++i) row.push_back(ms[i + 1].exponent(vars[c]));
        pr.add(row, lp::Sense::EQ, ms[0].exponent(vars[c]));
    }
    auto r = lp::solve(pr);
    if (!r.feasible()) return std::nullopt;
    if (zero) {
        // some zero-valued generator must carry positive weight; cap the objective to keep it bounded
        Vec obj(gens.size(), Q(0));
        for (size_t i = 0; i < gens.size(); ++i)
            if (gens[i]->v.is_zero()) obj[i] = 1;
        pr.add(obj, lp::Sense::LE, dot(obj, r.x) + 1);
        pr.objective = obj;
        r = lp::solve(pr);
        if (r.value <= 0) return std::nullopt;
    }
    Vec full;
    size_t i = 0;
    for (const auto& h : H) full.push_back((zero || !h.v.is_zero()) ? r.x[i++] : Q(0));
    return full;
}

}  // namespace

RadicalResult radical_member(const GenPair& p, const GenSet& H, int max_N, int bound) {
    RadicalResult out;
    auto w = rational_witness(p, H);
    if (!w) return out;
    // the rational solution gives an explicit power
    Z n0 = common_denominator(*w);
    for (int N = 1; N <= max_N; ++N) {
        if (N == n0) {
            out.verdict = Verdict::Yes;
            out.N = N;
            for (const auto& x : *w) out.witness.push_back(to_ll(num(x * Q(N))));
            return out;
        }
        auto m = pair_membership(pair_pow(p, Q(N)), H, bound);
        if (m.verdict == Verdict::Yes) {
            out.verdict = Verdict::Yes;
            out.N = N;
            out.witness = m.witness;
            return out;
        }
    }
    out.verdict = Verdict::Unknown;
    return out;
}

Verdict equivalent(const GenSet& A, const GenSet& B, int max_N, int bound) {
    Verdict v = Verdict::Yes;
    auto check = [&](const GenSet& X, const GenSet& Y) {
        for (const auto& p : X) {
            auto r = radical_member(p, Y, max_N, bound);
            if (r.verdict == Verdict::No) return false;
            if (r.verdict == Verdict::Unknown) v = Verdict::Unknown;
        }
        return true;
    };
    if (!check(A, B) || !check(B, A)) return Verdict::No;
    return v;
}

std::optional<Representation> represent(const Monomial& f, const Model& md) {
    if (f.has_kind(VarKind::Lambda) || f.has_kind(VarKind::XiNorm)) return std::nullopt;
    Representation rep;
    Monomial rest = f;
    for (const auto& [k, psi] : md.dm.psi) {
        Q a = f.exponent(tau_var(k));
        rep.psi_exp[k] = a;
        rest = rest / psi.pow(a);
    }
    for (const auto& [v, e] : rest.exponents())
        if (!md.r.is_basis_col(v.index)) return std::nullopt;
    const auto& R = md.r.basis_rows;
    const auto& C = md.r.basis_cols;
    for (int j : R) {
        Q s = 0;
        for (int c : C) s += rest.exponent(tau_var(c)) * md.d.a(j, c);
        rep.phi_exp[j] = s;
    }
    for (int j : md.r.other_rows()) {
        Q s = 0;
        for (int i : R) s -= rep.phi_exp[i] * md.dm.phi_inv.at(i).exponent(lambda_var(j));
        rep.lambda_exp[j] = s;
    }
    for (const auto& [j, e] : rep.phi_exp)
        if (!is_integer(e) || e < 0) return std::nullopt;
    for (const auto& [j, e] : rep.lambda_exp)
        if (!is_integer(e) || e < 0) return std::nullopt;
    for (const auto& [k, e] : rep.psi_exp)
        if (!is_integer(e) || (md.zero(k) && e < 0)) return std::nullopt;
    return rep;
}

std::optional<Value> value_of(const Monomial& f, const Model& md) {
    auto rep = represent(f, md);
    if (!rep) return std::nullopt;
    for (const auto& [j, e] : rep->phi_exp)
        if (e > 0) return Value::zero();
    for (const auto& [j, e] : rep->lambda_exp)
        if (e > 0) return Value::zero();
    for (int c : md.zero_basis_cols())
        if (f.exponent(tau_var(c)) > 0) return Value::zero();
    Value v = Value::unit();
    for (const auto& [k, e] : rep->psi_exp) {
        if (e == 0) continue;
        Value n = psi_value(md, k);
        if (n.is_zero()) return Value::zero();
        v = v * n.pow(e);
    }
    return v;
}

std::optional<Value> value_of(const Monomial& f, const PipelineResult& /*pr*/, const Model& md) {
    return value_of(f, md);
}

bool in_calG(const GenPair& p, const Model& md) {
    for (int c : md.zero_basis_cols())
        if (p.f.exponent(tau_var(c)) < 0) return false;
    auto v = value_of(p.f, md);
    return v && *v == p.v;
}

GenSet calG_generators(const Model& md) {
    const auto& R = md.r.basis_rows;
    auto others_c = md.r.other_cols();
    auto others_r = md.r.other_rows();
    size_t nR = R.size(), nK = others_c.size(), nL = others_r.size();
    size_t n = nR + nK + nL;
    // exponent space: phi_inv (R), psi (not C), lambda (not R)
    auto mono_of = [&](const Vec& x) {
        Monomial f;
        for (size_t i = 0; i < nR; ++i) f *= md.dm.phi_inv.at(R[i]).pow(x[i]);
        for (size_t i = 0; i < nK; ++i) f *= md.dm.psi.at(others_c[i]).pow(x[nR + i]);
        for (size_t i = 0; i < nL; ++i) f *= Monomial::lambda(others_r[i], x[nR + nK + i]);
        return f;
    };
    auto unit_vec = [&](size_t i) {
        Vec e(n, Q(0));
        e[i] = 1;
        return e;
    };
    Matrix ineq, eq;
    for (size_t i = 0; i < nR; ++i) ineq.push_back(unit_vec(i));
    for (size_t i = 0; i < nL; ++i) ineq.push_back(unit_vec(nR + nK + i));
    for (size_t i = 0; i < nK; ++i)
        if (md.zero(others_c[i])) ineq.push_back(unit_vec(nR + i));
    std::vector<Monomial> images;
    for (size_t i = 0; i < n; ++i) images.push_back(mono_of(unit_vec(i)));
    for (int c : md.zero_basis_cols()) {
        Vec row;
        for (const auto& im : images) row.push_back(im.exponent(tau_var(c)));
        ineq.push_back(row);
    }
    for (int j : others_r) {
        Vec row;
        for (const auto& im : images) row.push_back(im.exponent(lambda_var(j)));
        eq.push_back(row);
    }
    auto cg = cone_generators(n, ineq, eq);
    GenSet out;
    auto add = [&](const Vec& x) {
        Monomial f = mono_of(x);
        auto v = value_of(f, md);
        if (!v) throw std::logic_error("cone generator outside the G-semigroup: " + f.str());
        out.insert({f, *v});
    };
    for (const auto& r : cg.rays) add(r);
    for (const auto& l : cg.lines) {
        add(l);
        Vec neg = l;
        for (auto& x : neg) x = -x;
        add(neg);
    }
    return out;
}

GenSet ghat_generators(const Model& md) {
    GenSet F = build_G_hat(md);
    for (int j = 1; j <= md.d.ell; ++j) F = apply_Lj_lambda(F, j);
    return F;
}

Membership ghat_membership(const GenPair& p, const Model& md, int bound) {
    if (p.f.has_kind(VarKind::Lambda)) return {};
    return pair_membership(p, build_G_hat(md), bound);
}

}  // namespace mspec
