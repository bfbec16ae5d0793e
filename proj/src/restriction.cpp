#include "mspec/restriction.hpp"

#include "mspec/linalg.hpp"
#include "mspec/lp.hpp"

#include <algorithm>

namespace mspec {

Q log_at_exp_beta(const Monomial& f, const Vec& beta) {
    Q s = 0;
    for (const auto& [v, e] : f.exponents()) {
        if (v.kind != VarKind::Tau) continue;
        if (v.index > int(beta.size())) throw InputError("beta is shorter than the monomial support", "beta");
        s += e * beta[v.index - 1];
    }
    return s;
}

std::string to_string(RestrictionCase c) { return c == RestrictionCase::SameRank ? "same-rank" : "rank-plus-one"; }

Deformation with_row(const Deformation& d, const Vec& beta) {
    if (int(beta.size()) != d.m) throw InputError("beta must have one entry per block", "beta");
    Matrix B = d.A;
    B.push_back(beta);
    return Deformation::make(B, d.block_dims);
}

Model restricted_model(const Model& a, const Vec& beta) {
    return Model::make(with_row(a.d, beta), a.p);
}

namespace {

std::map<int, Q> b_values(const Model& a, const Vec& beta) {
    std::map<int, Q> b;
    for (const auto& [j, f] : a.dm.phi_inv) b[j] = log_at_exp_beta(f, beta);
    for (const auto& [k, f] : a.dm.psi) b[k] = log_at_exp_beta(f, beta);
    return b;
}

void add_witness(RestrictionVerdict& out, const GenPair& p, const Q& lg, const char* tag) {
    out.holds = false;
    out.witnesses.push_back({p, lg, tag});
    if (std::find(out.citations.begin(), out.citations.end(), tag) == out.citations.end())
        out.citations.push_back(tag);
}

void check_pairs(RestrictionVerdict& out, const Vec& beta, bool unit_balance) {
    bool any_unit = false;
    for (const auto& p : out.Fq) {
        Q lg = log_at_exp_beta(p.f, beta);
        if (p.v.is_zero()) {
            if (lg < 0) add_witness(out, p, lg, kZeroValueSign);
        } else {
            any_unit = true;
            if (unit_balance && lg != 0) add_witness(out, p, lg, kUnitValueBalance);
        }
    }
    out.no_unit_pairs = !any_unit;
}

size_t rank_with(const Model& a, const Vec& beta) {
    Matrix B = a.d.A;
    B.push_back(beta);
    return rank(B);
}

}  // namespace

RestrictionVerdict check_same_rank(const Model& a, const Vec& beta) {
    if (int(beta.size()) != a.d.m) throw InputError("beta must have one entry per block", "beta");
    if (rank_with(a, beta) != size_t(a.r.L))
        throw InputError("adding beta raises the rank; use the rank-plus-one check", "rank");
    RestrictionVerdict out;
    out.kase = RestrictionCase::SameRank;
    out.b_values = b_values(a, beta);
    out.Fq = run_pipeline(a).Fq;
    check_pairs(out, beta, false);
    Matrix rows;
    for (int j : a.r.basis_rows) rows.push_back(a.d.A[j - 1]);
    out.cone_sufficient = lp::in_cone(rows, beta);
    return out;
}

RestrictionVerdict check_rank_plus_one(const Model& a, const Vec& beta) {
    if (int(beta.size()) != a.d.m) throw InputError("beta must have one entry per block", "beta");
    if (rank_with(a, beta) != size_t(a.r.L) + 1)
        throw InputError("adding beta keeps the rank; use the same-rank check", "rank");
    RestrictionVerdict out;
    out.kase = RestrictionCase::RankPlusOne;
    out.b_values = b_values(a, beta);
    for (int k : a.r.other_cols())
        if (out.b_values[k] != 0) {
            out.pivot = k;
            break;
        }
    if (out.pivot == 0)
        throw InputError("rank increases although every psi is balanced at beta; inconsistent input", "pivot");
    const Q bp = out.b_values[out.pivot];
    const Monomial& psi_p = a.dm.psi.at(out.pivot);
    for (const auto& [j, f] : a.dm.phi_inv) out.phi_inv_B[j] = f / psi_p.pow(out.b_values[j] / bp);
    out.phi_inv_B[out.pivot] = psi_p.pow(1 / bp);
    for (const auto& [k, f] : a.dm.psi)
        if (k != out.pivot) out.psi_B[k] = f / psi_p.pow(out.b_values[k] / bp);
    out.Fq = run_pipeline(a).Fq;
    check_pairs(out, beta, true);
    for (int k : a.r.other_cols()) {
        if (k == out.pivot || a.zero(k) || out.b_values[k] == 0) continue;
        out.holds = false;
        out.failed_columns.push_back(k);
    }
    if (!out.failed_columns.empty()) out.citations.push_back(kFreeColumnExponent);
    return out;
}

RestrictionVerdict check_restriction(const Model& a, const Vec& beta) {
    if (rank_with(a, beta) == size_t(a.r.L)) return check_same_rank(a, beta);
    return check_rank_plus_one(a, beta);
}

H2Report check_H2_subfamily(const std::vector<std::set<int>>& I_sets, const std::set<int>& subset) {
    H2Report rep;
    int ell = int(I_sets.size());
    for (int j = 0; j < ell && rep.holds; ++j)
        for (int k = j + 1; k < ell && rep.holds; ++k) {
            const auto& a = I_sets[j];
            const auto& b = I_sets[k];
            bool a_in_b = std::includes(b.begin(), b.end(), a.begin(), a.end());
            bool b_in_a = std::includes(a.begin(), a.end(), b.begin(), b.end());
            bool disjoint = std::none_of(a.begin(), a.end(), [&](int x) { return b.count(x) > 0; });
            if (!a_in_b && !b_in_a && !disjoint) {
                rep.holds = false;
                rep.violation = {j + 1, k + 1};
            }
        }
    if (!rep.holds) return rep;
    for (int s : subset)
        if (s < 1 || s > ell) throw InputError("subfamily index out of range", "subset");

    auto fam = build_from_index_family(I_sets);
    int m = fam.d.m;
    rep.normal_type = (m == ell) && rank(fam.d.A) == size_t(ell);
    // block of submanifold j: the block whose smallest containing set is I_j
    rep.block_of.assign(ell + 1, 0);
    for (int b = 0; b < m; ++b) {
        int best = 0;
        for (int j = 1; j <= ell; ++j) {
            if (!I_sets[j - 1].count(fam.blocks[b][0])) continue;
            if (best == 0 || I_sets[j - 1].size() < I_sets[best - 1].size()) best = j;
        }
        if (best && rep.block_of[best] == 0) rep.block_of[best] = b + 1;
    }
    if (!rep.normal_type) return rep;

    // closed forms: tau_j if I_j is maximal, else tau_j / tau_k with I_k the smallest strict superset
    auto closed_forms = [&](const std::vector<int>& members) {
        std::map<int, Monomial> out;
        for (int j : members) {
            const auto& Ij = I_sets[j - 1];
            int sup = 0;
            for (int k : members) {
                if (k == j) continue;
                const auto& Ik = I_sets[k - 1];
                if (Ik.size() > Ij.size() && std::includes(Ik.begin(), Ik.end(), Ij.begin(), Ij.end()) &&
                    (sup == 0 || Ik.size() < I_sets[sup - 1].size()))
                    sup = k;
            }
            Monomial f = Monomial::tau(rep.block_of[j]);
            if (sup) f = f / Monomial::tau(rep.block_of[sup]);
            out[j] = f;
        }
        return out;
    };
    std::vector<int> all;
    for (int j = 1; j <= ell; ++j) all.push_back(j);
    rep.closed_form = closed_forms(all);
    {
        Model full = Model::make(fam.d, PointPattern{});
        rep.closed_form_matches = true;
        for (int j : all) {
            auto it = full.dm.phi_inv.find(j);
            if (it == full.dm.phi_inv.end() || !(it->second == rep.closed_form[j])) rep.closed_form_matches = false;
        }
    }

    rep.compatible = true;
    std::vector<int> current = all;
    std::set<int> zero_blocks;
    // drop the manifolds outside the subfamily one at a time, largest index first
    for (int e = ell; e >= 1; --e) {
        if (subset.count(e)) continue;
        H2Step step;
        step.removed = e;
        step.zero_block = rep.block_of[e];
        zero_blocks.insert(step.zero_block);
        std::vector<int> rest;
        for (int j : current)
            if (j != e) rest.push_back(j);
        if (rest.empty()) break;
        Matrix A;
        for (int j : rest) A.push_back(fam.d.A[j - 1]);
        PointPattern p;
        p.zero_blocks = zero_blocks;
        Model ma = Model::make(Deformation::make(A, fam.d.block_dims), p);
        // closed forms only describe the linear algebra when the pivots sit on the natural blocks
        auto cf = closed_forms(rest);
        step.closed_form_matches = true;
        for (size_t i = 0; i < rest.size(); ++i) {
            int row = int(i) + 1;
            auto it = ma.dm.phi_inv.find(row);
            if (it == ma.dm.phi_inv.end() || !(it->second == cf[rest[i]])) step.closed_form_matches = false;
        }
        step.verdict = check_restriction(ma, fam.d.A[e - 1]);
        step.psi_log_one = step.verdict.pivot && step.verdict.b_values[step.verdict.pivot] == 1;
        step.phi_logs_binary = true;
        for (const auto& [j, f] : ma.dm.phi_inv) {
            Q b = step.verdict.b_values[j];
            if (b != 0 && b != 1) step.phi_logs_binary = false;
        }
        if (!step.verdict.holds) rep.compatible = false;
        rep.steps.push_back(step);
        current = rest;
    }
    return rep;
}

}  // namespace mspec
