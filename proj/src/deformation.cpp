#include "mspec/deformation.hpp"

#include "mspec/linalg.hpp"

#include <algorithm>
#include <sstream>

namespace mspec {

Vec Deformation::column(int k) const {
    Vec c;
    for (const auto& row : A) c.push_back(row[k - 1]);
    return c;
}

Deformation Deformation::make(Matrix A, std::vector<int> block_dims,
                              std::optional<std::vector<std::set<int>>> K_sets) {
    Deformation d;
    if (A.empty() || A[0].empty()) throw InputError("action matrix is empty", "matrix");
    d.ell = int(A.size());
    d.m = int(A[0].size());
    for (int j = 0; j < d.ell; ++j) {
        if (int(A[j].size()) != d.m) throw InputError("action matrix rows differ in length", "matrix");
        bool nonzero = false;
        for (const auto& x : A[j]) {
            if (x < 0) throw InputError("action matrix entries must be non-negative", "matrix");
            if (x != 0) nonzero = true;
        }
        if (!nonzero)
            throw InputError("row " + std::to_string(j + 1) +
                                 " is zero: the action is the identity and its parameter must be removed",
                             "identity-row");
    }
    for (int j = 0; j < d.ell; ++j)
        for (int i = 0; i < j; ++i)
            if (A[i] == A[j])
                d.warnings.push_back("rows " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                     " coincide; duplicated submanifolds can be eliminated");
    if (block_dims.empty()) block_dims.assign(d.m, 1);
    if (int(block_dims.size()) != d.m) throw InputError("block dimension count differs from m", "blocks");
    for (int n : block_dims)
        if (n < 1) throw InputError("block dimensions must be positive", "blocks");
    d.block_dims = std::move(block_dims);
    d.A = std::move(A);
    d.K.assign(d.ell, {});
    for (int j = 1; j <= d.ell; ++j)
        for (int k = 1; k <= d.m; ++k)
            if (d.a(j, k) != 0) d.K[j - 1].insert(k);
    if (K_sets) {
        if (int(K_sets->size()) != d.ell) throw InputError("K sets count differs from ell", "K");
        for (int j = 0; j < d.ell; ++j)
            if ((*K_sets)[j] != d.K[j])
                throw InputError("row " + std::to_string(j + 1) +
                                     ": nonzero entries must be exactly the blocks vanishing on the submanifold",
                                 "A2");
    }
    return d;
}

IndexFamily build_from_index_family(const std::vector<std::set<int>>& I_sets, int n) {
    std::set<int> all;
    for (const auto& I : I_sets) all.insert(I.begin(), I.end());
    if (all.empty()) throw InputError("the union of the index sets is empty", "index-family");
    if (*all.begin() < 1) throw InputError("coordinates are 1-based", "index-family");
    if (n <= 0) n = *all.rbegin();
    // class signature: membership pattern over the I_j
    std::map<std::vector<bool>, std::vector<int>> classes;
    std::vector<std::vector<bool>> order;
    for (int i : all) {
        std::vector<bool> sig;
        for (const auto& I : I_sets) sig.push_back(I.count(i) > 0);
        if (!classes.count(sig)) order.push_back(sig);
        classes[sig].push_back(i);
    }
    IndexFamily out;
    // blocks ordered by their smallest coordinate
    for (const auto& sig : order) out.blocks.push_back(classes[sig]);
    std::sort(out.blocks.begin(), out.blocks.end());
    Matrix A = zeros(I_sets.size(), out.blocks.size());
    std::vector<int> dims;
    for (size_t k = 0; k < out.blocks.size(); ++k) {
        dims.push_back(int(out.blocks[k].size()));
        for (size_t j = 0; j < I_sets.size(); ++j)
            if (I_sets[j].count(out.blocks[k][0])) A[j][k] = 1;
    }
    for (int i = 1; i <= n; ++i)
        if (!all.count(i)) out.complement.push_back(i);
    out.d = Deformation::make(A, dims);
    return out;
}

double PointPattern::norm(int k) const {
    if (is_zero(k)) return 0.0;
    auto it = norms.find(k);
    return it == norms.end() ? 1.0 : it->second;
}

void validate_point(const Deformation& d, const PointPattern& p) {
    for (int k : p.zero_blocks)
        if (k < 1 || k > d.m) throw InputError("zero block index out of range", "zero-pattern");
    for (int k = 1; k <= d.m; ++k) {
        bool zero_col = true;
        for (int j = 1; j <= d.ell; ++j)
            if (d.a(j, k) != 0) zero_col = false;
        if (zero_col && !p.is_zero(k))
            throw InputError("column " + std::to_string(k) + " is zero, so the block must vanish at the point",
                             "zero-column");
    }
    for (const auto& [k, v] : p.norms) {
        if (p.is_zero(k)) throw InputError("a norm is given for a vanishing block", "zero-pattern");
        if (!(v > 0)) throw InputError("block norms must be positive", "zero-pattern");
    }
}

bool RankData::is_basis_row(int j) const {
    return std::find(basis_rows.begin(), basis_rows.end(), j) != basis_rows.end();
}
bool RankData::is_basis_col(int k) const {
    return std::find(basis_cols.begin(), basis_cols.end(), k) != basis_cols.end();
}
std::vector<int> RankData::other_rows() const {
    return std::vector<int>(row_perm.begin() + L, row_perm.end());
}
std::vector<int> RankData::other_cols() const {
    return std::vector<int>(col_perm.begin() + L, col_perm.end());
}

Q sigma_of(const Matrix& A) {
    Z l = 1;
    for (const auto& row : A) l = lcm_z(l, common_denominator(row));
    Z g = 0;
    for (const auto& row : A)
        for (const auto& x : row) g = gcd_z(g, num(x * Q(l)));
    if (g == 0) return 1;
    return Q(l, g);
}

RankData rank_and_normalize(const Deformation& d, const PointPattern& p, bool reorder_for_point) {
    RankData r;
    auto rows0 = lex_basis_rows(d.A);
    r.L = int(rows0.size());
    std::vector<int> cols0;
    if (reorder_for_point && !is_fixed_point(d, p)) {
        std::vector<int> nonzero;
        for (int k = 1; k <= d.m; ++k)
            if (!p.is_zero(k)) nonzero.push_back(k - 1);
        Matrix sub = submatrix(d.A, rows0, nonzero);
        auto picked = lex_basis_rows(transpose(sub));
        if (int(picked.size()) != r.L)
            throw InputError("no invertible minor avoids the vanishing blocks", "internal");
        for (int i : picked) cols0.push_back(nonzero[i]);
    } else {
        cols0 = lex_basis_columns(d.A, rows0);
    }
    for (int j : rows0) r.basis_rows.push_back(j + 1);
    for (int k : cols0) r.basis_cols.push_back(k + 1);
    r.row_perm = r.basis_rows;
    for (int j = 1; j <= d.ell; ++j)
        if (!r.is_basis_row(j)) r.row_perm.push_back(j);
    r.col_perm = r.basis_cols;
    for (int k = 1; k <= d.m; ++k)
        if (!r.is_basis_col(k)) r.col_perm.push_back(k);
    r.sigma = sigma_of(d.A);
    return r;
}

std::string to_string(ActionType t) {
    switch (t) {
        case ActionType::Degenerate: return "degenerate";
        case ActionType::NonDegenerate: return "non-degenerate";
        case ActionType::Transitive: return "transitive";
        case ActionType::Normal: return "normal";
    }
    return "?";
}

ActionType classify_action(const Deformation& d) {
    int L = int(rank(d.A));
    if (L == d.ell && L == d.m) return ActionType::Normal;
    if (L == d.ell) return ActionType::NonDegenerate;
    if (L == d.m) return ActionType::Transitive;
    return ActionType::Degenerate;
}

bool is_fixed_point(const Deformation& d, const PointPattern& p) {
    std::vector<int> cols;
    for (int k = 1; k <= d.m; ++k)
        if (!p.is_zero(k)) cols.push_back(k - 1);
    size_t full = rank(d.A);
    if (cols.empty()) return full > 0;
    return rank(select_columns(d.A, cols)) < full;
}

DerivedMonomials derive_monomials(const Deformation& d, const RankData& r) {
    DerivedMonomials out;
    for (int k = 1; k <= d.m; ++k) {
        Monomial phi;
        for (int j = 1; j <= d.ell; ++j) phi.set(lambda_var(j), d.a(j, k));
        out.phi[k] = phi;
    }
    std::vector<int> R, C, Rbar;
    for (int j : r.basis_rows) R.push_back(j - 1);
    for (int k : r.basis_cols) C.push_back(k - 1);
    for (int j : r.other_rows()) Rbar.push_back(j - 1);
    Matrix Arc = submatrix(d.A, R, C);
    auto inv_t = inverse(transpose(Arc));
    if (!inv_t) throw InputError("leading minor is singular", "internal");
    Matrix shift = Rbar.empty() ? Matrix{} : matmul(*inv_t, transpose(submatrix(d.A, Rbar, C)));
    for (int i = 0; i < r.L; ++i) {
        Monomial m;
        for (int c = 0; c < r.L; ++c) m.set(tau_var(C[c] + 1), (*inv_t)[i][c]);
        for (size_t b = 0; b < Rbar.size(); ++b) m.set(lambda_var(Rbar[b] + 1), -shift[i][b]);
        out.phi_inv[R[i] + 1] = m;
    }
    auto Arc_inv = inverse(Arc);
    for (int k : r.other_cols()) {
        Vec col;
        for (int j : R) col.push_back(d.A[j][k - 1]);
        Vec alpha = matvec(*Arc_inv, col);
        // the full column must be the same combination (rank is L)
        for (int j = 0; j < d.ell; ++j) {
            Q s = 0;
            for (int c = 0; c < r.L; ++c) s += alpha[c] * d.A[j][C[c]];
            if (s != d.A[j][k - 1]) throw InputError("column is outside the span of the basis columns", "internal");
        }
        Monomial psi = Monomial::tau(k);
        for (int c = 0; c < r.L; ++c) psi.set(tau_var(C[c] + 1), -alpha[c]);
        out.psi[k] = psi;
        out.psi_coeffs[k] = alpha;
    }
    return out;
}

namespace {
std::string manifold_name(const std::set<int>& js) {
    if (js.empty()) return "X";
    std::string s;
    for (int j : js) s += (s.empty() ? "" : " n ") + std::string("M") + std::to_string(j);
    return js.size() > 1 ? "(" + s + ")" : s;
}
}  // namespace

std::vector<BundleSummand> bundle_decomposition(const Deformation& d) {
    auto t = classify_action(d);
    if (t != ActionType::Transitive && t != ActionType::Normal)
        throw InputError("the action is not of transitive type: no vector-bundle structure of the zero section "
                         "is guaranteed (two cleanly but not transversally intersecting submanifolds already fail)",
                         "transitive");
    std::set<int> all_blocks;
    for (const auto& Kj : d.K) all_blocks.insert(Kj.begin(), Kj.end());
    std::vector<BundleSummand> out;
    for (int k = 1; k <= d.m; ++k) {
        BundleSummand s;
        s.block = k;
        std::set<int> outside;  // j not in B_k
        for (int j = 1; j <= d.ell; ++j) {
            if (d.K[j - 1].count(k))
                s.B.insert(j);
            else
                outside.insert(j);
        }
        std::set<int> vanish_N;  // blocks vanishing on N_k
        for (int j : outside) vanish_N.insert(d.K[j - 1].begin(), d.K[j - 1].end());
        s.N = manifold_name(outside);
        std::vector<std::string> denom;
        for (int j : s.B) {
            std::set<int> v = vanish_N;
            v.insert(d.K[j - 1].begin(), d.K[j - 1].end());
            if (v == all_blocks) continue;  // M_j n N_k = M
            std::set<int> names = outside;
            names.insert(j);
            // drop manifolds implied by the others
            std::set<int> minimal;
            for (int a : names) {
                std::set<int> rest;
                for (int b : names)
                    if (b != a) rest.insert(d.K[b - 1].begin(), d.K[b - 1].end());
                bool implied = std::includes(rest.begin(), rest.end(), d.K[a - 1].begin(), d.K[a - 1].end());
                if (!implied || names.size() == 1) minimal.insert(a);
            }
            if (minimal.empty()) minimal.insert(j);
            denom.push_back("T" + manifold_name(minimal) + "xM");
        }
        std::string numer = s.N == "X" ? "TX" : "T" + s.N;
        if (denom.empty()) {
            s.text = "T_M " + s.N;
        } else {
            std::string den;
            for (const auto& x : denom) den += (den.empty() ? "" : " + ") + x;
            s.text = numer + "xM/(" + den + ")";
        }
        out.push_back(s);
    }
    return out;
}

Model Model::make(Deformation d, PointPattern p, bool reorder_for_point) {
    validate_point(d, p);
    Model md;
    md.r = rank_and_normalize(d, p, reorder_for_point);
    if (p.normalized)
        for (int k : md.r.basis_cols)
            if (!p.is_zero(k) && p.norm(k) != 1.0)
                throw InputError("a normalized point has unit norms on the basis blocks", "normalization");
    md.dm = derive_monomials(d, md.r);
    md.d = std::move(d);
    md.p = std::move(p);
    return md;
}

std::vector<int> Model::zero_basis_cols() const {
    std::vector<int> out;
    for (int k : r.basis_cols)
        if (p.is_zero(k)) out.push_back(k);
    return out;
}

nlohmann::json to_json(const Deformation& d) {
    nlohmann::json A = nlohmann::json::array();
    for (const auto& row : d.A) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& x : row) r.push_back(q_str(x));
        A.push_back(r);
    }
    nlohmann::json K = nlohmann::json::array();
    for (const auto& Kj : d.K) K.push_back(std::vector<int>(Kj.begin(), Kj.end()));
    return {{"ell", d.ell}, {"m", d.m}, {"A", A}, {"blocks", d.block_dims}, {"K", K}};
}

namespace {
Q json_q(const nlohmann::json& x) {
    if (x.is_string()) return parse_q(x.get<std::string>());
    if (x.is_number_integer()) return Q(x.get<long long>());
    throw InputError("rationals must be strings like \"3/2\" or integers", "json");
}
}  // namespace

Deformation deformation_from_json(const nlohmann::json& j) {
    if (!j.contains("A")) throw InputError("missing field \"A\"", "json");
    Matrix A;
    for (const auto& row : j.at("A")) {
        Vec r;
        for (const auto& x : row) r.push_back(json_q(x));
        A.push_back(r);
    }
    std::vector<int> blocks;
    if (j.contains("blocks")) blocks = j.at("blocks").get<std::vector<int>>();
    std::optional<std::vector<std::set<int>>> K;
    if (j.contains("K")) {
        std::vector<std::set<int>> ks;
        for (const auto& row : j.at("K")) {
            auto v = row.get<std::vector<int>>();
            ks.emplace_back(v.begin(), v.end());
        }
        K = ks;
    }
    Deformation d = Deformation::make(A, blocks, K);
    if (j.contains("ell") && j.at("ell").get<int>() != d.ell) throw InputError("\"ell\" disagrees with A", "json");
    if (j.contains("m") && j.at("m").get<int>() != d.m) throw InputError("\"m\" disagrees with A", "json");
    return d;
}

nlohmann::json to_json(const PointPattern& p) {
    nlohmann::json norms = nlohmann::json::object();
    for (const auto& [k, v] : p.norms) norms[std::to_string(k)] = v;
    return {{"zeros", std::vector<int>(p.zero_blocks.begin(), p.zero_blocks.end())},
            {"norms", norms},
            {"normalized", p.normalized}};
}

PointPattern point_from_json(const nlohmann::json& j) {
    PointPattern p;
    if (j.contains("zeros")) {
        auto z = j.at("zeros").get<std::vector<int>>();
        p.zero_blocks.insert(z.begin(), z.end());
    }
    if (j.contains("norms"))
        for (auto it = j.at("norms").begin(); it != j.at("norms").end(); ++it)
            p.norms[std::stoi(it.key())] = it.value().get<double>();
    if (j.contains("normalized")) p.normalized = j.at("normalized").get<bool>();
    return p;
}

std::string matrix_str(const Matrix& A) {
    std::string s = "[";
    for (size_t i = 0; i < A.size(); ++i) {
        s += (i ? ", [" : "[");
        for (size_t j = 0; j < A[i].size(); ++j) s += (j ? ", " : "") + q_str(A[i][j]);
        s += "]";
    }
    return s + "]";
}

}  // namespace mspec
