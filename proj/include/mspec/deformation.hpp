#pragma once

#include "mspec/monomial.hpp"
#include "mspec/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mspec {

// Errors raised for violated input preconditions.  `where` names the rule.
struct InputError : std::runtime_error {
    std::string where;
    InputError(const std::string& msg, std::string w = {})
        : std::runtime_error(msg), where(std::move(w)) {}
};

struct Deformation {
    int ell = 0;
    int m = 0;
    std::vector<int> block_dims;     // n_1..n_m
    Matrix A;                        // ell x m, non-negative
    std::vector<std::set<int>> K;    // K_j, 1-based blocks with a_jk != 0
    std::vector<std::string> warnings;

    // Validates and fills defaults.  Throws InputError.
    static Deformation make(Matrix A, std::vector<int> block_dims = {},
                            std::optional<std::vector<std::set<int>>> K_sets = std::nullopt);

    const Q& a(int j, int k) const { return A[j - 1][k - 1]; }
    Vec column(int k) const;
};

struct IndexFamily {
    Deformation d;
    std::vector<std::vector<int>> blocks;  // equivalence classes, 1-based coordinates
    std::vector<int> complement;           // coordinates in no I_j
};

IndexFamily build_from_index_family(const std::vector<std::set<int>>& I_sets, int n = 0);

struct PointPattern {
    std::set<int> zero_blocks;         // J_Z
    std::map<int, double> norms;       // |xi^(k)| for k outside J_Z
    bool normalized = false;

    bool is_zero(int k) const { return zero_blocks.count(k) > 0; }
    double norm(int k) const;
};

// Checks the zero-column assumption and normalization.  Throws InputError.
void validate_point(const Deformation& d, const PointPattern& p);

struct RankData {
    int L = 0;
    std::vector<int> basis_rows;  // R, 1-based increasing
    std::vector<int> basis_cols;  // C, 1-based increasing
    std::vector<int> row_perm;    // R followed by the other rows
    std::vector<int> col_perm;    // C followed by the other columns
    Q sigma = 1;

    bool is_basis_row(int j) const;
    bool is_basis_col(int k) const;
    std::vector<int> other_rows() const;
    std::vector<int> other_cols() const;
};

Q sigma_of(const Matrix& A);

// reorder_for_point applies the blocks reordering that keeps J_Z out of the basis columns.
RankData rank_and_normalize(const Deformation& d, const PointPattern& p,
                            bool reorder_for_point = false);

enum class ActionType { Degenerate, NonDegenerate, Transitive, Normal };
std::string to_string(ActionType t);
ActionType classify_action(const Deformation& d);

bool is_fixed_point(const Deformation& d, const PointPattern& p);

struct DerivedMonomials {
    std::map<int, Monomial> phi;      // k = 1..m, in lambda
    std::map<int, Monomial> phi_inv;  // j in R, in (tau_C, lambda'')
    std::map<int, Monomial> psi;      // k not in C, in tau
    std::map<int, Vec> psi_coeffs;    // k -> alpha over C (basis column order)
};

DerivedMonomials derive_monomials(const Deformation& d, const RankData& r);

struct BundleSummand {
    int block = 0;
    std::set<int> B;
    std::string N;
    std::string text;
};
std::vector<BundleSummand> bundle_decomposition(const Deformation& d);

// Everything downstream needs about one deformation at one point.
struct Model {
    Deformation d;
    PointPattern p;
    RankData r;
    DerivedMonomials dm;

    static Model make(Deformation d, PointPattern p, bool reorder_for_point = false);
    bool zero(int k) const { return p.is_zero(k); }
    // J_Z intersected with the basis columns, increasing
    std::vector<int> zero_basis_cols() const;
};

nlohmann::json to_json(const Deformation& d);
Deformation deformation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PointPattern& p);
PointPattern point_from_json(const nlohmann::json& j);
std::string matrix_str(const Matrix& A);

}  // namespace mspec
