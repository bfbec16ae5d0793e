#pragma once

#include "mspec/deformation.hpp"
#include "mspec/semigroup.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mspec {

// sum_k nu_k(f) beta_k; lambda exponents are ignored (lambda'' = 1)
Q log_at_exp_beta(const Monomial& f, const Vec& beta);

enum class RestrictionCase { SameRank, RankPlusOne };
std::string to_string(RestrictionCase c);

// Condition tags carried by failing witnesses.
inline constexpr const char* kZeroValueSign = "zero-value-sign";        // v = 0 needs log f(e^beta) >= 0
inline constexpr const char* kUnitValueBalance = "unit-value-balance";  // v != 0 needs log f(e^beta) = 0
inline constexpr const char* kFreeColumnExponent = "free-column-exponent";  // b_k = 0 off the pivot

struct RestrictionWitness {
    GenPair pair;
    Q log_value;
    std::string condition;
};

struct RestrictionVerdict {
    RestrictionCase kase = RestrictionCase::SameRank;
    bool holds = true;
    std::map<int, Q> b_values;  // phi_inv (basis rows) and psi (other columns)
    std::vector<RestrictionWitness> witnesses;
    std::vector<std::string> citations;  // distinct failed condition tags
    std::vector<int> failed_columns;     // columns violating the free-column condition
    // same rank: beta is a non-negative combination of the basis rows
    bool cone_sufficient = false;
    // rank + 1: pivot column and the transformed monomials of B
    int pivot = 0;
    std::map<int, Monomial> phi_inv_B;
    std::map<int, Monomial> psi_B;
    // flagged when Fq carries no pair with a nonzero value
    bool no_unit_pairs = false;
    GenSet Fq;
};

Deformation with_row(const Deformation& d, const Vec& beta);
// The model of B = A plus the row beta at the same point.
Model restricted_model(const Model& a, const Vec& beta);

RestrictionVerdict check_same_rank(const Model& a, const Vec& beta);
RestrictionVerdict check_rank_plus_one(const Model& a, const Vec& beta);
// dispatches on rank(B) - rank(A)
RestrictionVerdict check_restriction(const Model& a, const Vec& beta);

struct H2Step {
    int removed = 0;                // submanifold index dropped at this step
    int zero_block = 0;             // block that vanishes on the restriction
    bool closed_form_matches = false;
    bool psi_log_one = false;       // log of the pivot psi at e^beta is 1
    bool phi_logs_binary = false;   // every log phi_inv(e^beta) is 0 or 1
    RestrictionVerdict verdict;
};

struct H2Report {
    bool holds = true;
    std::pair<int, int> violation{0, 0};  // first overlapping pair
    bool normal_type = false;
    std::vector<int> block_of;              // submanifold j -> block index (1-based, index 0 unused)
    std::map<int, Monomial> closed_form;    // phi_inv of the full family, by submanifold
    bool closed_form_matches = false;       // agrees with the linear algebra
    bool compatible = false;
    std::vector<H2Step> steps;
};

H2Report check_H2_subfamily(const std::vector<std::set<int>>& I_sets, const std::set<int>& subset);

}  // namespace mspec
