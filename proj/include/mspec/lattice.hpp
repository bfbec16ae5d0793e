#pragma once

#include "mspec/rational.hpp"

#include <optional>
#include <vector>

namespace mspec {

// Integer coefficients c with sum_i c_i * rows[i] = target, if any (rows may be rational).
std::optional<std::vector<Z>> lattice_solve(const Matrix& rows, const Vec& target);

// Non-negative integer combinations.  Rows listed in `free_rows` may take any integer sign.
struct CombinationQuery {
    Matrix gens;
    Vec target;
    std::vector<bool> zero_gen;  // generators carrying the Zero value
    bool need_zero = false;      // at least one zero generator must be used
    int bound = 200;             // cap on the sum of the non-negative exponents
    long node_budget = 20000;
};

struct CombinationResult {
    enum class Status { Found, None, Undecided } status = Status::None;
    std::vector<Z> coeffs;  // one per generator
};

CombinationResult find_combination(const CombinationQuery& q);

}  // namespace mspec
