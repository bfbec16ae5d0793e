#pragma once

#include "mspec/rational.hpp"

#include <vector>

namespace mspec::lp {

enum class Sense { LE, GE, EQ };

struct Constraint {
    Vec coeffs;
    Sense sense = Sense::EQ;
    Q rhs = 0;
};

struct Problem {
    size_t num_vars = 0;
    std::vector<Constraint> rows;
    std::vector<bool> free_var;  // default: x >= 0
    Vec objective;               // maximized; empty means feasibility only

    explicit Problem(size_t n = 0) : num_vars(n), free_var(n, false) {}
    void add(Vec coeffs, Sense s, Q rhs) { rows.push_back({std::move(coeffs), s, std::move(rhs)}); }
};

enum class Status { Infeasible, Optimal, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    Q value = 0;
    Vec x;
    bool feasible() const { return status != Status::Infeasible; }
};

// Exact two-phase simplex with Bland's rule.
Result solve(const Problem& p);

bool feasible(const Problem& p);

// Is there x with <d_r, x> > 0 for every row r?  (x free)
bool strictly_feasible(const Matrix& d);

// Is target a non-negative rational combination of gens?
bool in_cone(const Matrix& gens, const Vec& target);

// Is target in cone(gens) + span(lines)?
bool in_cone(const Matrix& gens, const Matrix& lines, const Vec& target);

}  // namespace mspec::lp
