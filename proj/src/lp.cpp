#include "mspec/lp.hpp"

#include <stdexcept>

namespace mspec::lp {

namespace {

struct Tableau {
    Matrix a;  // rows x cols
    Vec b;
    std::vector<size_t> basis;
    size_t cols = 0;

    void pivot(size_t r, size_t c) {
        Q inv = 1 / a[r][c];
        for (auto& x : a[r]) x *= inv;
        b[r] *= inv;
        for (size_t i = 0; i < a.size(); ++i) {
            if (i == r || a[i][c] == 0) continue;
            Q f = a[i][c];
            for (size_t j = 0; j < cols; ++j)
                if (a[r][j] != 0) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        basis[r] = c;
    }

    // maximize cost . y over the current tableau; columns with allowed[j] false never enter
    Status optimize(const Vec& cost, const std::vector<bool>& allowed) {
        for (;;) {
            // reduced cost: c_j - c_B B^-1 A_j
            size_t enter = cols;
            for (size_t j = 0; j < cols && enter == cols; ++j) {
                if (!allowed[j]) continue;
                bool in_basis = false;
                for (size_t bj : basis)
                    if (bj == j) in_basis = true;
                if (in_basis) continue;
                Q rc = cost[j];
                for (size_t i = 0; i < a.size(); ++i)
                    if (a[i][j] != 0) rc -= cost[basis[i]] * a[i][j];
                if (rc > 0) enter = j;
            }
            if (enter == cols) return Status::Optimal;
            size_t leave = a.size();
            Q best;
            for (size_t i = 0; i < a.size(); ++i) {
                if (a[i][enter] <= 0) continue;
                Q ratio = b[i] / a[i][enter];
                if (leave == a.size() || ratio < best ||
                    (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == a.size()) return Status::Unbounded;
            pivot(leave, enter);
        }
    }
};

}  // namespace

Result solve(const Problem& p) {
    const size_t n = p.num_vars;
    // column layout: x+ (n), x- for free vars, slacks, artificials
    std::vector<int> neg_col(n, -1);
    size_t cols = n;
    for (size_t j = 0; j < n; ++j)
        if (j < p.free_var.size() && p.free_var[j]) neg_col[j] = int(cols++);
    std::vector<int> slack_col(p.rows.size(), -1);
    for (size_t i = 0; i < p.rows.size(); ++i)
        if (p.rows[i].sense != Sense::EQ) slack_col[i] = int(cols++);
    const size_t art_start = cols;
    cols += p.rows.size();

    Tableau t;
    t.cols = cols;
    t.a = Matrix(p.rows.size(), Vec(cols, Q(0)));
    t.b = Vec(p.rows.size(), Q(0));
    t.basis.resize(p.rows.size());
    for (size_t i = 0; i < p.rows.size(); ++i) {
        const auto& row = p.rows[i];
        if (row.coeffs.size() != n) throw std::invalid_argument("lp: row length mismatch");
        for (size_t j = 0; j < n; ++j) {
            t.a[i][j] = row.coeffs[j];
            if (neg_col[j] >= 0) t.a[i][neg_col[j]] = -row.coeffs[j];
        }
        if (row.sense == Sense::LE) t.a[i][slack_col[i]] = 1;
        if (row.sense == Sense::GE) t.a[i][slack_col[i]] = -1;
        t.b[i] = row.rhs;
        if (t.b[i] < 0) {
            for (auto& x : t.a[i]) x = -x;
            t.b[i] = -t.b[i];
        }
        t.a[i][art_start + i] = 1;
        t.basis[i] = art_start + i;
    }

    std::vector<bool> allowed(cols, true);
    Vec phase1(cols, Q(0));
    for (size_t i = 0; i < p.rows.size(); ++i) phase1[art_start + i] = -1;
    t.optimize(phase1, allowed);
    Q infeas = 0;
    for (size_t i = 0; i < t.b.size(); ++i)
        if (t.basis[i] >= art_start) infeas += t.b[i];
    Result res;
    if (infeas != 0) return res;

    // drive artificials out of the basis, dropping redundant rows
    for (size_t i = 0; i < t.a.size();) {
        if (t.basis[i] < art_start) {
            ++i;
            continue;
        }
        size_t c = art_start;
        for (size_t j = 0; j < art_start; ++j)
            if (t.a[i][j] != 0) {
                c = j;
                break;
            }
        if (c == art_start) {
            t.a.erase(t.a.begin() + long(i));
            t.b.erase(t.b.begin() + long(i));
            t.basis.erase(t.basis.begin() + long(i));
        } else {
            t.pivot(i, c);
            ++i;
        }
    }
    for (size_t j = art_start; j < cols; ++j) allowed[j] = false;

    auto extract = [&]() {
        Vec y(cols, Q(0));
        for (size_t i = 0; i < t.basis.size(); ++i) y[t.basis[i]] = t.b[i];
        Vec x(n, Q(0));
        for (size_t j = 0; j < n; ++j) x[j] = y[j] - (neg_col[j] >= 0 ? y[neg_col[j]] : Q(0));
        return x;
    };

    if (p.objective.empty()) {
        res.status = Status::Optimal;
        res.x = extract();
        return res;
    }
    Vec cost(cols, Q(0));
    for (size_t j = 0; j < n; ++j) {
        cost[j] = p.objective[j];
        if (neg_col[j] >= 0) cost[neg_col[j]] = -p.objective[j];
    }
    Status s = t.optimize(cost, allowed);
    res.status = s;
    res.x = extract();
    if (s == Status::Optimal)
        for (size_t j = 0; j < n; ++j) res.value += p.objective[j] * res.x[j];
    return res;
}

bool feasible(const Problem& p) {
    Problem q = p;
    q.objective.clear();
    return solve(q).feasible();
}

bool strictly_feasible(const Matrix& d) {
    if (d.empty()) return true;
    Problem p(d[0].size());
    p.free_var.assign(p.num_vars, true);
    for (const auto& row : d) p.add(row, Sense::GE, 1);
    return feasible(p);
}

bool in_cone(const Matrix& gens, const Vec& target) { return in_cone(gens, {}, target); }

bool in_cone(const Matrix& gens, const Matrix& lines, const Vec& target) {
    size_t dim = target.size();
    size_t n = gens.size() + lines.size();
    Problem p(n);
    for (size_t j = gens.size(); j < n; ++j) p.free_var[j] = true;
    for (size_t r = 0; r < dim; ++r) {
        Vec row(n, Q(0));
        for (size_t j = 0; j < gens.size(); ++j) row[j] = gens[j][r];
        for (size_t j = 0; j < lines.size(); ++j) row[gens.size() + j] = lines[j][r];
        p.add(row, Sense::EQ, target[r]);
    }
    return feasible(p);
}

}  // namespace mspec::lp
