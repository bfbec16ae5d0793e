#include "mspec/lattice.hpp"

#include "mspec/lp.hpp"

#include <set>
#include <sstream>

namespace mspec {

namespace {

using ZVec = std::vector<Z>;
using ZMat = std::vector<ZVec>;

Z scale_of(const Matrix& rows, const Vec& target) {
    Z d = common_denominator(target);
    for (const auto& r : rows) d = lcm_z(d, common_denominator(r));
    return d;
}

ZVec to_int(const Vec& v, const Z& d) {
    ZVec out;
    for (const auto& x : v) out.push_back(num(x * d));
    return out;
}

}  // namespace

std::optional<std::vector<Z>> lattice_solve(const Matrix& rows, const Vec& target) {
    size_t r = rows.size(), n = target.size();
    if (r == 0) {
        for (const auto& x : target)
            if (x != 0) return std::nullopt;
        return std::vector<Z>{};
    }
    Z d = scale_of(rows, target);
    ZMat b;
    for (const auto& row : rows) b.push_back(to_int(row, d));
    ZVec t = to_int(target, d);
    // u tracks b_current = u * b_original
    ZMat u(r, ZVec(r, 0));
    for (size_t i = 0; i < r; ++i) u[i][i] = 1;
    auto sub = [&](size_t dst, size_t src, const Z& f) {
        for (size_t j = 0; j < n; ++j) b[dst][j] -= f * b[src][j];
        for (size_t j = 0; j < r; ++j) u[dst][j] -= f * u[src][j];
    };
    std::vector<std::pair<size_t, size_t>> pivots;  // (row, col)
    size_t p = 0;
    for (size_t c = 0; c < n && p < r; ++c) {
        for (;;) {
            // smallest nonzero |entry| in column c among rows >= p
            size_t best = r;
            for (size_t i = p; i < r; ++i)
                if (b[i][c] != 0 && (best == r || abs(b[i][c]) < abs(b[best][c]))) best = i;
            if (best == r) break;
            std::swap(b[p], b[best]);
            std::swap(u[p], u[best]);
            bool done = true;
            for (size_t i = p + 1; i < r; ++i) {
                if (b[i][c] == 0) continue;
                Z f = b[i][c] / b[p][c];
                sub(i, p, f);
                if (b[i][c] != 0) done = false;
            }
            if (done) break;
        }
        if (b[p][c] != 0) {
            pivots.push_back({p, c});
            ++p;
        }
    }
    ZVec y(r, 0);
    for (auto [row, col] : pivots) {
        for (size_t c = 0; c < col; ++c)
            if (t[c] != 0) return std::nullopt;
        if (t[col] % b[row][col] != 0) return std::nullopt;
        Z f = t[col] / b[row][col];
        y[row] = f;
        for (size_t j = 0; j < n; ++j) t[j] -= f * b[row][j];
    }
    for (const auto& x : t)
        if (x != 0) return std::nullopt;
    std::vector<Z> out(r, 0);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) out[j] += y[i] * u[i][j];
    return out;
}

namespace {

struct Search {
    const CombinationQuery& q;
    std::vector<size_t> nonneg;                      // generator indices searched by DFS
    std::vector<std::pair<size_t, size_t>> free_pairs;  // (g, inverse of g)
    std::set<std::string> failed;
    long nodes = 0;
    bool budget_hit = false;
    std::vector<Z> coeffs;

    explicit Search(const CombinationQuery& query) : q(query) {}

    size_t dim() const { return q.target.size(); }

    // relaxation over nonneg[i..] plus the free generators
    lp::Problem relaxation(size_t i, const Vec& residual, const Q& cap, bool need_zero) const {
        size_t nn = nonneg.size() - i, nf = free_pairs.size();
        lp::Problem pr(nn + nf);
        for (size_t k = 0; k < nf; ++k) pr.free_var[nn + k] = true;
        for (size_t c = 0; c < dim(); ++c) {
            Vec row(nn + nf, Q(0));
            for (size_t k = 0; k < nn; ++k) row[k] = q.gens[nonneg[i + k]][c];
            for (size_t k = 0; k < nf; ++k) row[nn + k] = q.gens[free_pairs[k].first][c];
            pr.add(row, lp::Sense::EQ, residual[c]);
        }
        if (cap >= 0) {
            Vec row(nn + nf, Q(0));
            for (size_t k = 0; k < nn; ++k) row[k] = 1;
            pr.add(row, lp::Sense::LE, cap);
        }
        if (need_zero) {
            Vec row(nn + nf, Q(0));
            for (size_t k = 0; k < nn; ++k)
                if (q.zero_gen[nonneg[i + k]]) row[k] = 1;
            pr.add(row, lp::Sense::GE, 1);
        }
        return pr;
    }

    std::string key(size_t i, const Vec& residual, long cap, bool need_zero) const {
        std::ostringstream os;
        os << i << '|' << cap << '|' << need_zero;
        for (const auto& x : residual) os << '|' << x;
        return os.str();
    }

    bool leaf(const Vec& residual) {
        Matrix rows;
        for (auto [g, inv] : free_pairs) rows.push_back(q.gens[g]);
        auto sol = lattice_solve(rows, residual);
        if (!sol) return false;
        for (size_t k = 0; k < free_pairs.size(); ++k) {
            const Z& c = (*sol)[k];
            if (c >= 0)
                coeffs[free_pairs[k].first] = c;
            else
                coeffs[free_pairs[k].second] = -c;
        }
        return true;
    }

    bool dfs(size_t i, const Vec& residual, long cap, bool need_zero) {
        if (i == nonneg.size()) return !need_zero && leaf(residual);
        std::string k = key(i, residual, cap, need_zero);
        if (failed.count(k)) return false;
        if (++nodes > q.node_budget) {
            budget_hit = true;
            return false;
        }
        auto pr = relaxation(i, residual, Q(cap), need_zero);
        Vec obj(pr.num_vars, Q(0));
        obj[0] = 1;
        pr.objective = obj;
        auto hi = lp::solve(pr);
        if (hi.status == lp::Status::Infeasible) {
            failed.insert(k);
            return false;
        }
        obj[0] = -1;
        pr.objective = obj;
        auto lo = lp::solve(pr);
        long amin = to_ll(ceil_q(-lo.value));
        long amax = hi.status == lp::Status::Unbounded ? cap : std::min<long>(cap, to_ll(floor_q(hi.value)));
        size_t g = nonneg[i];
        for (long a = amin; a <= amax; ++a) {
            Vec next = residual;
            for (size_t c = 0; c < dim(); ++c) next[c] -= Q(a) * q.gens[g][c];
            coeffs[g] = a;
            if (dfs(i + 1, next, cap - a, need_zero && !(a > 0 && q.zero_gen[g]))) return true;
            if (budget_hit) return false;
        }
        coeffs[g] = 0;
        failed.insert(k);
        return false;
    }
};

bool is_zero_vec(const Vec& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

}  // namespace

CombinationResult find_combination(const CombinationQuery& q) {
    using S = CombinationResult::Status;
    size_t n = q.gens.size();
    std::vector<bool> zero_gen = q.zero_gen;
    zero_gen.resize(n, false);
    CombinationQuery query = q;
    query.zero_gen = zero_gen;
    Search s(query);
    s.coeffs.assign(n, 0);
    bool need_zero = q.need_zero;

    std::vector<bool> used(n, false);
    for (size_t i = 0; i < n; ++i) {
        if (!is_zero_vec(q.gens[i])) continue;
        used[i] = true;
        // a zero-valued unit satisfies the Zero requirement on its own
        if (zero_gen[i] && need_zero) {
            s.coeffs[i] = 1;
            need_zero = false;
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (used[i] || zero_gen[i]) continue;
        for (size_t j = i + 1; j < n; ++j) {
            if (used[j] || zero_gen[j]) continue;
            bool inv = true;
            for (size_t c = 0; c < q.target.size() && inv; ++c) inv = q.gens[i][c] == -q.gens[j][c];
            if (inv) {
                s.free_pairs.push_back({i, j});
                used[i] = used[j] = true;
                break;
            }
        }
    }
    for (size_t i = 0; i < n; ++i)
        if (!used[i]) s.nonneg.push_back(i);

    CombinationResult out;
    // exact obstructions first: rational cone and integer lattice
    auto root = s.relaxation(0, q.target, Q(-1), need_zero);
    if (!lp::feasible(root)) return out;
    Matrix all;
    for (size_t i : s.nonneg) all.push_back(q.gens[i]);
    for (auto [g, inv] : s.free_pairs) all.push_back(q.gens[g]);
    if (!lattice_solve(all, q.target)) return out;

    Vec sum_obj(root.num_vars, Q(0));
    for (size_t k = 0; k < s.nonneg.size(); ++k) sum_obj[k] = 1;
    root.objective = sum_obj;
    auto total = lp::solve(root);
    bool complete = total.status == lp::Status::Optimal && total.value <= q.bound;

    if (s.dfs(0, q.target, q.bound, need_zero)) {
        out.status = S::Found;
        out.coeffs = s.coeffs;
        return out;
    }
    out.status = (complete && !s.budget_hit) ? S::None : S::Undecided;
    return out;
}

}  // namespace mspec
