#include "mspec/linalg.hpp"

#include <stdexcept>

namespace mspec {

Matrix zeros(size_t r, size_t c) { return Matrix(r, Vec(c, Q(0))); }

Matrix identity(size_t n) {
    Matrix m = zeros(n, n);
    for (size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

Matrix transpose(const Matrix& a) {
    if (a.empty()) return {};
    Matrix t = zeros(a[0].size(), a.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.empty()) return {};
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    if (a[0].size() != k) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c = zeros(n, m);
    for (size_t i = 0; i < n; ++i)
        for (size_t p = 0; p < k; ++p) {
            if (a[i][p] == 0) continue;
            for (size_t j = 0; j < m; ++j) c[i][j] += a[i][p] * b[p][j];
        }
    return c;
}

Vec matvec(const Matrix& a, const Vec& x) {
    Vec out(a.size(), Q(0));
    for (size_t i = 0; i < a.size(); ++i) out[i] = dot(a[i], x);
    return out;
}

Vec vecmat(const Vec& x, const Matrix& a) {
    if (a.empty()) return {};
    Vec out(a[0].size(), Q(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) out[j] += x[i] * a[i][j];
    return out;
}

Q dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    Q s = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

std::vector<size_t> rref(Matrix& a) {
    std::vector<size_t> pivots;
    if (a.empty()) return pivots;
    size_t rows = a.size(), cols = a[0].size(), r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        Q inv = 1 / a[r][c];
        for (auto& x : a[r]) x *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Q f = a[i][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

size_t rank(const Matrix& a) {
    Matrix b = a;
    return rref(b).size();
}

Q det(const Matrix& a) {
    size_t n = a.size();
    if (n == 0) return 1;
    Matrix b = a;
    Q d = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && b[p][c] == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            std::swap(b[p], b[c]);
            d = -d;
        }
        d *= b[c][c];
        for (size_t i = c + 1; i < n; ++i) {
            if (b[i][c] == 0) continue;
            Q f = b[i][c] / b[c][c];
            for (size_t j = c; j < n; ++j) b[i][j] -= f * b[c][j];
        }
    }
    return d;
}

std::optional<Matrix> inverse(const Matrix& a) {
    size_t n = a.size();
    Matrix aug = zeros(n, 2 * n);
    for (size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw std::invalid_argument("inverse: not square");
        for (size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
        aug[i][n + i] = 1;
    }
    auto piv = rref(aug);
    if (piv.size() < n || (n > 0 && piv[n - 1] != n - 1)) return std::nullopt;
    Matrix inv = zeros(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
    return inv;
}

std::optional<Vec> solve(const Matrix& a, const Vec& b) {
    size_t rows = a.size();
    if (rows == 0) return Vec{};
    size_t cols = a[0].size();
    Matrix aug = zeros(rows, cols + 1);
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j) aug[i][j] = a[i][j];
        aug[i][cols] = b[i];
    }
    auto piv = rref(aug);
    if (!piv.empty() && piv.back() == cols) return std::nullopt;
    Vec x(cols, Q(0));
    for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug[r][cols];
    return x;
}

Matrix submatrix(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix s = zeros(rows.size(), cols.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j) s[i][j] = a[rows[i]][cols[j]];
    return s;
}

Matrix select_columns(const Matrix& a, const std::vector<int>& cols) {
    std::vector<int> rows(a.size());
    for (size_t i = 0; i < a.size(); ++i) rows[i] = int(i);
    return submatrix(a, rows, cols);
}

Matrix select_rows(const Matrix& a, const std::vector<int>& rows) {
    Matrix s;
    for (int r : rows) s.push_back(a[r]);
    return s;
}

std::vector<int> lex_basis_rows(const Matrix& a) {
    // greedy selection is lexicographically smallest for a matroid
    std::vector<int> chosen;
    Matrix acc;
    for (size_t i = 0; i < a.size(); ++i) {
        acc.push_back(a[i]);
        if (rank(acc) == acc.size()) {
            chosen.push_back(int(i));
        } else {
            acc.pop_back();
        }
    }
    return chosen;
}

std::vector<int> lex_basis_columns(const Matrix& a, const std::vector<int>& rows) {
    Matrix sub = select_rows(a, rows);
    return lex_basis_rows(transpose(sub));
}

Vec primitive(const Vec& v) {
    Z l = common_denominator(v);
    std::vector<Z> ints;
    Z g = 0;
    for (const auto& q : v) {
        Z n = num(q * Q(l));
        ints.push_back(n);
        g = gcd_z(g, n);
    }
    if (g == 0) return v;
    Vec out;
    for (const auto& n : ints) out.push_back(Q(n / g));
    return out;
}

}  // namespace mspec
