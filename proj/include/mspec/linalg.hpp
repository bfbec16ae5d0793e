#pragma once

#include "mspec/rational.hpp"

#include <optional>
#include <vector>

namespace mspec {

Matrix zeros(size_t r, size_t c);
Matrix identity(size_t n);
Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
Vec matvec(const Matrix& a, const Vec& x);
Vec vecmat(const Vec& x, const Matrix& a);
Q dot(const Vec& a, const Vec& b);

// row-reduced echelon form in place; returns pivot columns
std::vector<size_t> rref(Matrix& a);
size_t rank(const Matrix& a);
Q det(const Matrix& a);
std::optional<Matrix> inverse(const Matrix& a);
// one solution of a x = b, if any
std::optional<Vec> solve(const Matrix& a, const Vec& b);

Matrix submatrix(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols);
Matrix select_columns(const Matrix& a, const std::vector<int>& cols);
Matrix select_rows(const Matrix& a, const std::vector<int>& rows);

// lexicographically smallest row subset of size rank(a) with independent rows
std::vector<int> lex_basis_rows(const Matrix& a);
// lexicographically smallest column subset making a[rows, cols] invertible
std::vector<int> lex_basis_columns(const Matrix& a, const std::vector<int>& rows);

// primitive integer vector on the same ray (zero stays zero)
Vec primitive(const Vec& v);

}  // namespace mspec
