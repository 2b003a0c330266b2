#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lorange {

// Dense column-major matrix; columns are contiguous so the batch kernels
// apply directly to them.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* col(std::size_t j) { return data.data() + j * rows; }
  const double* col(std::size_t j) const { return data.data() + j * rows; }
  double& at(std::size_t i, std::size_t j) { return data[j * rows + i]; }
  double at(std::size_t i, std::size_t j) const { return data[j * rows + i]; }
};

// y_hat = X * beta, accumulated column-wise.
std::vector<double> matvec(const Matrix& x, std::span<const double> beta);

// Copies the rows outside [skip_begin, skip_end) — used for CV folds.
Matrix drop_rows(const Matrix& x, std::size_t skip_begin, std::size_t skip_end);

struct LsqResult {
  std::vector<double> coeffs;
  std::vector<double> residuals;  // y - X*coeffs
  double condition = 0.0;         // singular-value ratio of R
};

// Minimizes ||y - X b||_2 via Householder QR (the matrix is consumed).
// Rank deficiency is detected from the singular-value ratio of R
// (threshold `cond_limit`) and reported as NumericError naming the most
// suspect column. Requires rows > cols.
LsqResult solve_least_squares(Matrix x, std::vector<double> y,
                              std::span<const std::string> col_names = {},
                              double cond_limit = 1e10);

// Singular values of a small dense matrix by one-sided Jacobi, descending.
std::vector<double> singular_values(const Matrix& m);

}  // namespace lorange
