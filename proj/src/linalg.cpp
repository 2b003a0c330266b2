#include "lorange/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lorange/errors.hpp"
#include "lorange/kernels.hpp"

namespace lorange {

std::vector<double> matvec(const Matrix& x, std::span<const double> beta) {
  std::vector<double> out(x.rows, 0.0);
  for (std::size_t j = 0; j < x.cols; ++j)
    kernels::axpy(beta[j], x.col(j), out.data(), x.rows);
  return out;
}

Matrix drop_rows(const Matrix& x, std::size_t skip_begin,
                 std::size_t skip_end) {
  const std::size_t removed = skip_end - skip_begin;
  Matrix out(x.rows - removed, x.cols);
  for (std::size_t j = 0; j < x.cols; ++j) {
    const double* src = x.col(j);
    double* dst = out.col(j);
    std::copy(src, src + skip_begin, dst);
    std::copy(src + skip_end, src + x.rows, dst + skip_begin);
  }
  return out;
}

std::vector<double> singular_values(const Matrix& m) {
  Matrix a = m;
  const std::size_t n = a.rows;
  const std::size_t p = a.cols;
  const double eps = std::numeric_limits<double>::epsilon();

  // One-sided Jacobi: rotate column pairs until mutually orthogonal.
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        const double aii = kernels::dot(a.col(i), a.col(i), n);
        const double ajj = kernels::dot(a.col(j), a.col(j), n);
        const double aij = kernels::dot(a.col(i), a.col(j), n);
        if (std::fabs(aij) <= eps * std::sqrt(aii * ajj)) continue;
        rotated = true;
        const double zeta = (ajj - aii) / (2.0 * aij);
        const double t = std::copysign(
            1.0 / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta)), zeta);
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        double* ci = a.col(i);
        double* cj = a.col(j);
        for (std::size_t r = 0; r < n; ++r) {
          const double vi = ci[r];
          const double vj = cj[r];
          ci[r] = cs * vi - sn * vj;
          cj[r] = sn * vi + cs * vj;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(p);
  for (std::size_t j = 0; j < p; ++j)
    sv[j] = std::sqrt(kernels::dot(a.col(j), a.col(j), n));
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

LsqResult solve_least_squares(Matrix x, std::vector<double> y,
                              std::span<const std::string> col_names,
                              double cond_limit) {
  const std::size_t n = x.rows;
  const std::size_t p = x.cols;
  if (y.size() != n)
    throw NumericError("least squares: y length does not match X rows");
  if (n <= p)
    throw NumericError("least squares: need more rows than columns (" +
                       std::to_string(n) + " rows, " + std::to_string(p) +
                       " columns)");

  // Householder QR; column j keeps its reflector v below the diagonal,
  // rdiag holds the diagonal of R.
  std::vector<double> rdiag(p, 0.0);
  std::vector<double> vtv(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double* cj = x.col(j) + j;
    const std::size_t len = n - j;
    const double sigma = kernels::dot(cj, cj, len);
    if (sigma == 0.0) {
      rdiag[j] = 0.0;
      vtv[j] = 0.0;
      continue;
    }
    const double alpha = -std::copysign(std::sqrt(sigma), cj[0]);
    const double x0 = cj[0];
    const double v0 = x0 - alpha;
    cj[0] = v0;
    rdiag[j] = alpha;
    vtv[j] = sigma - x0 * x0 + v0 * v0;
    for (std::size_t k = j + 1; k < p; ++k) {
      double* ck = x.col(k) + j;
      const double w = kernels::dot(cj, ck, len);
      kernels::axpy(-2.0 * w / vtv[j], cj, ck, len);
    }
    double* yk = y.data() + j;
    const double wy = kernels::dot(cj, yk, len);
    kernels::axpy(-2.0 * wy / vtv[j], cj, yk, len);
  }

  // Condition check on R before back-substitution.
  Matrix r(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < j; ++i) r.at(i, j) = x.at(i, j);
    r.at(j, j) = rdiag[j];
  }
  const auto sv = singular_values(r);
  const double smax = sv.front();
  const double smin = sv.back();
  const double cond = smin > 0.0 ? smax / smin
                                 : std::numeric_limits<double>::infinity();
  if (!(cond < cond_limit)) {
    std::size_t worst = 0;
    double worst_abs = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p; ++j)
      if (std::fabs(rdiag[j]) < worst_abs) {
        worst_abs = std::fabs(rdiag[j]);
        worst = j;
      }
    const std::string name = worst < col_names.size()
                                 ? col_names[worst]
                                 : "#" + std::to_string(worst);
    throw NumericError(
        "design matrix is rank-deficient or ill-conditioned (condition " +
        std::to_string(cond) + ", offending column " + name + ")");
  }

  LsqResult result;
  result.condition = cond;
  result.coeffs.assign(p, 0.0);
  for (std::size_t jj = p; jj-- > 0;) {
    double s = y[jj];
    for (std::size_t k = jj + 1; k < p; ++k)
      s -= x.at(jj, k) * result.coeffs[k];
    result.coeffs[jj] = s / rdiag[jj];
  }

  // Residuals = Q * [0, qty_tail]: zero the head of Q^T y and apply the
  // reflectors in reverse.
  std::vector<double> w(n, 0.0);
  std::copy(y.begin() + static_cast<std::ptrdiff_t>(p), y.end(),
            w.begin() + static_cast<std::ptrdiff_t>(p));
  for (std::size_t jj = p; jj-- > 0;) {
    if (vtv[jj] == 0.0) continue;
    const double* vj = x.col(jj) + jj;
    double* wj = w.data() + jj;
    const std::size_t len = n - jj;
    const double s = kernels::dot(vj, wj, len);
    kernels::axpy(-2.0 * s / vtv[jj], vj, wj, len);
  }
  result.residuals = std::move(w);
  return result;
}

}  // namespace lorange
