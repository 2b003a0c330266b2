#include <cmath>

#include "lorange/kernels.hpp"

// Scalar reference kernels. These are the semantic definition the SIMD
// variants are tested against; keep them as plain loops.

namespace lorange::kernels::scalar {

void sub_from(double c, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = c - x[i];
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void add_scalar(double c, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] += c;
}

void log10(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::log10(x[i]);
}

void exp10_scale(const double* x, double scale, double mul, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = mul * std::pow(10.0, scale * x[i]);
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc = std::fma(a[i], b[i], acc);
  return acc;
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc = std::fma(d, d, acc);
  }
  return acc;
}

void centered_moments(const double* x, double mean, std::size_t n, double& m2,
                      double& m3) {
  double s2 = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i] - mean;
    const double v2 = v * v;
    s2 += v2;
    s3 += v2 * v;
  }
  m2 = s2;
  m3 = s3;
}

}  // namespace lorange::kernels::scalar
