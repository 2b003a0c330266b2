#pragma once

#include <cstddef>
#include <string_view>

// Batch kernels for the data-parallel inner loops: path loss formation,
// design-matrix columns, distance inversion, and metric reductions.
// Every kernel has a scalar reference implementation and (on x86-64) an
// AVX2+FMA variant; the active backend is chosen at runtime from cpuid
// and can be overridden for testing with set_backend() or the
// LORANGE_KERNELS environment variable ("scalar"/"avx2").
//
// The elementwise linear kernels (sub_from, axpy) are bit-identical across
// backends. The transcendental kernels (log10, exp10_scale) agree with the
// scalar/libm reference to ~1e-14 relative on positive normal inputs with
// |scale*x| <= 300; the reductions agree to ~1e-12 relative (summation
// order differs between backends).

namespace lorange::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend b);
void set_backend(Backend b);  // throws ConfigError if unsupported
std::string_view backend_name(Backend b);

// out[i] = c - x[i]
void sub_from(double c, const double* x, double* out, std::size_t n);

// y[i] += a * x[i]  (fused multiply-add in both backends)
void axpy(double a, const double* x, double* y, std::size_t n);

// x[i] += c
void add_scalar(double c, double* x, std::size_t n);

// out[i] = log10(x[i]); x must be positive and normal
void log10(const double* x, double* out, std::size_t n);

// out[i] = mul * 10^(scale * x[i])
void exp10_scale(const double* x, double scale, double mul, double* out,
                 std::size_t n);

double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);

// m2 = sum (x[i]-mean)^2, m3 = sum (x[i]-mean)^3
void centered_moments(const double* x, double mean, std::size_t n, double& m2,
                      double& m3);

// Direct access to a specific backend, used by the equivalence tests.
namespace scalar {
void sub_from(double c, const double* x, double* out, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void add_scalar(double c, double* x, std::size_t n);
void log10(const double* x, double* out, std::size_t n);
void exp10_scale(const double* x, double scale, double mul, double* out,
                 std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void centered_moments(const double* x, double mean, std::size_t n, double& m2,
                      double& m3);
}  // namespace scalar

#if defined(LORANGE_HAVE_AVX2)
namespace avx2 {
void sub_from(double c, const double* x, double* out, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void add_scalar(double c, double* x, std::size_t n);
void log10(const double* x, double* out, std::size_t n);
void exp10_scale(const double* x, double scale, double mul, double* out,
                 std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void centered_moments(const double* x, double mean, std::size_t n, double& m2,
                      double& m3);
}  // namespace avx2
#endif

}  // namespace lorange::kernels
