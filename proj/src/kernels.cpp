#include "lorange/kernels.hpp"

#include <cstdlib>
#include <string>

#include "lorange/errors.hpp"

namespace lorange::kernels {
namespace {

struct Table {
  void (*sub_from)(double, const double*, double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*add_scalar)(double, double*, std::size_t);
  void (*log10)(const double*, double*, std::size_t);
  void (*exp10_scale)(const double*, double, double, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_abs_diff)(const double*, const double*, std::size_t);
  double (*sum_sq_diff)(const double*, const double*, std::size_t);
  void (*centered_moments)(const double*, double, std::size_t, double&, double&);
};

constexpr Table kScalarTable = {
    scalar::sub_from,     scalar::axpy,        scalar::add_scalar,
    scalar::log10,        scalar::exp10_scale, scalar::sum,
    scalar::dot,          scalar::sum_abs_diff, scalar::sum_sq_diff,
    scalar::centered_moments,
};

#if defined(LORANGE_HAVE_AVX2)
constexpr Table kAvx2Table = {
    avx2::sub_from,     avx2::axpy,        avx2::add_scalar,
    avx2::log10,        avx2::exp10_scale, avx2::sum,
    avx2::dot,          avx2::sum_abs_diff, avx2::sum_sq_diff,
    avx2::centered_moments,
};
#endif

bool cpu_has_avx2_fma() {
#if defined(LORANGE_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend pick_default() {
  if (const char* env = std::getenv("LORANGE_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && cpu_has_avx2_fma()) return Backend::avx2;
  }
  return cpu_has_avx2_fma() ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = pick_default();

const Table& table() {
#if defined(LORANGE_HAVE_AVX2)
  if (g_backend == Backend::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

}  // namespace

Backend active_backend() { return g_backend; }

bool backend_supported(Backend b) {
  if (b == Backend::scalar) return true;
  return cpu_has_avx2_fma();
}

void set_backend(Backend b) {
  if (!backend_supported(b))
    throw ConfigError("kernel backend not supported on this machine: " +
                      std::string(backend_name(b)));
  g_backend = b;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

void sub_from(double c, const double* x, double* out, std::size_t n) {
  table().sub_from(c, x, out, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  table().axpy(a, x, y, n);
}
void add_scalar(double c, double* x, std::size_t n) {
  table().add_scalar(c, x, n);
}
void log10(const double* x, double* out, std::size_t n) {
  table().log10(x, out, n);
}
void exp10_scale(const double* x, double scale, double mul, double* out,
                 std::size_t n) {
  table().exp10_scale(x, scale, mul, out, n);
}
double sum(const double* x, std::size_t n) { return table().sum(x, n); }
double dot(const double* a, const double* b, std::size_t n) {
  return table().dot(a, b, n);
}
double sum_abs_diff(const double* a, const double* b, std::size_t n) {
  return table().sum_abs_diff(a, b, n);
}
double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  return table().sum_sq_diff(a, b, n);
}
void centered_moments(const double* x, double mean, std::size_t n, double& m2,
                      double& m3) {
  table().centered_moments(x, mean, n, m2, m3);
}

}  // namespace lorange::kernels
