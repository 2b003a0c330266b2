#if defined(LORANGE_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "lorange/kernels.hpp"

// AVX2+FMA variants of the batch kernels. Four lanes per iteration, scalar
// tail. Reductions keep a fixed lane-combine order so results are
// deterministic for a given backend.

namespace lorange::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

// Exact conversion of small non-negative 64-bit lane values to double.
inline __m256d u64_small_to_pd(__m256i v) {
  const __m256i magic_i = _mm256_set1_epi64x(0x4330000000000000ll);  // 2^52
  __m256d d = _mm256_castsi256_pd(_mm256_or_si256(v, magic_i));
  return _mm256_sub_pd(d, _mm256_set1_pd(4503599627370496.0));
}

constexpr double kLog2Of10 = 3.3219280948873623478703194294894;
constexpr double kLn2 = 0.6931471805599453094172321214582;
constexpr double kLog10Of2 = 0.3010299956639811952137388947245;
constexpr double kInvLn10 = 0.4342944819032518276511289189166;
constexpr double kSqrt2 = 1.4142135623730950488016887242097;

// exp(u) on |u| <= 0.35, Taylor degree 13 (truncation < 1e-17 relative).
inline __m256d exp_poly(__m256d u) {
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0));
  return p;
}

// 10^t4 for four lanes, t = x*scale already applied by the caller.
inline __m256d exp10_vec(__m256d t) {
  // Out-of-range lanes are blended to 0/inf after the main path.
  const __m256d t_hi = _mm256_set1_pd(1023.5);
  const __m256d t_lo = _mm256_set1_pd(-1021.5);
  __m256d tc = _mm256_min_pd(_mm256_max_pd(t, _mm256_set1_pd(-1100.0)),
                             _mm256_set1_pd(1100.0));
  __m256d k = _mm256_round_pd(tc, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(tc, k);
  __m256d u = _mm256_mul_pd(r, _mm256_set1_pd(kLn2));
  __m256d p = exp_poly(u);

  __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  __m256d two_k = _mm256_castsi256_pd(bits);
  __m256d res = _mm256_mul_pd(p, two_k);

  __m256d inf = _mm256_set1_pd(HUGE_VAL);
  __m256d zero = _mm256_setzero_pd();
  res = _mm256_blendv_pd(res, inf, _mm256_cmp_pd(t, t_hi, _CMP_GT_OQ));
  res = _mm256_blendv_pd(res, zero, _mm256_cmp_pd(t, t_lo, _CMP_LT_OQ));
  return res;
}

// log10 for four positive normal lanes; non-positive lanes yield NaN.
inline __m256d log10_vec(__m256d x) {
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000ll);
  __m256i xi = _mm256_castpd_si256(x);

  __m256i ebits = _mm256_srli_epi64(xi, 52);
  __m256d e = _mm256_sub_pd(u64_small_to_pd(ebits), _mm256_set1_pd(1023.0));
  __m256d m =
      _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(xi, mant_mask), one_bits));

  // Remap mantissa to [sqrt(2)/2, sqrt(2)) so |ln m| stays small.
  __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  __m256d s = _mm256_div_pd(f, _mm256_add_pd(f, _mm256_set1_pd(2.0)));
  __m256d z = _mm256_mul_pd(s, s);

  // atanh series: ln(m) = 2s * sum z^k/(2k+1), k = 0..10.
  __m256d p = _mm256_set1_pd(1.0 / 21.0);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 3.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0));
  __m256d ln_m = _mm256_mul_pd(_mm256_add_pd(s, s), p);

  __m256d out = _mm256_fmadd_pd(e, _mm256_set1_pd(kLog10Of2),
                                _mm256_mul_pd(ln_m, _mm256_set1_pd(kInvLn10)));

  __m256d bad = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LE_OQ);
  return _mm256_blendv_pd(out, _mm256_set1_pd(NAN), bad);
}

}  // namespace

void sub_from(double c, const double* x, double* out, std::size_t n) {
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_sub_pd(cv, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = c - x[i];
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void add_scalar(double c, double* x, std::size_t n) {
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), cv));
  for (; i < n; ++i) x[i] += c;
}

void log10(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, log10_vec(_mm256_loadu_pd(x + i)));
  if (i < n) {
    double buf_in[4] = {1.0, 1.0, 1.0, 1.0};
    double buf_out[4];
    for (std::size_t j = i; j < n; ++j) buf_in[j - i] = x[j];
    _mm256_storeu_pd(buf_out, log10_vec(_mm256_loadu_pd(buf_in)));
    for (std::size_t j = i; j < n; ++j) out[j] = buf_out[j - i];
  }
}

void exp10_scale(const double* x, double scale, double mul, double* out,
                 std::size_t n) {
  const __m256d sv = _mm256_set1_pd(scale * kLog2Of10);
  const __m256d mv = _mm256_set1_pd(mul);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(_mm256_loadu_pd(x + i), sv);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(mv, exp10_vec(t)));
  }
  if (i < n) {
    double buf_in[4] = {0.0, 0.0, 0.0, 0.0};
    double buf_out[4];
    for (std::size_t j = i; j < n; ++j) buf_in[j - i] = x[j];
    __m256d t = _mm256_mul_pd(_mm256_loadu_pd(buf_in), sv);
    _mm256_storeu_pd(buf_out, _mm256_mul_pd(mv, exp10_vec(t)));
    for (std::size_t j = i; j < n; ++j) out[j] = buf_out[j - i];
  }
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r = std::fma(a[i], b[i], r);
  return r;
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, d));
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += std::fabs(a[i] - b[i]);
  return r;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    r = std::fma(d, d, r);
  }
  return r;
}

void centered_moments(const double* x, double mean, std::size_t n, double& m2,
                      double& m3) {
  const __m256d mv = _mm256_set1_pd(mean);
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_sub_pd(_mm256_loadu_pd(x + i), mv);
    __m256d v2 = _mm256_mul_pd(v, v);
    acc2 = _mm256_add_pd(acc2, v2);
    acc3 = _mm256_fmadd_pd(v2, v, acc3);
  }
  double r2 = hsum(acc2);
  double r3 = hsum(acc3);
  for (; i < n; ++i) {
    const double v = x[i] - mean;
    const double v2 = v * v;
    r2 += v2;
    r3 += v2 * v;
  }
  m2 = r2;
  m3 = r3;
}

}  // namespace lorange::kernels::avx2

#endif  // LORANGE_HAVE_AVX2
