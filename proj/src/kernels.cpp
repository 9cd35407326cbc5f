#include "snqesa/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#define SNQ_X86 1
#include <immintrin.h>
#else
#define SNQ_X86 0
#endif

namespace snq::kernels {

namespace scalar {

std::size_t count_less_equal(std::span<const double> x, double t) {
  std::size_t c = 0;
  for (double v : x) c += (v <= t) ? 1u : 0u;
  return c;
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double gaussian_kernel_sum(std::span<const double> x, double center, double inv_bw) {
  double s = 0.0;
  for (double v : x) {
    const double z = (v - center) * inv_bw;
    s += std::exp(-0.5 * z * z);
  }
  return s;
}

}  // namespace scalar

#if SNQ_X86

namespace {

__attribute__((target("avx2,fma"))) inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// exp(x) for x <= 0. Cody-Waite reduction x = k·ln2 + r, |r| <= ln2/2, then a
// degree-12 Taylor polynomial (truncation < 2e-16 relative). Lanes below
// -708 flush to zero.
__attribute__((target("avx2,fma"))) inline __m256d exp_nonpositive(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d lower = _mm256_set1_pd(-708.0);

  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lower);
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr double c[13] = {1.0,
                                   1.0,
                                   1.0 / 2.0,
                                   1.0 / 6.0,
                                   1.0 / 24.0,
                                   1.0 / 120.0,
                                   1.0 / 720.0,
                                   1.0 / 5040.0,
                                   1.0 / 40320.0,
                                   1.0 / 362880.0,
                                   1.0 / 3628800.0,
                                   1.0 / 39916800.0,
                                   1.0 / 479001600.0};
  __m256d p = _mm256_set1_pd(c[12]);
  for (int i = 11; i >= 0; --i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_cvtepi32_epi64(k32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d scale = _mm256_castsi256_pd(bits);
  const __m256d y = _mm256_mul_pd(p, scale);
  return _mm256_andnot_pd(underflow, y);
}

}  // namespace

namespace avx2 {

__attribute__((target("avx2,fma"))) std::size_t count_less_equal(std::span<const double> x, double t) {
  const std::size_t n = x.size();
  const double* p = x.data();
  const __m256d tv = _mm256_set1_pd(t);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(p + i);
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, tv, _CMP_LE_OQ));
    c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) c += (p[i] <= t) ? 1u : 0u;
  return c;
}

__attribute__((target("avx2,fma"))) double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  const double* p = x.data();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(p + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(p + i + 4));
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += p[i];
  return s;
}

__attribute__((target("avx2,fma"))) double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 4), _mm256_loadu_pd(pb + i + 4), a1);
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += pa[i] * pb[i];
  return s;
}

__attribute__((target("avx2,fma"))) double gaussian_kernel_sum(std::span<const double> x, double center,
                                                               double inv_bw) {
  const std::size_t n = x.size();
  const double* p = x.data();
  const __m256d c = _mm256_set1_pd(center);
  const __m256d ib = _mm256_set1_pd(inv_bw);
  const __m256d mhalf = _mm256_set1_pd(-0.5);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d z = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(p + i), c), ib);
    acc = _mm256_add_pd(acc, exp_nonpositive(_mm256_mul_pd(mhalf, _mm256_mul_pd(z, z))));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double z = (p[i] - center) * inv_bw;
    s += std::exp(-0.5 * z * z);
  }
  return s;
}

}  // namespace avx2

bool avx2_available() {
  static const bool ok = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return ok;
}

#else  // !SNQ_X86

namespace avx2 {
std::size_t count_less_equal(std::span<const double> x, double t) { return scalar::count_less_equal(x, t); }
double sum(std::span<const double> x) { return scalar::sum(x); }
double dot(std::span<const double> a, std::span<const double> b) { return scalar::dot(a, b); }
double gaussian_kernel_sum(std::span<const double> x, double center, double inv_bw) {
  return scalar::gaussian_kernel_sum(x, center, inv_bw);
}
}  // namespace avx2

bool avx2_available() { return false; }

#endif

Isa active_isa() {
  static const Isa isa = [] {
    const char* force = std::getenv("SNQESA_FORCE_SCALAR");
    if (force != nullptr && std::strcmp(force, "0") != 0 && force[0] != '\0') return Isa::scalar;
    return avx2_available() ? Isa::avx2 : Isa::scalar;
  }();
  return isa;
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

std::size_t count_less_equal(std::span<const double> x, double t) {
  return active_isa() == Isa::avx2 ? avx2::count_less_equal(x, t) : scalar::count_less_equal(x, t);
}

double sum(std::span<const double> x) { return active_isa() == Isa::avx2 ? avx2::sum(x) : scalar::sum(x); }

double dot(std::span<const double> a, std::span<const double> b) {
  return active_isa() == Isa::avx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

double gaussian_kernel_sum(std::span<const double> x, double center, double inv_bw) {
  return active_isa() == Isa::avx2 ? avx2::gaussian_kernel_sum(x, center, inv_bw)
                                   : scalar::gaussian_kernel_sum(x, center, inv_bw);
}

}  // namespace snq::kernels
