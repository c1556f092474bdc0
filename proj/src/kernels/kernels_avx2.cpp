// AVX2/FMA variants of the node kernels. Compiled with target attributes so the
// rest of the library stays baseline x86-64; dispatch.cpp only hands these out
// after a CPUID check.

#include "qflat/kernels.hpp"

#include "log_terms.hpp"

#include <immintrin.h>

#include <array>
#include <cmath>
#include <limits>

#define QFLAT_AVX2 __attribute__((target("avx2,fma")))

namespace qflat::kernels::avx2 {

namespace {

// ln(sh t / t) = sum_k 2^{2k} B_{2k} t^{2k} / (2k (2k)!), used for t < 0.5.
constexpr std::array<double, 13> kSinhcSeries = {
    1.6666666666666666667e-1,  -5.5555555555555555556e-3, 3.5273368606701940035e-4,
    -2.6455026455026455026e-5, 2.1377799155576933355e-6,  -1.8036702340053310071e-7,
    1.5661391322766984143e-8,  -1.3884130493737299423e-9, 1.250435917600499603e-10,
    -1.1402575602296091433e-11, 1.0502923908637556408e-12, -9.7548778415937016497e-14,
    9.1234682308590978058e-15};

constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;

QFLAT_AVX2 inline __m256d set1(double v) { return _mm256_set1_pd(v); }

// e^x for x in double range; 0 below -708, +inf above 709.
QFLAT_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d lo = set1(-708.0);
  const __m256d hi = set1(709.0);
  const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(xc, set1(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, set1(kLn2Hi), xc);
  r = _mm256_fnmadd_pd(k, set1(kLn2Lo), r);

  // Taylor polynomial to degree 13 on |r| <= ln2/2.
  __m256d p = set1(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, set1(0.5));
  p = _mm256_fmadd_pd(p, r, set1(1.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0));

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  const __m256i k64 = _mm256_cvtepi32_epi64(k32);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));

  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), _mm256_cmp_pd(x, lo, _CMP_LT_OQ));
  result = _mm256_blendv_pd(result, set1(std::numeric_limits<double>::infinity()),
                            _mm256_cmp_pd(x, hi, _CMP_GT_OQ));
  return result;
}

// ln x for x >= 0: -inf at 0, +inf at +inf, subnormals rescaled.
QFLAT_AVX2 inline __m256d log_pd(__m256d x) {
  const __m256d tiny = _mm256_cmp_pd(x, set1(std::numeric_limits<double>::min()), _CMP_LT_OQ);
  const __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, set1(18014398509481984.0)), tiny);
  const __m256d bias = _mm256_blendv_pd(set1(1023.0), set1(1023.0 + 54.0), tiny);

  const __m256i xi = _mm256_castpd_si256(xs);
  const __m256i exponent_bits = _mm256_srli_epi64(xi, 52);
  // exponent field -> double via the 2^52 trick
  const __m256d two52 = set1(4503599627370496.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(exponent_bits, _mm256_castpd_si256(two52))), two52);
  e = _mm256_sub_pd(e, bias);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(xi, mant_mask), one_bits));

  const __m256d big = _mm256_cmp_pd(m, set1(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, set1(1.0)), big);

  const __m256d f = _mm256_sub_pd(m, set1(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(f, set1(2.0)));
  const __m256d s2 = _mm256_mul_pd(s, s);
  // 2 atanh(s) = 2 s sum_k s^{2k}/(2k+1), |s| <= 0.1716
  __m256d p = set1(1.0 / 25.0);
  for (int k = 11; k >= 0; --k) p = _mm256_fmadd_pd(p, s2, set1(1.0 / (2 * k + 1)));
  const __m256d log_m = _mm256_mul_pd(_mm256_add_pd(s, s), p);
  __m256d result = _mm256_fmadd_pd(e, set1(kLn2Hi), _mm256_fmadd_pd(e, set1(kLn2Lo), log_m));

  result = _mm256_blendv_pd(result, set1(-std::numeric_limits<double>::infinity()),
                            _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_EQ_OQ));
  result = _mm256_blendv_pd(result, x,
                            _mm256_cmp_pd(x, set1(std::numeric_limits<double>::infinity()),
                                          _CMP_EQ_OQ));
  return result;
}

QFLAT_AVX2 inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(set1(-0.0), x);
}

QFLAT_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Coefficient of z^power: normal order where x <= 1, reversed where x > 1.
QFLAT_AVX2 inline __m256d blend_coef(std::span<const double> a, std::size_t power,
                                     std::size_t degree, __m256d reversed) {
  return _mm256_blendv_pd(set1(a[power]), set1(a[degree - power]), reversed);
}

QFLAT_AVX2 void log_integrand4(const LogIntegrand& f, const double* t_in, double* log_out,
                               double* sign_out) {
  const std::size_t degree = f.coeffs.size() - 1;
  const __m256d t = _mm256_loadu_pd(t_in);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d lt = log_pd(t);
  const __m256d e2 = exp_pd(_mm256_mul_pd(t, set1(-2.0)));
  const __m256d ln2 = set1(std::numbers::ln2);

  // ln(sh t / t): series below 0.5, closed form above.
  const __m256d t2 = _mm256_mul_pd(t, t);
  __m256d series = set1(kSinhcSeries.back());
  for (std::size_t k = kSinhcSeries.size() - 1; k-- > 0;)
    series = _mm256_fmadd_pd(series, t2, set1(kSinhcSeries[k]));
  series = _mm256_mul_pd(series, t2);
  const __m256d closed =
      _mm256_sub_pd(_mm256_add_pd(_mm256_sub_pd(t, ln2), log_pd(_mm256_sub_pd(set1(1.0), e2))), lt);
  const __m256d small = _mm256_cmp_pd(t, set1(0.5), _CMP_LT_OQ);
  const __m256d lsc = _mm256_blendv_pd(closed, series, small);

  const __m256d lch = _mm256_add_pd(_mm256_sub_pd(t, ln2), log_pd(_mm256_add_pd(set1(1.0), e2)));

  // Horner in x = sh^2 t when x <= 1, in 1/x otherwise.
  const __m256d ln_x = _mm256_mul_pd(set1(2.0), _mm256_add_pd(lsc, lt));
  const __m256d big = _mm256_cmp_pd(ln_x, zero, _CMP_GT_OQ);
  const __m256d z = exp_pd(_mm256_sub_pd(zero, abs_pd(ln_x)));
  const auto& a = f.coeffs;
  __m256d s = blend_coef(a, degree, degree, big);
  __m256d c = zero;
  for (std::size_t k = degree; k-- > 0;) {
    const __m256d p = _mm256_mul_pd(s, z);
    const __m256d pi = _mm256_fmsub_pd(s, z, p);
    const __m256d ak = blend_coef(a, k, degree, big);
    const __m256d sk = _mm256_add_pd(p, ak);
    const __m256d zz = _mm256_sub_pd(sk, p);
    const __m256d sigma =
        _mm256_add_pd(_mm256_sub_pd(p, _mm256_sub_pd(sk, zz)), _mm256_sub_pd(ak, zz));
    s = sk;
    c = _mm256_fmadd_pd(c, z, _mm256_add_pd(pi, sigma));
  }
  const __m256d pval = _mm256_add_pd(s, c);
  const __m256d pos = _mm256_cmp_pd(pval, zero, _CMP_GT_OQ);
  const __m256d neg = _mm256_cmp_pd(pval, zero, _CMP_LT_OQ);
  const __m256d sgn =
      _mm256_blendv_pd(_mm256_blendv_pd(zero, set1(-1.0), neg), set1(1.0), pos);

  __m256d value = _mm256_fnmadd_pd(t2, set1(f.inv_tau), log_pd(abs_pd(pval)));
  value = _mm256_add_pd(value, _mm256_blendv_pd(
                                   zero, _mm256_mul_pd(set1(static_cast<double>(degree)), ln_x), big));
  if (f.t_power != 0.0) value = _mm256_fmadd_pd(set1(f.t_power), lt, value);
  if (f.kappa != 0.0) value = _mm256_fmadd_pd(set1(f.kappa), lsc, value);
  if (f.nu != 0.0) value = _mm256_fmadd_pd(set1(f.nu), lch, value);

  _mm256_storeu_pd(log_out, value);
  _mm256_storeu_pd(sign_out, sgn);
}

}  // namespace

QFLAT_AVX2 void log_integrand(const LogIntegrand& f, std::span<const double> t,
                              std::span<double> log_abs, std::span<double> sign) {
  std::size_t i = 0;
  for (; i + 4 <= t.size(); i += 4) log_integrand4(f, &t[i], &log_abs[i], &sign[i]);
  if (i < t.size()) {
    alignas(32) double tt[4] = {1.0, 1.0, 1.0, 1.0};
    alignas(32) double lo[4];
    alignas(32) double sg[4];
    const std::size_t rest = t.size() - i;
    for (std::size_t j = 0; j < rest; ++j) tt[j] = t[i + j];
    log_integrand4(f, tt, lo, sg);
    for (std::size_t j = 0; j < rest; ++j) {
      log_abs[i + j] = lo[j];
      sign[i + j] = sg[j];
    }
  }
}

QFLAT_AVX2 Moments moments(std::span<const double> weights, std::span<const double> log_abs,
                           std::span<const double> sign, std::span<const double> u,
                           double shift) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd();
  const __m256d vshift = set1(shift);
  std::size_t i = 0;
  for (; i + 4 <= weights.size(); i += 4) {
    const __m256d ex = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(&log_abs[i]), vshift));
    const __m256d e =
        _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(&weights[i]), _mm256_loadu_pd(&sign[i])), ex);
    const __m256d uu = _mm256_loadu_pd(&u[i]);
    const __m256d eu = _mm256_mul_pd(e, uu);
    a0 = _mm256_add_pd(a0, e);
    a1 = _mm256_add_pd(a1, eu);
    a2 = _mm256_fmadd_pd(eu, uu, a2);
  }
  Moments m{hsum(a0), hsum(a1), hsum(a2)};
  for (; i < weights.size(); ++i) {
    const double e = weights[i] * sign[i] * std::exp(log_abs[i] - shift);
    m.m0 += e;
    m.m1 += e * u[i];
    m.m2 += e * u[i] * u[i];
  }
  return m;
}

QFLAT_AVX2 double centered(std::span<const double> weights, std::span<const double> log_abs,
                           std::span<const double> sign, std::span<const double> u,
                           double shift, double mean) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d vshift = set1(shift);
  const __m256d vmean = set1(mean);
  std::size_t i = 0;
  for (; i + 4 <= weights.size(); i += 4) {
    const __m256d ex = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(&log_abs[i]), vshift));
    const __m256d e =
        _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(&weights[i]), _mm256_loadu_pd(&sign[i])), ex);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(&u[i]), vmean);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(e, d), d, acc);
  }
  double sum = hsum(acc);
  for (; i < weights.size(); ++i) {
    const double d = u[i] - mean;
    sum += weights[i] * sign[i] * std::exp(log_abs[i] - shift) * d * d;
  }
  return sum;
}

}  // namespace qflat::kernels::avx2
