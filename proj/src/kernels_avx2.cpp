// AVX2 + FMA variants of the kernels in kernels_scalar.cpp. This translation
// unit is the only one compiled with -mavx2 -mfma; nothing here may run unless
// the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <cmath>
#include <numbers>

#include "aoi/kernels.hpp"

namespace aoi::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// exp(x) with Cephes' rational approximation on [-ln2/2, ln2/2] and a split
// 2^n scaling so that results down to the subnormal range round once.
inline __m256d exp_pd(__m256d x) {
    const __m256d hi = _mm256_set1_pd(709.782712893383973096);
    const __m256d lo = _mm256_set1_pd(-745.2);
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d q3 = _mm256_set1_pd(2.00000000000000000009e0);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);

    const __m256d over = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
    const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    const __m256d unordered = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);

    __m256d xc = _mm256_max_pd(_mm256_min_pd(x, hi), lo);
    __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, c1, xc);
    r = _mm256_fnmadd_pd(n, c2, r);

    const __m256d rr = _mm256_mul_pd(r, r);
    __m256d px = _mm256_fmadd_pd(p0, rr, p1);
    px = _mm256_fmadd_pd(px, rr, p2);
    px = _mm256_mul_pd(px, r);
    __m256d qx = _mm256_fmadd_pd(q0, rr, q1);
    qx = _mm256_fmadd_pd(qx, rr, q2);
    qx = _mm256_fmadd_pd(qx, rr, q3);
    __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    e = _mm256_fmadd_pd(two, e, one);

    // n in [-1075, 1024]; split into two halves that are each a normal power of two.
    const __m128i ni = _mm256_cvtpd_epi32(n);
    const __m128i n1 = _mm_srai_epi32(ni, 1);
    const __m128i n2 = _mm_sub_epi32(ni, n1);
    const __m256i bias = _mm256_set1_epi64x(1023);
    const __m256d s1 = _mm256_castsi256_pd(
        _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(n1), bias), 52));
    const __m256d s2 = _mm256_castsi256_pd(
        _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(n2), bias), 52));
    e = _mm256_mul_pd(_mm256_mul_pd(e, s1), s2);

    e = _mm256_blendv_pd(e, _mm256_set1_pd(HUGE_VAL), over);
    e = _mm256_blendv_pd(e, _mm256_setzero_pd(), under);
    e = _mm256_blendv_pd(e, _mm256_add_pd(x, x), unordered);
    return e;
}

void exp_avx2(const double* x, std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = std::exp(x[i]);
}

double sum_exp_avx2(const double* x, std::size_t n, double s) {
    const __m256d vs = _mm256_set1_pd(s);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, exp_pd(_mm256_mul_pd(vs, _mm256_loadu_pd(x + i))));
        acc1 = _mm256_add_pd(acc1, exp_pd(_mm256_mul_pd(vs, _mm256_loadu_pd(x + i + 4))));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, exp_pd(_mm256_mul_pd(vs, _mm256_loadu_pd(x + i))));
    double tail = 0.0;
    for (; i < n; ++i) tail += std::exp(s * x[i]);
    return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

PowerSums power_sums_avx2(const double* x, std::size_t n) {
    __m256d s = _mm256_setzero_pd();
    __m256d sq = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        s = _mm256_add_pd(s, v);
        sq = _mm256_fmadd_pd(v, v, sq);
    }
    PowerSums r{hsum(s), hsum(sq)};
    for (; i < n; ++i) {
        r.sum += x[i];
        r.sum_sq += x[i] * x[i];
    }
    return r;
}

double sawtooth_area_avx2(const double* y, const double* t_prev, std::size_t n) {
    const __m256d half = _mm256_set1_pd(0.5);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d vt = _mm256_loadu_pd(t_prev + i);
        // y * (t + y/2)
        acc = _mm256_fmadd_pd(vy, _mm256_fmadd_pd(half, vy, vt), acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += y[i] * t_prev[i] + 0.5 * y[i] * y[i];
    return hsum(acc) + tail;
}

void lognormal_tilted_avx2(const double* z, std::size_t n, double alpha, double omega, double s,
                           double power, double* out) {
    constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d vw = _mm256_set1_pd(omega);
    const __m256d vs = _mm256_set1_pd(s);
    const __m256d vp = _mm256_set1_pd(power);
    const __m256d mhalf = _mm256_set1_pd(-0.5);
    const __m256d norm = _mm256_set1_pd(inv_sqrt_2pi);
    const bool tilt = s != 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vz = _mm256_loadu_pd(z + i);
        const __m256d x = _mm256_fmadd_pd(vw, vz, va);
        __m256d arg = _mm256_fmadd_pd(mhalf, _mm256_mul_pd(vz, vz), _mm256_mul_pd(vp, x));
        if (tilt) arg = _mm256_fmadd_pd(vs, exp_pd(x), arg);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(exp_pd(arg), norm));
    }
    for (; i < n; ++i) {
        const double x = alpha + omega * z[i];
        double arg = power * x - 0.5 * z[i] * z[i];
        if (tilt) arg += s * std::exp(x);
        out[i] = std::exp(arg) * inv_sqrt_2pi;
    }
}

}  // namespace

const Table table{exp_avx2, sum_exp_avx2, power_sums_avx2, sawtooth_area_avx2,
                  lognormal_tilted_avx2};

}  // namespace aoi::kernels::avx2
