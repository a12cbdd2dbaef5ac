#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fock/simd.hpp"

namespace fock::simd::avx2 {

namespace {

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmin(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_min_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_min_sd(m, _mm_unpackhi_pd(m, m)));
}

// exp on [-708, 709]; lanes below -708 flush to zero. Cody-Waite split of ln 2 and a
// degree-13 Taylor polynomial on |r| <= ln2/2 (truncation error below 2e-16).
inline __m256d exp_pd(__m256d x)
{
    const __m256d lo = _mm256_set1_pd(-708.0);
    const __m256d hi = _mm256_set1_pd(709.0);
    const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(0.693145751953125), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);

    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i e = _mm256_cvtepi32_epi64(n32);
    e = _mm256_add_epi64(e, _mm256_set1_epi64x(1023));
    e = _mm256_slli_epi64(e, 52);
    const __m256d scale = _mm256_castsi256_pd(e);

    return _mm256_andnot_pd(underflow, _mm256_mul_pd(p, scale));
}

// Largest |phase| handled by the three-part reduction; beyond it the caller falls back.
constexpr double kMaxPhase = 1.0e6;

// sin and cos together. Quadrant reduction by pi/2 in three parts, Taylor polynomials on
// |r| <= pi/4 (degree 15 for sin, 16 for cos).
inline void sincos_pd(__m256d y, __m256d& s_out, __m256d& c_out)
{
    const __m256d j = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.63661977236758134308)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(j, _mm256_set1_pd(1.570796310901641845703125), y);
    r = _mm256_fnmadd_pd(j, _mm256_set1_pd(1.589325471229585673428e-8), r);
    r = _mm256_fnmadd_pd(j, _mm256_set1_pd(6.123233995736766e-17), r);
    const __m256d r2 = _mm256_mul_pd(r, r);

    __m256d ps = _mm256_set1_pd(-1.0 / 1307674368000.0);
    ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 6227020800.0));
    ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 39916800.0));
    ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 362880.0));
    ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 5040.0));
    ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 120.0));
    ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 6.0));
    ps = _mm256_mul_pd(ps, r2);
    const __m256d sr = _mm256_fmadd_pd(ps, r, r);

    __m256d pc = _mm256_set1_pd(1.0 / 20922789888000.0);
    pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 87178291200.0));
    pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 479001600.0));
    pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 3628800.0));
    pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 40320.0));
    pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 720.0));
    pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 24.0));
    pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-0.5));
    const __m256d cr = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0));

    // Quadrant q = j mod 4, kept in floating point.
    const __m256d four = _mm256_set1_pd(4.0);
    const __m256d q = _mm256_sub_pd(
        j, _mm256_mul_pd(four, _mm256_floor_pd(_mm256_mul_pd(j, _mm256_set1_pd(0.25)))));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d three = _mm256_set1_pd(3.0);
    const __m256d odd = _mm256_or_pd(_mm256_cmp_pd(q, one, _CMP_EQ_OQ),
                                     _mm256_cmp_pd(q, three, _CMP_EQ_OQ));
    const __m256d sin_neg = _mm256_cmp_pd(q, two, _CMP_GE_OQ);
    const __m256d cos_neg = _mm256_or_pd(_mm256_cmp_pd(q, one, _CMP_EQ_OQ),
                                         _mm256_cmp_pd(q, two, _CMP_EQ_OQ));
    const __m256d sign_bit = _mm256_set1_pd(-0.0);

    const __m256d s = _mm256_blendv_pd(sr, cr, odd);
    const __m256d c = _mm256_blendv_pd(cr, sr, odd);
    s_out = _mm256_xor_pd(s, _mm256_and_pd(sin_neg, sign_bit));
    c_out = _mm256_xor_pd(c, _mm256_and_pd(cos_neg, sign_bit));
}

} // namespace

void min_dist2(std::span<const double> px, std::span<const double> py,
               std::span<const double> cx, std::span<const double> cy, std::span<double> out)
{
    const std::size_t nc = cx.size();
    const std::size_t nv = nc - nc % 4;
    for (std::size_t i = 0; i < px.size(); ++i) {
        const __m256d x = _mm256_set1_pd(px[i]);
        const __m256d y = _mm256_set1_pd(py[i]);
        __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
        for (std::size_t k = 0; k < nv; k += 4) {
            const __m256d dx = _mm256_sub_pd(x, _mm256_loadu_pd(&cx[k]));
            const __m256d dy = _mm256_sub_pd(y, _mm256_loadu_pd(&cy[k]));
            best = _mm256_min_pd(best, _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy)));
        }
        double b = hmin(best);
        for (std::size_t k = nv; k < nc; ++k) {
            const double dx = px[i] - cx[k];
            const double dy = py[i] - cy[k];
            b = std::min(b, dx * dx + dy * dy);
        }
        out[i] = b;
    }
}

void count_within(std::span<const double> px, std::span<const double> py,
                  std::span<const double> cx, std::span<const double> cy, double radius2,
                  std::span<int> out)
{
    const std::size_t nc = cx.size();
    const std::size_t nv = nc - nc % 4;
    const __m256d r2 = _mm256_set1_pd(radius2);
    for (std::size_t i = 0; i < px.size(); ++i) {
        const __m256d x = _mm256_set1_pd(px[i]);
        const __m256d y = _mm256_set1_pd(py[i]);
        int count = 0;
        for (std::size_t k = 0; k < nv; k += 4) {
            const __m256d dx = _mm256_sub_pd(x, _mm256_loadu_pd(&cx[k]));
            const __m256d dy = _mm256_sub_pd(y, _mm256_loadu_pd(&cy[k]));
            const __m256d d2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
            count += __builtin_popcount(
                static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(d2, r2, _CMP_LT_OQ))));
        }
        for (std::size_t k = nv; k < nc; ++k) {
            const double dx = px[i] - cx[k];
            const double dy = py[i] - cy[k];
            count += (dx * dx + dy * dy < radius2) ? 1 : 0;
        }
        out[i] = count;
    }
}

double gauss_sum(std::span<const double> x, std::span<const double> y, std::span<const double> w,
                 double cx, double cy, double rate)
{
    const std::size_t n = x.size();
    const std::size_t nv = n - n % 4;
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vcy = _mm256_set1_pd(cy);
    const __m256d neg_rate = _mm256_set1_pd(-rate);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < nv; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&x[i]), vcx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&y[i]), vcy);
        const __m256d d2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(&w[i]), exp_pd(_mm256_mul_pd(neg_rate, d2)), acc);
    }
    double total = hsum(acc);
    for (std::size_t i = nv; i < n; ++i) {
        const double dx = x[i] - cx;
        const double dy = y[i] - cy;
        total += w[i] * std::exp(-rate * (dx * dx + dy * dy));
    }
    return total;
}

std::complex<double> combo_damped(const ComboView& combo, double alpha, double zx, double zy)
{
    const std::size_t n = combo.size();
    const std::size_t nv = n - n % 4;
    const __m256d vzx = _mm256_set1_pd(zx);
    const __m256d vzy = _mm256_set1_pd(zy);
    const __m256d neg_half = _mm256_set1_pd(-0.5 * alpha);
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d max_phase = _mm256_set1_pd(kMaxPhase);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    double tail_re = 0.0;
    double tail_im = 0.0;

    auto scalar_term = [&](std::size_t j) {
        const std::complex<double> t = scalar::combo_damped(
            ComboView{combo.coeff_re.subspan(j, 1), combo.coeff_im.subspan(j, 1),
                      combo.center_re.subspan(j, 1), combo.center_im.subspan(j, 1)},
            alpha, zx, zy);
        tail_re += t.real();
        tail_im += t.imag();
    };

    for (std::size_t j = 0; j < nv; j += 4) {
        const __m256d wx = _mm256_loadu_pd(&combo.center_re[j]);
        const __m256d wy = _mm256_loadu_pd(&combo.center_im[j]);
        const __m256d dx = _mm256_sub_pd(vzx, wx);
        const __m256d dy = _mm256_sub_pd(vzy, wy);
        const __m256d d2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
        const __m256d mag = exp_pd(_mm256_mul_pd(neg_half, d2));
        const __m256d phase = _mm256_mul_pd(va, _mm256_fmsub_pd(vzy, wx, _mm256_mul_pd(vzx, wy)));
        if (_mm256_movemask_pd(_mm256_cmp_pd(_mm256_and_pd(phase, abs_mask), max_phase,
                                             _CMP_GT_OQ)) != 0) {
            for (std::size_t k = j; k < j + 4; ++k) {
                scalar_term(k);
            }
            continue;
        }
        __m256d s;
        __m256d c;
        sincos_pd(phase, s, c);
        const __m256d cr = _mm256_loadu_pd(&combo.coeff_re[j]);
        const __m256d ci = _mm256_loadu_pd(&combo.coeff_im[j]);
        const __m256d tr = _mm256_fmsub_pd(cr, c, _mm256_mul_pd(ci, s));
        const __m256d ti = _mm256_fmadd_pd(cr, s, _mm256_mul_pd(ci, c));
        acc_re = _mm256_fmadd_pd(mag, tr, acc_re);
        acc_im = _mm256_fmadd_pd(mag, ti, acc_im);
    }
    for (std::size_t j = nv; j < n; ++j) {
        scalar_term(j);
    }
    return {hsum(acc_re) + tail_re, hsum(acc_im) + tail_im};
}

} // namespace fock::simd::avx2
