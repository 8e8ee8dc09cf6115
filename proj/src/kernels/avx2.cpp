// avx2.cpp — AVX2 variants of the kernel table
//
// Each function carries its own target attribute so the translation unit can
// be compiled without -mavx2 and only entered after a CPUID check. FMA is not
// used: keeping separate multiply and add keeps results within a couple of ulps
// of the scalar reference.

#include "kernels_impl.hpp"

#include <cmath>
#include <immintrin.h>

#define AVX2_FN __attribute__((target("avx2")))

namespace corrnoise::kernels::avx2 {

namespace {

// [xr0 xi0 xr1 xi1] * (ar + i ai), interleaved complex pair
AVX2_FN inline __m256d cmul_pair(__m256d x, __m256d ar, __m256d ai) {
    const __m256d swapped = _mm256_permute_pd(x, 0b0101);
    return _mm256_addsub_pd(_mm256_mul_pd(ar, x), _mm256_mul_pd(ai, swapped));
}

} // namespace

AVX2_FN void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    const double* xp = reinterpret_cast<const double*>(x);
    double* yp = reinterpret_cast<double*>(y);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m256d xv = _mm256_loadu_pd(xp + 2 * k);
        const __m256d yv = _mm256_loadu_pd(yp + 2 * k);
        _mm256_storeu_pd(yp + 2 * k, _mm256_add_pd(yv, cmul_pair(xv, ar, ai)));
    }
    if (k < n) scalar::caxpy(n - k, a, x + k, y + k);
}

AVX2_FN void cmul_acc(std::size_t n, const cplx* w, const cplx* x, cplx* y) {
    const double* wp = reinterpret_cast<const double*>(w);
    const double* xp = reinterpret_cast<const double*>(x);
    double* yp = reinterpret_cast<double*>(y);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m256d wv = _mm256_loadu_pd(wp + 2 * k);
        const __m256d xv = _mm256_loadu_pd(xp + 2 * k);
        const __m256d wr = _mm256_movedup_pd(wv);
        const __m256d wi = _mm256_permute_pd(wv, 0b1111);
        const __m256d yv = _mm256_loadu_pd(yp + 2 * k);
        _mm256_storeu_pd(yp + 2 * k, _mm256_add_pd(yv, cmul_pair(xv, wr, wi)));
    }
    if (k < n) scalar::cmul_acc(n - k, w + k, x + k, y + k);
}

AVX2_FN void cxpay(std::size_t n, const cplx* x, cplx a, const cplx* y, cplx* out) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    const double* xp = reinterpret_cast<const double*>(x);
    const double* yp = reinterpret_cast<const double*>(y);
    double* op = reinterpret_cast<double*>(out);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m256d xv = _mm256_loadu_pd(xp + 2 * k);
        const __m256d yv = _mm256_loadu_pd(yp + 2 * k);
        _mm256_storeu_pd(op + 2 * k, _mm256_add_pd(xv, cmul_pair(yv, ar, ai)));
    }
    if (k < n) scalar::cxpay(n - k, x + k, a, y + k, out + k);
}

// Four panels per iteration, one per lane. Trigonometry stays scalar (there is
// no vector sin/cos in the standard toolchain); the recurrence and the
// coefficient contraction are vectorised. A block drops to the scalar path as
// soon as one of its lanes needs Miller's algorithm.
AVX2_FN cplx filon_sum(const PanelView& p, double t, double nu) {
    double sr = 0.0;
    double si = 0.0;
    alignas(32) double sk[4], ck[4], pc[4], ps[4], rr[4];
    alignas(32) double coef[kPanelOrder][4];
    __m256d acc_r = _mm256_setzero_pd();
    __m256d acc_i = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= p.count; i += 4) {
        bool all_upward = true;
        for (int l = 0; l < 4; ++l) all_upward &= (p.half_width[i + l] * t >= kUpwardThreshold);
        if (!all_upward) {
            for (int l = 0; l < 4; ++l) {
                const std::size_t q = i + l;
                const double r = p.half_width[q];
                if (r * t >= kUpwardThreshold) {
                    const cplx v = scalar::filon_sum(
                        PanelView{p.half_width + q, p.center + q, p.coeffs + q * kPanelOrder, 1},
                        t, nu);
                    sr += v.real();
                    si += v.imag();
                } else {
                    const cplx v = detail::filon_panel_miller(r, p.center[q],
                                                              p.coeffs + q * kPanelOrder, t, nu);
                    sr += v.real();
                    si += v.imag();
                }
            }
            continue;
        }
        for (int l = 0; l < 4; ++l) {
            const std::size_t q = i + l;
            const double kappa = p.half_width[q] * t;
            const double theta = (p.center[q] + nu) * t;
            sk[l] = std::sin(kappa);
            ck[l] = std::cos(kappa);
            pc[l] = std::cos(theta);
            ps[l] = std::sin(theta);
            rr[l] = p.half_width[q];
            for (int n = 0; n < kPanelOrder; ++n) coef[n][l] = p.coeffs[q * kPanelOrder + n];
        }
        const __m256d r = _mm256_load_pd(rr);
        const __m256d one = _mm256_set1_pd(1.0);
        const __m256d inv = _mm256_div_pd(one, _mm256_mul_pd(r, _mm256_set1_pd(t)));
        __m256d jm = _mm256_mul_pd(_mm256_load_pd(sk), inv);
        __m256d jc = _mm256_mul_pd(_mm256_sub_pd(jm, _mm256_load_pd(ck)), inv);
        __m256d re = _mm256_mul_pd(_mm256_load_pd(coef[0]), jm);
        __m256d im = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(_mm256_load_pd(coef[1]), jc));
        for (int n = 1; n < kPanelOrder - 1; ++n) {
            const __m256d f = _mm256_mul_pd(_mm256_set1_pd(2.0 * n + 1.0), inv);
            const __m256d jn = _mm256_sub_pd(_mm256_mul_pd(f, jc), jm);
            jm = jc;
            jc = jn;
            const __m256d term = _mm256_mul_pd(_mm256_load_pd(coef[n + 1]), jn);
            if ((n + 1) % 2 == 0) re = _mm256_add_pd(re, term);
            else im = _mm256_sub_pd(im, term);
        }
        const __m256d w = _mm256_add_pd(r, r);
        const __m256d c = _mm256_load_pd(pc);
        const __m256d s = _mm256_load_pd(ps);
        const __m256d out_r = _mm256_mul_pd(w, _mm256_add_pd(_mm256_mul_pd(c, re), _mm256_mul_pd(s, im)));
        const __m256d out_i = _mm256_mul_pd(w, _mm256_sub_pd(_mm256_mul_pd(c, im), _mm256_mul_pd(s, re)));
        acc_r = _mm256_add_pd(acc_r, out_r);
        acc_i = _mm256_add_pd(acc_i, out_i);
    }
    alignas(32) double lr[4], li[4];
    _mm256_store_pd(lr, acc_r);
    _mm256_store_pd(li, acc_i);
    sr += (lr[0] + lr[1]) + (lr[2] + lr[3]);
    si += (li[0] + li[1]) + (li[2] + li[3]);
    if (i < p.count) {
        const cplx v = scalar::filon_sum(
            PanelView{p.half_width + i, p.center + i, p.coeffs + i * kPanelOrder, p.count - i}, t,
            nu);
        sr += v.real();
        si += v.imag();
    }
    return {sr, si};
}

} // namespace corrnoise::kernels::avx2
