// scalar.cpp — reference implementations of the kernel table

#include "kernels_impl.hpp"

#include <cmath>

namespace corrnoise::kernels {

void sph_bessel_block(double kappa, double* out) {
    constexpr int n_max = kPanelOrder - 1;
    if (kappa == 0.0) {
        out[0] = 1.0;
        for (int n = 1; n <= n_max; ++n) out[n] = 0.0;
        return;
    }
    if (kappa < 1e-3) {
        // three-term series; truncation error below kappa^6 relative
        double pow_k = 1.0;
        double dfact = 1.0; // (2n+1)!!
        const double k2 = kappa * kappa;
        for (int n = 0; n <= n_max; ++n) {
            if (n > 0) {
                pow_k *= kappa;
                dfact *= 2.0 * n + 1.0;
            }
            const double a = 2.0 * n + 3.0;
            out[n] = pow_k / dfact * (1.0 - k2 / (2.0 * a) + k2 * k2 / (8.0 * a * (a + 2.0)));
        }
        return;
    }
    const double s = std::sin(kappa);
    const double c = std::cos(kappa);
    const double j0 = s / kappa;
    const double j1 = (j0 - c) / kappa;
    if (kappa >= kUpwardThreshold) {
        out[0] = j0;
        out[1] = j1;
        for (int n = 1; n < n_max; ++n) out[n + 1] = (2.0 * n + 1.0) / kappa * out[n] - out[n - 1];
        return;
    }
    // Miller: downward recurrence from well above max(n_max, kappa), rescaled
    // against overflow, normalised on whichever of j0/j1 is larger.
    const int start = n_max + 20 + static_cast<int>(kappa);
    double hi = 0.0;
    double cur = 1e-300;
    for (int n = start; n >= 1; --n) {
        const double lo = (2.0 * n + 1.0) / kappa * cur - hi;
        hi = cur;
        cur = lo;
        if (n - 1 <= n_max) out[n - 1] = cur;
        if (n <= n_max) out[n] = hi;
        if (std::abs(cur) > 1e250) {
            cur *= 1e-250;
            hi *= 1e-250;
            for (int m = n - 1; m <= n_max; ++m) out[m] *= 1e-250;
        }
    }
    const double scale = std::abs(j0) >= std::abs(j1) ? j0 / out[0] : j1 / out[1];
    for (int n = 0; n <= n_max; ++n) out[n] *= scale;
}

namespace detail {

cplx filon_panel_miller(double half_width, double center, const double* coeffs, double t,
                        double nu) {
    double j[kPanelOrder];
    sph_bessel_block(half_width * t, j);
    double re = 0.0;
    double im = 0.0;
    for (int n = 0; n < kPanelOrder; n += 2) {
        re += coeffs[n] * j[n];
        im -= coeffs[n + 1] * j[n + 1];
    }
    const double theta = (center + nu) * t;
    const double pc = std::cos(theta);
    const double ps = std::sin(theta);
    const double w = 2.0 * half_width;
    return {w * (pc * re + ps * im), w * (pc * im - ps * re)};
}

} // namespace detail

namespace scalar {

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const double ar = a.real();
    const double ai = a.imag();
    for (std::size_t k = 0; k < n; ++k) {
        const double xr = x[k].real();
        const double xi = x[k].imag();
        y[k] = {y[k].real() + (ar * xr - ai * xi), y[k].imag() + (ar * xi + ai * xr)};
    }
}

void cmul_acc(std::size_t n, const cplx* w, const cplx* x, cplx* y) {
    for (std::size_t k = 0; k < n; ++k) {
        const double wr = w[k].real();
        const double wi = w[k].imag();
        const double xr = x[k].real();
        const double xi = x[k].imag();
        y[k] = {y[k].real() + (wr * xr - wi * xi), y[k].imag() + (wr * xi + wi * xr)};
    }
}

void cxpay(std::size_t n, const cplx* x, cplx a, const cplx* y, cplx* out) {
    const double ar = a.real();
    const double ai = a.imag();
    for (std::size_t k = 0; k < n; ++k) {
        const double yr = y[k].real();
        const double yi = y[k].imag();
        out[k] = {x[k].real() + (ar * yr - ai * yi), x[k].imag() + (ar * yi + ai * yr)};
    }
}

// Upward recurrence contribution of one panel; kappa >= kUpwardThreshold.
static inline cplx filon_panel_upward(double r, double m, const double* a, double t, double nu) {
    const double kappa = r * t;
    const double inv = 1.0 / kappa;
    double jm = std::sin(kappa) * inv;          // j0
    double jc = (jm - std::cos(kappa)) * inv;   // j1
    double re = a[0] * jm;
    double im = -(a[1] * jc);
    for (int n = 1; n < kPanelOrder - 1; ++n) {
        const double jn = (2.0 * n + 1.0) * inv * jc - jm;
        jm = jc;
        jc = jn;
        if ((n + 1) % 2 == 0) re += a[n + 1] * jn;
        else im -= a[n + 1] * jn;
    }
    const double theta = (m + nu) * t;
    const double pc = std::cos(theta);
    const double ps = std::sin(theta);
    const double w = 2.0 * r;
    return {w * (pc * re + ps * im), w * (pc * im - ps * re)};
}

cplx filon_sum(const PanelView& p, double t, double nu) {
    double sr = 0.0;
    double si = 0.0;
    for (std::size_t i = 0; i < p.count; ++i) {
        const double r = p.half_width[i];
        const double* a = p.coeffs + i * kPanelOrder;
        const cplx v = (r * t >= kUpwardThreshold)
                           ? filon_panel_upward(r, p.center[i], a, t, nu)
                           : detail::filon_panel_miller(r, p.center[i], a, t, nu);
        sr += v.real();
        si += v.imag();
    }
    return {sr, si};
}

} // namespace scalar
} // namespace corrnoise::kernels
