// kernels.hpp — data-parallel inner loops with scalar reference and AVX2 variants
//
// The scalar variants are the reference definitions. AVX2 variants must agree
// with them to rounding (see tests/test_kernels.cpp); the active table is picked
// once at startup from CPUID and can be pinned with CORRNOISE_SIMD=scalar.

#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace corrnoise::kernels {

using cplx = std::complex<double>;

// Gauss-Legendre nodes per quadrature panel; also the number of Legendre
// coefficients kept per panel.
inline constexpr int kPanelOrder = 16;

// Panels whose phase argument kappa = half_width * t is at least this large use
// the upward spherical-Bessel recurrence; smaller ones use Miller's algorithm.
inline constexpr double kUpwardThreshold = 2.0 * kPanelOrder;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Read-only view of a panel decomposition in structure-of-arrays layout.
// coeffs holds kPanelOrder signed Legendre coefficients per panel:
// a_n = c_n * (-1)^(n/2), so that sum_n c_n (-i)^n j_n = sum_even a_n j_n - i sum_odd a_n j_n.
struct PanelView {
    const double* half_width = nullptr;
    const double* center = nullptr;
    const double* coeffs = nullptr;
    std::size_t count = 0;
};

struct KernelTable {
    // y[k] += a * x[k]
    void (*caxpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
    // y[k] += w[k] * x[k]
    void (*cmul_acc)(std::size_t n, const cplx* w, const cplx* x, cplx* y);
    // out[k] = x[k] + a * y[k]   (RK4 stage combination)
    void (*cxpay)(std::size_t n, const cplx* x, cplx a, const cplx* y, cplx* out);
    // sum over panels of 2 r e^{-i(m+nu)t} sum_n c_n (-i)^n j_n(r t)
    cplx (*filon_sum)(const PanelView& panels, double t, double nu);
};

const KernelTable& table(Isa isa);
const KernelTable& active();
Isa active_isa();
bool isa_supported(Isa isa);
// Override the runtime choice (tests and benchmarking). Throws if unsupported.
void force_isa(Isa isa);

// j_0..j_{kPanelOrder-1}(kappa), kappa >= 0.
void sph_bessel_block(double kappa, double* out);

namespace detail {
// Per-panel contribution for panels that fall below kUpwardThreshold; shared by
// both ISAs so the two only differ in the vectorised upward-recurrence path.
cplx filon_panel_miller(double half_width, double center, const double* coeffs, double t,
                        double nu);
} // namespace detail

} // namespace corrnoise::kernels
