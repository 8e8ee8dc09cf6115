// quadrature.cpp — panel construction and evaluation for FilterIntegral
//
// The integrand S(w) F(w + nu, t) is split as
//   S(w) = s0 + (w + nu) h(w),   s0 = S(-nu),
// so that the 1/(w + nu) singularity of F is carried by s0 alone and has a
// closed form in sine and cosine integrals. The smooth remainder h is
// expanded per panel in Legendre polynomials; its Fourier weight against
// exp(-i (w + nu) t) is then exact in spherical Bessel functions, which keeps
// the panel set independent of t.

#include "corrnoise/errors.hpp"
#include "corrnoise/kernels.hpp"
#include "corrnoise/spectra.hpp"

#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace corrnoise {

namespace {

using kernels::kPanelOrder;

struct LegendreRule {
    std::array<double, kPanelOrder> node{};
    std::array<double, kPanelOrder> weight{};
    // proj[n][k] = (2n+1)/2 * w_k * P_n(u_k): coefficient projection matrix
    std::array<std::array<double, kPanelOrder>, kPanelOrder> proj{};
};

const LegendreRule& legendre_rule() {
    static const LegendreRule rule = [] {
        LegendreRule r;
        constexpr int n = kPanelOrder;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) {
                    r.node[i] = x;
                    r.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
                    break;
                }
            }
        }
        for (int k = 0; k < n; ++k) {
            double p0 = 1.0, p1 = r.node[k];
            r.proj[0][k] = 0.5 * r.weight[k];
            r.proj[1][k] = 1.5 * r.weight[k] * p1;
            for (int m = 2; m < n; ++m) {
                const double p2 = ((2.0 * m - 1.0) * r.node[k] * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
                r.proj[m][k] = (2.0 * m + 1.0) / 2.0 * r.weight[k] * p2;
            }
        }
        return r;
    }();
    return rule;
}

// Cin(z) = integral_0^z (1 - cos u)/u du, z >= 0
double cin(double z) {
    if (z == 0.0) return 0.0;
    if (z < 1.0) {
        const double z2 = z * z;
        double term = z2 / 2.0; // (-1)^{k+1} z^{2k}/(2k)!
        double sum = 0.0;
        for (int k = 1; k <= 12; ++k) {
            sum += term / (2.0 * k);
            term *= -z2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        }
        return sum;
    }
    return std::numbers::egamma + std::log(z) - gsl_sf_Ci(z);
}

// integral_a^b (1 - exp(-i x t))/(i x) dx for finite a <= b.
cplx singular_part(double a, double b, double t) {
    const double si = gsl_sf_Si(b * t) - gsl_sf_Si(a * t);
    const double ci = cin(std::abs(b) * t) - cin(std::abs(a) * t);
    return {si, -ci};
}

struct Support {
    double lo, hi;
    std::vector<double> breaks;
};

Support support_of(const SpectrumModel& m, double nu) {
    Support s{};
    switch (m.kind) {
    case SpectrumKind::ohmic:
        s.lo = 0.0;
        s.hi = 40.0 * m.cutoff;
        break;
    case SpectrumKind::one_over_f: {
        const double big = std::max(1e4, 100.0 * std::abs(nu));
        s.lo = -big;
        s.hi = big;
        s.breaks = {-m.ir_cutoff, 0.0, m.ir_cutoff};
        break;
    }
    case SpectrumKind::tabulated:
        s.lo = m.table.front().first;
        s.hi = m.table.back().first;
        for (const auto& [w, v] : m.table) s.breaks.push_back(w);
        break;
    case SpectrumKind::white:
        s.lo = -std::numeric_limits<double>::infinity();
        s.hi = std::numeric_limits<double>::infinity();
        break;
    }
    return s;
}

} // namespace

struct FilterIntegral::Impl {
    double nu = 0.0;
    double s0 = 0.0;
    double lo = 0.0, hi = 0.0; // integration range, shifted by nu where used
    bool analytic_white = false;
    double smooth_integral = 0.0; // integral of h
    double error = 0.0;
    std::vector<double> half_width, center, coeffs;

    kernels::PanelView view() const {
        return {half_width.data(), center.data(), coeffs.data(), half_width.size()};
    }
};

namespace {

struct Panel {
    double lo, hi;
    int depth;
};

struct Fitted {
    std::array<double, kPanelOrder> c;
    double tail;
    double cmax;
};

template <class F>
Fitted fit_panel(const F& h, double lo, double hi) {
    const auto& rule = legendre_rule();
    const double m = 0.5 * (lo + hi);
    const double r = 0.5 * (hi - lo);
    std::array<double, kPanelOrder> f{};
    for (int k = 0; k < kPanelOrder; ++k) f[k] = h(m + r * rule.node[k]);
    Fitted out{};
    out.cmax = 0.0;
    for (int n = 0; n < kPanelOrder; ++n) {
        double s = 0.0;
        for (int k = 0; k < kPanelOrder; ++k) s += rule.proj[n][k] * f[k];
        out.c[n] = s;
        out.cmax = std::max(out.cmax, std::abs(s));
    }
    out.tail = 0.0;
    for (int n = kPanelOrder - 4; n < kPanelOrder; ++n) out.tail += std::abs(out.c[n]);
    return out;
}

} // namespace

FilterIntegral::FilterIntegral(const SpectrumModel& model, double nu, const QuadratureOptions& opt)
    : impl_(std::make_unique<Impl>()) {
    model.validate();
    impl_->nu = nu;
    if (model.kind == SpectrumKind::white) {
        impl_->analytic_white = true;
        impl_->s0 = model.strength;
        return;
    }
    Support sup = support_of(model, nu);
    impl_->lo = sup.lo;
    impl_->hi = sup.hi;
    const double pole = -nu;
    const bool pole_inside = pole >= sup.lo && pole <= sup.hi;
    impl_->s0 = pole_inside ? model(pole) : 0.0;
    if (pole_inside) sup.breaks.push_back(pole);

    std::vector<double> pts{sup.lo, sup.hi};
    for (double b : sup.breaks)
        if (b > sup.lo && b < sup.hi) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    // Geometric grading on intervals away from the origin that span more than
    // a factor of four, where spectra like 1/|w| vary on the scale of |w|.
    std::vector<double> graded;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        graded.push_back(pts[i]);
        const double a = pts[i], b = pts[i + 1];
        if (a > 0.0 && b / a > 4.0)
            for (double x = 4.0 * a; x < b / 1.5; x *= 4.0) graded.push_back(x);
        if (b < 0.0 && a / b > 4.0) {
            std::vector<double> neg;
            for (double x = 4.0 * b; x > a / 1.5; x *= 4.0) neg.push_back(x);
            graded.insert(graded.end(), neg.rbegin(), neg.rend());
        }
    }
    graded.push_back(pts.back());

    const double s0 = impl_->s0;
    auto h = [&](double w) { return (model(w) - s0) / (w + nu); };

    std::vector<Panel> work;
    for (std::size_t i = 0; i + 1 < graded.size(); ++i)
        if (graded[i + 1] > graded[i]) work.push_back({graded[i], graded[i + 1], 0});

    double l1 = 0.0;
    for (const auto& p : work) {
        const Fitted f = fit_panel(h, p.lo, p.hi);
        l1 += (p.hi - p.lo) * std::abs(f.c[0]) + (p.hi - p.lo) * f.tail;
    }
    if (l1 == 0.0) l1 = std::numeric_limits<double>::min();

    struct Accepted {
        double lo, hi;
        Fitted fit;
    };
    std::vector<Accepted> accepted;
    while (!work.empty()) {
        const Panel p = work.back();
        work.pop_back();
        const Fitted f = fit_panel(h, p.lo, p.hi);
        const double r = 0.5 * (p.hi - p.lo);
        const bool converged = f.tail <= opt.rel_tol * f.cmax || r * f.cmax <= 1e-17 * l1;
        if (converged) {
            accepted.push_back({p.lo, p.hi, f});
            continue;
        }
        if (p.depth >= opt.max_depth) {
            double achieved = r * f.tail;
            for (const auto& a : accepted) achieved += 0.5 * (a.hi - a.lo) * a.fit.tail;
            throw QuadratureError("spectral quadrature did not converge near w=" +
                                      std::to_string(0.5 * (p.lo + p.hi)),
                                  achieved / (2.0 * std::numbers::pi));
        }
        const double mid = 0.5 * (p.lo + p.hi);
        work.push_back({mid, p.hi, p.depth + 1});
        work.push_back({p.lo, mid, p.depth + 1});
    }
    if (opt.split_all) {
        std::vector<Accepted> finer;
        for (const auto& a : accepted) {
            const double mid = 0.5 * (a.lo + a.hi);
            finer.push_back({a.lo, mid, fit_panel(h, a.lo, mid)});
            finer.push_back({mid, a.hi, fit_panel(h, mid, a.hi)});
        }
        accepted.swap(finer);
    }
    // Widest panels first, so four-wide blocks tend to share a recurrence branch.
    std::stable_sort(accepted.begin(), accepted.end(), [](const Accepted& x, const Accepted& y) {
        return (x.hi - x.lo) > (y.hi - y.lo);
    });
    long double total = 0.0L;
    double err = 0.0;
    for (const auto& a : accepted) {
        const double r = 0.5 * (a.hi - a.lo);
        impl_->half_width.push_back(r);
        impl_->center.push_back(0.5 * (a.lo + a.hi));
        for (int n = 0; n < kPanelOrder; ++n) {
            const double sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
            impl_->coeffs.push_back(sign * a.fit.c[n]);
        }
        total += static_cast<long double>(2.0 * r * a.fit.c[0]);
        err += r * a.fit.tail;
    }
    impl_->smooth_integral = static_cast<double>(total);
    impl_->error = err / (2.0 * std::numbers::pi);
}

FilterIntegral::FilterIntegral(const FilterIntegral& o) : impl_(std::make_unique<Impl>(*o.impl_)) {}
FilterIntegral& FilterIntegral::operator=(const FilterIntegral& o) {
    if (this != &o) impl_ = std::make_unique<Impl>(*o.impl_);
    return *this;
}
FilterIntegral::FilterIntegral(FilterIntegral&&) noexcept = default;
FilterIntegral& FilterIntegral::operator=(FilterIntegral&&) noexcept = default;
FilterIntegral::~FilterIntegral() = default;

double FilterIntegral::nu() const { return impl_->nu; }
std::size_t FilterIntegral::panel_count() const { return impl_->half_width.size(); }
double FilterIntegral::error_estimate() const { return impl_->error; }

cplx FilterIntegral::operator()(double t) const {
    if (!(t >= 0.0)) throw ValidationError("filter integral requires t >= 0");
    if (t == 0.0) return 0.0;
    const Impl& d = *impl_;
    if (d.analytic_white) return d.s0 / 2.0;
    cplx acc = 0.0;
    if (d.s0 != 0.0) acc += d.s0 * singular_part(d.lo + d.nu, d.hi + d.nu, t);
    const cplx osc = kernels::active().filon_sum(d.view(), t, d.nu);
    acc += cplx(0.0, 1.0) * (osc - d.smooth_integral);
    return acc / (2.0 * std::numbers::pi);
}

} // namespace corrnoise
