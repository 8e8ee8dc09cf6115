// observables.cpp — intensity routes and T1 extraction

#include "corrnoise/observables.hpp"

#include "corrnoise/errors.hpp"

#include <cmath>
#include <numeric>
#include <optional>

namespace corrnoise {

namespace {

inline std::uint32_t mask_of(int n, int a) { return 1u << (n - 1 - a); }

} // namespace

std::vector<double> z_expectations(const Matrix& rho) {
    const int n = qubits_of(rho);
    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        const double p = rho(i, i).real();
        for (int a = 0; a < n; ++a) z[a] += (static_cast<std::uint32_t>(i) & mask_of(n, a)) ? p : -p;
    }
    return z;
}

cplx pair_expectation(const Matrix& rho, bool raise_a, int a, bool raise_b, int b) {
    const int n = qubits_of(rho);
    const auto ma = mask_of(n, a), mb = mask_of(n, b);
    cplx s = 0.0;
    // tr(P_a Q_b rho) = sum_k <m| ... |k> rho_{k m}, with m = P_a Q_b k
    for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(rho.rows()); ++k) {
        std::uint32_t m = k;
        const bool bset = (m & mb) != 0;
        if (raise_b == bset) continue;
        m ^= mb;
        const bool aset = (m & ma) != 0;
        if (raise_a == aset) continue;
        m ^= ma;
        s += rho(k, m);
    }
    return s;
}

double total_energy(const Matrix& rho, const RegisterConfig& reg) {
    reg.validate();
    if (qubits_of(rho) != reg.n) throw ValidationError("state dimension does not match register");
    const auto z = z_expectations(rho);
    double w = 0.0;
    for (int a = 0; a < reg.n; ++a) w += reg.frequencies[a] * z[a] / 2.0;
    return w;
}

namespace {

// -1/2 sum_a w_a tr(Z_a D[rho]) using only the diagonal of D.
double trace_intensity(const PreparedGenerator& gen, const Matrix& rho, const RegisterConfig& reg) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        const double d = gen.entry(rho, static_cast<std::size_t>(i), static_cast<std::size_t>(i)).real();
        double zw = 0.0;
        for (int a = 0; a < reg.n; ++a)
            zw += reg.frequencies[a] * ((static_cast<std::uint32_t>(i) & mask_of(reg.n, a)) ? 1.0 : -1.0);
        s += zw * d;
    }
    return -0.5 * s;
}

CoefficientSet coeffs_at(const GeneratorContext& ctx, double t) {
    return ctx.table ? ctx.table->coefficients_at(t) : CoefficientSet{t, {}};
}

} // namespace

IntensityBreakdown intensity_from_generator(const GeneratorContext& ctx, const Matrix& rho, double t) {
    if (qubits_of(rho) != ctx.reg.n) throw ValidationError("state dimension does not match register");
    IntensityBreakdown out;
    const auto c = coeffs_at(ctx, t);
    for (std::size_t j = 0; j < c.channels.size(); ++j) {
        const PreparedGenerator gen(c, j, ctx.reg.n, ctx.options);
        const double v = trace_intensity(gen, rho, ctx.reg);
        out.per_channel.push_back(v);
        out.total += v;
    }
    return out;
}

double local_emission(const GeneratorContext& ctx, const Matrix& rho, double t) {
    const auto c = coeffs_at(ctx, t);
    const auto z = z_expectations(rho);
    double s = 0.0;
    for (const auto& ch : c.channels) {
        if (ch.coupling != Coupling::transverse) continue;
        for (int a = 0; a < ctx.reg.n; ++a) {
            const double excited = (1.0 + z[a]) / 2.0;
            s += ctx.reg.frequencies[a] *
                 (ch.g21(a, a).real() * excited - ch.g12(a, a).real() * (1.0 - excited));
        }
    }
    return s;
}

double local_intensity(const Matrix& rho, const RegisterConfig& reg, const std::vector<double>& t1) {
    reg.validate();
    if (t1.size() != static_cast<std::size_t>(reg.n)) throw ValidationError("need one T1 per qubit");
    const auto z = z_expectations(rho);
    double s = 0.0;
    for (int a = 0; a < reg.n; ++a) {
        if (!(t1[a] > 0.0)) throw ValidationError("T1 values must be positive");
        s += reg.frequencies[a] * (1.0 + z[a]) / 2.0 / t1[a];
    }
    return s;
}

std::vector<double> intensity_from_finite_difference(const std::vector<double>& times,
                                                     const std::vector<double>& W) {
    if (times.size() != W.size()) throw ValidationError("times and W differ in length");
    if (times.size() < 3) throw ValidationError("finite differences need at least 3 samples");
    const double h = times[1] - times[0];
    if (!(h > 0.0)) throw ValidationError("times must increase");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs((times[i] - times[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(times[i])))
            throw ValidationError("finite differences need a uniform grid");
    const std::size_t n = times.size();
    std::vector<double> I(n);
    I[0] = -(-3.0 * W[0] + 4.0 * W[1] - W[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) I[i] = -(W[i + 1] - W[i - 1]) / (2.0 * h);
    I[n - 1] = -(3.0 * W[n - 1] - 4.0 * W[n - 2] + W[n - 3]) / (2.0 * h);
    return I;
}

PartialIntensity correlated_partial_intensity(const GeneratorContext& ctx, const Matrix& rho, double t,
                                              int k) {
    const int n = ctx.reg.n;
    if (k < 1 || k > n) throw ValidationError("partial intensity prefix k must be in 1..N");
    if (!ctx.reg.is_uniform())
        throw ValidationError("correlated partial intensity requires uniform qubit frequencies");
    if (qubits_of(rho) != n) throw ValidationError("state dimension does not match register");
    PartialIntensity out;
    if (!ctx.table) return out;
    const double w0 = ctx.reg.frequencies.front();
    const bool ns = ctx.options.include_nonsecular && ctx.options.include_lamb_hamiltonians;
    std::optional<CoefficientSet> coeffs;
    for (std::size_t j = 0; j < ctx.table->channel_count(); ++j) {
        const auto& ch = ctx.table->channels()[j];
        if (ch.coupling != Coupling::transverse) continue;
        const double re_minus = ctx.table->phi(j, -w0, t).real();
        const double re_plus = ctx.table->phi(j, w0, t).real();
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < n; ++b) {
                if (b == a) continue;
                const cplx q = ch.correlation.factor(a, b) * re_minus - ch.correlation.factor(b, a) * re_plus;
                if (q != 0.0) out.dissipative += (2.0 * w0 * q * pair_expectation(rho, true, a, false, b)).real();
            }
        }
        if (ns) {
            if (!coeffs) coeffs = ctx.table->coefficients_at(t);
            const auto& J3 = coeffs->channels[j].J3;
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < n; ++b) {
                    if (b == a || J3(a, b) == 0.0) continue;
                    const cplx e = pair_expectation(rho, true, a, true, b);
                    out.nonsecular += 2.0 * w0 * 2.0 * (cplx(0.0, 1.0) * J3(a, b) * e).real();
                }
        }
    }
    return out;
}

T1Fit extract_t1(const std::vector<double>& times, const std::vector<double>& population) {
    if (times.size() != population.size()) throw ValidationError("times and population differ in length");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (population[i] > 0.0 && std::isfinite(population[i])) {
            x.push_back(times[i]);
            y.push_back(std::log(population[i]));
        }
    if (x.size() < 2) throw NumericalError("T1 fit needs at least two positive population samples");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw NumericalError("T1 fit needs distinct sample times");
    const double slope = sxy / sxx;
    const double span = x.back() - x.front();
    if (!(slope < 0.0) || -slope * span < 1e-12)
        throw NumericalError("T1 fit failed: population is not decaying");
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (my + slope * (x[i] - mx));
        rss += r * r;
    }
    return {-1.0 / slope, std::sqrt(rss / n)};
}

IntensityTrace intensity_trace(const GeneratorContext& ctx, const Trajectory& tr, bool partial) {
    IntensityTrace out;
    const int n = ctx.reg.n;
    const bool do_partial = partial && ctx.reg.is_uniform();
    out.zexp.assign(static_cast<std::size_t>(n), {});
    if (do_partial) {
        out.I_corr_partial.assign(static_cast<std::size_t>(n), {});
        out.I_ns_partial.assign(static_cast<std::size_t>(n), {});
    }
    for (std::size_t s = 0; s < tr.times.size(); ++s) {
        const double t = tr.times[s];
        const Matrix& rho = tr.states[s];
        out.times.push_back(t);
        out.W.push_back(total_energy(rho, ctx.reg));
        const double it = intensity_from_generator(ctx, rho, t).total;
        const double il = local_emission(ctx, rho, t);
        out.I_total.push_back(it);
        out.I_local.push_back(il);
        out.I_corr.push_back(it - il);
        out.min_eig.push_back(s < tr.min_eigenvalues.size() ? tr.min_eigenvalues[s] : std::nan(""));
        const auto z = z_expectations(rho);
        for (int a = 0; a < n; ++a) out.zexp[a].push_back(z[a]);
        if (do_partial)
            for (int k = 1; k <= n; ++k) {
                const auto p = correlated_partial_intensity(ctx, rho, t, k);
                out.I_corr_partial[k - 1].push_back(p.total());
                out.I_ns_partial[k - 1].push_back(p.nonsecular);
            }
    }
    return out;
}

} // namespace corrnoise
