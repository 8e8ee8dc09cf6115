// Observables checked against explicit operator traces.

#include "support.hpp"

#include "corrnoise/errors.hpp"
#include "corrnoise/observables.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace corrnoise;
using namespace testsupport;

namespace {

Eigen::Matrix2cd ez() { Eigen::Matrix2cd m; m << -1, 0, 0, 1; return m; }

GeneratorContext context(int n, double w, std::vector<NoiseChannel> chans, double t_max = 40.0) {
    GeneratorContext ctx;
    ctx.reg = RegisterConfig::uniform(n, w);
    ctx.table = std::make_shared<const RateTable>(build_rate_table(chans, ctx.reg, t_max, 0.1));
    return ctx;
}

// -dW/dt from the generator, W = sum_a w_a Z_a / 2 in the excitation convention.
double intensity_oracle(const GeneratorContext& ctx, const Matrix& rho, double t) {
    const Matrix d = full_generator(ctx, rho, t);
    double s = 0.0;
    for (int a = 1; a <= ctx.reg.n; ++a) s -= 0.5 * ctx.reg.frequencies[a - 1] * (embed(ez(), a, ctx.reg.n) * d).trace().real();
    return s;
}

} // namespace

TEST_SUITE("observables") {

TEST_CASE("expectations against explicit traces") {
    std::mt19937_64 rng(3);
    const int n = 3;
    const Matrix rho = random_density(n, rng);
    const auto z = z_expectations(rho);
    RegisterConfig reg;
    reg.n = n;
    reg.frequencies = {0.9, 1.0, 1.2};
    double w = 0.0;
    for (int a = 1; a <= n; ++a) {
        const double want = (embed(ez(), a, n) * rho).trace().real();
        CHECK(z[a - 1] == doctest::Approx(want).epsilon(1e-14));
        w += 0.5 * reg.frequencies[a - 1] * want;
    }
    CHECK(total_energy(rho, reg) == doctest::Approx(w).epsilon(1e-14));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (bool ra : {false, true})
                for (bool rb : {false, true}) {
                    const Matrix Pa = ra ? Matrix(embed(lower(), a + 1, n).adjoint()) : embed(lower(), a + 1, n);
                    const Matrix Pb = rb ? Matrix(embed(lower(), b + 1, n).adjoint()) : embed(lower(), b + 1, n);
                    CHECK(std::abs(pair_expectation(rho, ra, a, rb, b) - (rho * Pa * Pb).trace()) < 1e-14);
                }
    CHECK(total_energy(initial_state(StateKind::inverted, n), reg) == doctest::Approx(1.55));
}

TEST_CASE("generator intensity, local emission and channel split") {
    std::mt19937_64 rng(9);
    const int n = 3;
    const auto ctx = context(n, 1.0,
                             {{Coupling::transverse, SpectrumModel::ohmic(1e-5, 10.0), CorrelationMatrix::full(n, 0.1)},
                              {Coupling::transverse, SpectrumModel::ohmic(3e-6, 4.0), CorrelationMatrix::diagonal(n)},
                              {Coupling::longitudinal, SpectrumModel::white(1e-4), CorrelationMatrix::full(n)}});
    for (double t : {0.2, 5.0, 33.0}) {
        const Matrix rho = random_density(n, rng);
        const auto I = intensity_from_generator(ctx, rho, t);
        const double want = intensity_oracle(ctx, rho, t);
        CHECK(std::abs(I.total - want) < 1e-18);
        REQUIRE(I.per_channel.size() == 3);
        CHECK(std::abs(I.per_channel[0] + I.per_channel[1] + I.per_channel[2] - I.total) < 1e-19);
        CHECK(std::abs(I.per_channel[2]) < 1e-20); // dephasing carries no energy

        // local emission from the diagonal rates
        double local = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            const auto& ch = ctx.table->channels()[k];
            for (int a = 1; a <= n; ++a) {
                const auto r = relaxation_rates(ch, ctx.reg.frequencies, a, a, t);
                const double p1 = (rho * embed(lower(), a, n).adjoint() * embed(lower(), a, n)).trace().real();
                local += r.g21.real() * p1 - r.g12.real() * (1.0 - p1);
            }
        }
        CHECK(std::abs(local_emission(ctx, rho, t) - local) < 1e-13 * 1e-5);

        // the full prefix of the correlated part is everything but the local part
        const auto p = correlated_partial_intensity(ctx, rho, t, n);
        CHECK(std::abs(p.total() - (I.total - local_emission(ctx, rho, t))) < 1e-10 * 1e-5);
    }
}

TEST_CASE("partial intensity: explicit sums and window saturation") {
    std::mt19937_64 rng(21);
    const int n = 4;
    const NoiseChannel ch{Coupling::transverse, SpectrumModel::ohmic(1e-5, 10.0), CorrelationMatrix::window(n, 2)};
    const auto ctx = context(n, 1.0, {ch});
    const Matrix rho = random_density(n, rng);
    const double t = 7.5;
    for (int k = 1; k <= n; ++k) {
        double diss = 0.0, ns = 0.0;
        for (int a = 1; a <= k; ++a)
            for (int b = 1; b <= n; ++b) {
                if (a == b) continue;
                const Matrix Pa = embed(lower(), a, n), Pb = embed(lower(), b, n);
                const cplx q = q_factor(ch, ctx.reg.frequencies, a, b, t, false);
                diss += (2.0 * q * (rho * Pa.adjoint() * Pb).trace()).real();
                const auto h = hamiltonian_coeffs(ch, ctx.reg.frequencies, a, b, t);
                ns += 2.0 * 2.0 * (cplx(0, 1) * h.J3 * (rho * Pa.adjoint() * Pb.adjoint()).trace()).real();
            }
        const auto p = correlated_partial_intensity(ctx, rho, t, k);
        CHECK(std::abs(p.dissipative - diss) < 1e-12 * 1e-5);
        CHECK(std::abs(p.nonsecular - ns) < 1e-12 * 1e-5);
    }
    // qubits outside the correlated window add nothing
    CHECK(correlated_partial_intensity(ctx, rho, t, 2).total() ==
          doctest::Approx(correlated_partial_intensity(ctx, rho, t, 4).total()).epsilon(1e-12));

    GeneratorContext detuned = ctx;
    detuned.reg.frequencies = {1.0, 1.0, 1.0, 1.001};
    CHECK_THROWS_AS(correlated_partial_intensity(detuned, rho, t, 1), ValidationError);
    CHECK_THROWS_AS(correlated_partial_intensity(ctx, rho, t, 5), ValidationError);
}

TEST_CASE("finite differences and T1 fit") {
    std::vector<double> t, W;
    for (int i = 0; i <= 20; ++i) {
        t.push_back(0.5 * i);
        W.push_back(3.0 - 0.2 * t.back() + 0.01 * t.back() * t.back());
    }
    const auto I = intensity_from_finite_difference(t, W);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(I[i] == doctest::Approx(0.2 - 0.02 * t[i]).epsilon(1e-12));
    CHECK_THROWS_AS(intensity_from_finite_difference({0, 1}, {0, 1}), ValidationError);
    CHECK_THROWS_AS(intensity_from_finite_difference({0, 1, 3}, {0, 1, 2}), ValidationError);

    std::vector<double> p;
    for (double x : t) p.push_back(std::exp(-x / 12.5));
    const auto fit = extract_t1(t, p);
    CHECK(fit.t1 == doctest::Approx(12.5).epsilon(1e-10));
    CHECK(fit.residual < 1e-12);

    RegisterConfig reg = RegisterConfig::uniform(2, 2.0);
    const Matrix inv = initial_state(StateKind::inverted, 2);
    CHECK(local_intensity(inv, reg, {4.0, 8.0}) == doctest::Approx(2.0 / 4.0 + 2.0 / 8.0));
    CHECK_THROWS_AS(local_intensity(inv, reg, {4.0}), ValidationError);
}

TEST_CASE("intensity trace columns") {
    const int n = 2;
    const auto ctx = context(n, 1.0, {{Coupling::transverse, SpectrumModel::ohmic(1e-5, 10.0), CorrelationMatrix::full(n)}}, 20.0);
    const auto tr = evolve(ctx, initial_state(StateKind::inverted, n), 20.0, 1.0);
    const auto it = intensity_trace(ctx, tr, true);
    REQUIRE(it.times.size() == tr.times.size());
    REQUIRE(it.I_corr_partial.size() == 2);
    REQUIRE(it.zexp.size() == 2);
    for (std::size_t k = 0; k < it.times.size(); ++k) {
        CHECK(it.I_total[k] == doctest::Approx(it.I_local[k] + it.I_corr[k]).epsilon(1e-14));
        CHECK(std::abs(it.I_corr_partial[1][k] - it.I_corr[k]) <= 1e-10 * 1e-5);
        CHECK(it.W[k] == doctest::Approx(total_energy(tr.states[k], ctx.reg)).epsilon(1e-15));
    }
}

}
