// Spectral integrals against time-domain oracles built from closed-form bath
// correlation functions, plus the algebraic properties of the coefficients.

#include "support.hpp"

#include "corrnoise/errors.hpp"
#include "corrnoise/spectra.hpp"

#include <doctest.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <functional>

using namespace corrnoise;
using namespace testsupport;

namespace {

// Adaptive real integral on [a, b] split into unit-length pieces.
double integrate(const std::function<double(double)>& f, double a, double b, double piece = 1.0) {
    gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
    gsl_function F;
    F.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };
    F.params = const_cast<std::function<double(double)>*>(&f);
    double total = 0.0;
    for (double x = a; x < b; x += piece) {
        double r = 0.0, err = 0.0;
        gsl_integration_qag(&F, x, std::min(b, x + piece), 1e-15, 1e-13, 2000, GSL_INTEG_GAUSS61, w, &r, &err);
        total += r;
    }
    gsl_integration_workspace_free(w);
    return total;
}

// Phi(nu, t) = integral_0^t exp(-i nu s) C(s) ds.
cplx phi_time_domain(const std::function<cplx(double)>& C, double nu, double t, double piece = 1.0) {
    const double re = integrate([&](double s) { return (std::exp(cplx(0, -nu * s)) * C(s)).real(); }, 0.0, t, piece);
    const double im = integrate([&](double s) { return (std::exp(cplx(0, -nu * s)) * C(s)).imag(); }, 0.0, t, piece);
    return {re, im};
}

// Ohmic S = lambda w exp(-w/wc) for w > 0.
cplx ohmic_correlation(double lambda, double wc, double s) {
    const cplx d = 1.0 + cplx(0, wc * s);
    return lambda * wc * wc / (2.0 * M_PI * d * d);
}

} // namespace

TEST_SUITE("spectra") {

TEST_CASE("filter function closed form and small-argument series") {
    CHECK(filter_function(0.0, 2.5) == cplx(2.5));
    CHECK(filter_function(3.7, 0.0) == cplx(0.0));
    const cplx f = filter_function(M_PI, 1.0);
    CHECK(std::abs(f - cplx(0, -2.0 / M_PI)) < 1e-15);
    // continuity across the series switch, against the defining integral
    for (double w : {1e-10, 1e-9, 3e-9, 1e-8, 2e-8, 1e-3, 0.7, -2.0}) {
        for (double t : {0.5, 1.0, 3.0}) {
            const cplx ref(integrate([&](double s) { return std::cos(w * s); }, 0, t),
                           integrate([&](double s) { return -std::sin(w * s); }, 0, t));
            CHECK(std::abs(filter_function(w, t) - ref) < 1e-13);
        }
    }
}

TEST_CASE("spectrum models") {
    const auto o = SpectrumModel::ohmic(1e-5, 10.0);
    CHECK(o(1.0) == doctest::Approx(1e-5 * std::exp(-0.1)).epsilon(1e-15));
    CHECK(o(-1.0) == 0.0);
    CHECK(spectrum_value(o, 0.0) == 0.0);
    const auto f = SpectrumModel::one_over_f(1e-9, 1e-6);
    CHECK(f(2.0) == doctest::Approx(5e-10));
    CHECK(f(-2.0) == doctest::Approx(5e-10));
    CHECK(f(1e-8) == doctest::Approx(1e-3));
    CHECK(SpectrumModel::white(0.3)(-50.0) == 0.3);
    const auto tab = SpectrumModel::tabulated({{0.0, 1.0}, {1.0, 3.0}, {2.0, 0.0}});
    CHECK(tab(0.5) == doctest::Approx(2.0));
    CHECK(tab(1.5) == doctest::Approx(1.5));
    CHECK(tab(-0.1) == 0.0);
    CHECK(tab(2.1) == 0.0);
    CHECK_THROWS_AS(SpectrumModel::ohmic(-1.0, 1.0).validate(), ValidationError);
    CHECK_THROWS_AS(SpectrumModel::ohmic(1.0, 0.0).validate(), ValidationError);
    CHECK_THROWS_AS(SpectrumModel::one_over_f(1.0, 0.0).validate(), ValidationError);
    CHECK_THROWS_AS(SpectrumModel::tabulated({{0.0, 1.0}, {0.0, 2.0}}).validate(), ValidationError);
    CHECK_THROWS_AS(SpectrumModel::tabulated({{0.0, 1.0}, {1.0, -2.0}}).validate(), ValidationError);
    CHECK_THROWS_AS(parse_spectrum_kind("pink"), ValidationError);
}

TEST_CASE("correlation matrices") {
    const auto full = CorrelationMatrix::full(4, 0.3);
    const auto diag = CorrelationMatrix::diagonal(4);
    const auto win = CorrelationMatrix::window(5, 3);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            // Hermitian in (a, b) with unit diagonal
            CHECK(std::abs(full.factor(a, b) - std::conj(full.factor(b, a))) < 1e-16);
            CHECK(std::abs(diag.factor(a, b) - (a == b ? 1.0 : 0.0)) == 0.0);
        }
    CHECK(std::abs(full.factor(0, 2) - std::exp(cplx(0, 0.3))) < 1e-16);
    CHECK(std::abs(full.factor(2, 0) - std::exp(cplx(0, -0.3))) < 1e-16);
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) CHECK(win.factor(a, b) == cplx((a == b || (a < 3 && b < 3)) ? 1.0 : 0.0));
    CHECK_THROWS_AS(CorrelationMatrix::window(3, 4), ValidationError);
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 1.5, 1.5, 1;
    CHECK_THROWS_AS(CorrelationMatrix::custom(bad).validate(), ValidationError);
    bad << 1, 0.2, 0.3, 1;
    CHECK_THROWS_AS(CorrelationMatrix::custom(bad).validate(), ValidationError);
    NoiseChannel ch{Coupling::transverse, SpectrumModel::white(1.0), CorrelationMatrix::full(3)};
    CHECK_THROWS_AS(ch.validate(4), ValidationError);
}

TEST_CASE("ohmic base integral matches the closed-form correlation function") {
    const double lambda = 1e-5, wc = 10.0;
    const auto model = SpectrumModel::ohmic(lambda, wc);
    for (double nu : {-1.0, 1.0, 0.0, -0.995, 2.0}) {
        const FilterIntegral phi(model, nu);
        for (double t : {0.01, 0.1, 1.0, 7.3, 40.0, 250.0}) {
            const cplx ref = phi_time_domain([&](double s) { return ohmic_correlation(lambda, wc, s); }, nu, t, 0.25);
            const cplx got = phi(t);
            CHECK_MESSAGE(std::abs(got - ref) <= 1e-10 * lambda, "nu=" << nu << " t=" << t << " got " << got << " want " << ref);
        }
        CHECK(phi(0.0) == cplx(0.0));
    }
}

TEST_CASE("1/f base integral at zero frequency matches the sine/cosine-integral closed form") {
    const double lambda = 1e-9, wir = 1e-6, big = 1e4; // big: the spectrum's truncation
    const auto model = SpectrumModel::one_over_f(lambda, wir);
    const FilterIntegral phi(model, 0.0);
    auto closed = [&](double t) {
        return lambda / M_PI *
               (gsl_sf_Si(wir * t) / wir + t * gsl_sf_Ci(big * t) - std::sin(big * t) / big - t * gsl_sf_Ci(wir * t) +
                std::sin(wir * t) / wir);
    };
    for (double t : {1e-3, 0.1, 1.0, 10.0, 100.0, 1000.0, 5000.0}) {
        const double ref = closed(t);
        const cplx got = phi(t);
        CHECK_MESSAGE(std::abs(got.real() - ref) <= 1e-9 * (std::abs(ref) + lambda), "t=" << t << " got " << got << " want " << ref);
        CHECK(std::abs(got.imag()) <= 1e-9 * (std::abs(ref) + lambda)); // even spectrum: real Phi(0, t)
    }
}

TEST_CASE("tabulated base integral against nested quadrature") {
    const std::vector<std::pair<double, double>> nodes{{-1.0, 0.0}, {0.5, 2.0}, {2.0, 1.0}, {3.0, 0.0}};
    const auto model = SpectrumModel::tabulated(nodes);
    std::vector<double> gx(64), gw(64);
    // 64-point Gauss-Legendre via GSL fixed tables
    gsl_integration_glfixed_table* tbl = gsl_integration_glfixed_table_alloc(64);
    for (std::size_t i = 0; i < 64; ++i) gsl_integration_glfixed_point(-1, 1, i, &gx[i], &gw[i], tbl);
    gsl_integration_glfixed_table_free(tbl);
    auto C = [&](double s) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
            const double a = nodes[k].first, b = nodes[k + 1].first;
            for (std::size_t i = 0; i < 64; ++i) {
                const double w = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
                acc += 0.5 * (b - a) * gw[i] * model(w) * std::exp(cplx(0, -w * s));
            }
        }
        return acc / (2.0 * M_PI);
    };
    for (double nu : {0.0, 1.0, -1.0}) {
        const FilterIntegral phi(model, nu);
        for (double t : {0.3, 2.0, 12.0}) {
            const cplx ref = phi_time_domain(C, nu, t, 0.5);
            CHECK_MESSAGE(std::abs(phi(t) - ref) <= 1e-11, "nu=" << nu << " t=" << t);
        }
    }
}

TEST_CASE("white noise: Phi = S0/2 and gamma_phi = S0 for t > 0") {
    const double s0 = 2.5e-3;
    NoiseChannel ch{Coupling::longitudinal, SpectrumModel::white(s0), CorrelationMatrix::diagonal(1)};
    for (double t : {0.1, 0.5, 1.0, 10.0, 100.0}) {
        CHECK(std::abs(dephasing_rate(ch, 1, 1, t) - s0) <= 1e-6 * s0);
        CHECK(std::abs(FilterIntegral(ch.spectrum, 0.0)(t) - 0.5 * s0) <= 1e-15);
    }
    CHECK(dephasing_rate(ch, 1, 1, 0.0) == cplx(0.0));
}

TEST_CASE("relaxation rates follow the defining filter combinations") {
    const double lambda = 1e-5, wc = 10.0;
    const std::vector<double> freqs{0.995, 1.0025};
    NoiseChannel ch{Coupling::transverse, SpectrumModel::ohmic(lambda, wc), CorrelationMatrix::full(2, 0.4)};
    auto P = [&](double nu, double t) {
        return phi_time_domain([&](double s) { return ohmic_correlation(lambda, wc, s); }, nu, t, 0.25);
    };
    const double t = 5.0;
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) {
            const double wa = freqs[a - 1], wb = freqs[b - 1];
            const cplx c = ch.correlation.factor(a - 1, b - 1);
            const cplx g12 = c * std::exp(cplx(0, (wb - wa) * t)) * (P(wb, t) + std::conj(P(wa, t)));
            const cplx g21 = c * std::exp(cplx(0, (wa - wb) * t)) * (P(-wb, t) + std::conj(P(-wa, t)));
            const cplx g11 = c * std::exp(cplx(0, (wa + wb) * t)) * (P(wb, t) + std::conj(P(-wa, t)));
            const auto r = relaxation_rates(ch, freqs, a, b, t);
            CHECK(std::abs(r.g12 - g12) <= 1e-10 * lambda);
            CHECK(std::abs(r.g21 - g21) <= 1e-10 * lambda);
            CHECK(std::abs(r.g11 - g11) <= 1e-10 * lambda);
            const cplx i2(0, 2);
            const auto h = hamiltonian_coeffs(ch, freqs, a, b, t);
            CHECK(std::abs(h.J1 - c * std::exp(cplx(0, (wb - wa) * t)) * (P(wb, t) - std::conj(P(wa, t))) / i2) <= 1e-10 * lambda);
            CHECK(std::abs(h.J2 - c * std::exp(cplx(0, (wa - wb) * t)) * (P(-wb, t) - std::conj(P(-wa, t))) / i2) <= 1e-10 * lambda);
            CHECK(std::abs(h.J3 - c * std::exp(cplx(0, (wa + wb) * t)) * (P(wb, t) - std::conj(P(-wa, t))) / i2) <= 1e-10 * lambda);
        }
    // Hermiticity of the rate matrices in (a, b)
    const auto r12 = relaxation_rates(ch, freqs, 1, 2, t), r21 = relaxation_rates(ch, freqs, 2, 1, t);
    CHECK(std::abs(r12.g12 - std::conj(r21.g12)) < 1e-18);
    CHECK(std::abs(r12.g21 - std::conj(r21.g21)) < 1e-18);
    // every coefficient vanishes at t = 0
    const auto r0 = relaxation_rates(ch, freqs, 1, 2, 0.0);
    CHECK(r0.g12 == cplx(0.0));
    CHECK(r0.g11 == cplx(0.0));
}

TEST_CASE("Markov limit of the emission rate and the Q factor") {
    const double lambda = 1e-5, wc = 10.0;
    NoiseChannel ch{Coupling::transverse, SpectrumModel::ohmic(lambda, wc), CorrelationMatrix::full(2)};
    const std::vector<double> freqs{1.0, 1.0};
    const double s1 = lambda * std::exp(-0.1);
    // gamma21_aa -> S(w) once the bath memory has decayed
    const auto r = relaxation_rates(ch, freqs, 1, 1, 2e4);
    CHECK(std::abs(r.g21 - s1) <= 1e-3 * s1);
    CHECK(std::abs(r.g12) <= 1e-3 * s1); // S(-w) = 0 at zero temperature
    const cplx qm = q_factor(ch, freqs, 1, 2, 0.0, true);
    CHECK(std::abs(qm - 0.5 * s1) <= 1e-15);
    const cplx q = q_factor(ch, freqs, 1, 2, 2e4, false);
    CHECK(std::abs(q - qm) <= 1e-3 * s1);
    CHECK_THROWS_AS(q_factor(ch, {1.0, 1.01}, 1, 2, 1.0, false), ValidationError);
}

TEST_CASE("dephasing coefficients of correlated 1/f noise") {
    NoiseChannel ch{Coupling::longitudinal, SpectrumModel::one_over_f(1e-9, 1e-6), CorrelationMatrix::full(3)};
    const double t = 300.0;
    const cplx g11 = dephasing_rate(ch, 1, 1, t);
    CHECK(std::abs(dephasing_rate(ch, 1, 3, t) - g11) < 1e-20);
    CHECK(std::abs(g11.imag()) < 1e-20);
    CHECK(std::abs(zz_coupling(ch, 1, 2, t)) <= 1e-9 * std::abs(g11)); // even spectrum: no ZZ shift
    CHECK_THROWS_AS(relaxation_rates(ch, {1, 1, 1}, 1, 2, t), ValidationError);
}

TEST_CASE("quadrature self-convergence and failure reporting") {
    for (const auto& model : {SpectrumModel::ohmic(1e-5, 10.0), SpectrumModel::one_over_f(1e-9, 1e-6)}) {
        for (double nu : {0.0, 1.0, -1.0}) {
            QuadratureOptions split;
            split.split_all = true;
            const FilterIntegral a(model, nu), b(model, nu, split);
            CHECK(b.panel_count() > a.panel_count());
            for (double t : {0.5, 20.0, 3000.0}) {
                CHECK(std::abs(a(t) - b(t)) <= 1e-10 * std::abs(a(t)) + 1e-8 * model.strength);
            }
            CHECK(a.error_estimate() >= 0.0);
        }
    }
    QuadratureOptions tight;
    tight.max_depth = 1;
    CHECK_THROWS_AS(FilterIntegral(SpectrumModel::one_over_f(1e-9, 1e-6), 0.0, tight), QuadratureError);
}

TEST_CASE("Pauli-form combinations and the ladder-operator exchange Hamiltonian") {
    // Real J1, J2 (resonant qubits, theta = 0) and complex J3.
    const int n = 2;
    const cplx J1(0.3), J2(-0.7), J3(0.2, 0.45);
    const auto h = pauli_form(J1, J2, J3);
    CHECK(h.JXX == doctest::Approx((0.3 - 0.7 + 0.4) / 4));
    CHECK(h.JYY == doctest::Approx((0.3 - 0.7 - 0.4) / 4));
    CHECK(h.D == doctest::Approx((0.3 + 0.7) / 4));
    CHECK(h.JXY == doctest::Approx(-0.45 / 2));
    const Matrix X1 = embed(sx(), 1, n), X2 = embed(sx(), 2, n), Y1 = embed(sy(), 1, n), Y2 = embed(sy(), 2, n);
    const Matrix P1 = embed(lower(), 1, n), P2 = embed(lower(), 2, n);
    const Matrix ladder_form = J1 * P1 * P2.adjoint() + J2 * P1.adjoint() * P2 + J3 * P1.adjoint() * P2.adjoint() +
                               std::conj(J3) * P2 * P1;
    // With Pi = (X + iY)/2 the operator identity carries D and J^XY with the
    // opposite sign to the combinations above.
    const Matrix pauli = h.JXX * X1 * X2 + h.JYY * Y1 * Y2 - cplx(0, h.D) * (X1 * Y2 - Y1 * X2) -
                         h.JXY * (X1 * Y2 + Y1 * X2);
    CHECK(max_abs(ladder_form - pauli) < 1e-15);
}

}
