// Rate table: node exactness, interpolation accuracy and agreement with the
// direct coefficient functions.

#include "corrnoise/errors.hpp"
#include "corrnoise/rate_table.hpp"

#include <doctest.h>

#include <cmath>

using namespace corrnoise;

namespace {

std::vector<NoiseChannel> mixed_channels(int n) {
    return {
        {Coupling::transverse, SpectrumModel::ohmic(1e-5, 10.0), CorrelationMatrix::full(n, 0.2)},
        {Coupling::longitudinal, SpectrumModel::one_over_f(1e-9, 1e-6), CorrelationMatrix::window(n, 2)},
    };
}

RegisterConfig detuned3() {
    RegisterConfig r;
    r.n = 3;
    r.frequencies = {0.995, 1.0, 1.004};
    return r;
}

} // namespace

TEST_SUITE("rate_table") {

TEST_CASE("grid layout") {
    const auto table = build_rate_table(mixed_channels(3), detuned3(), 50.0, 0.1);
    CHECK(table.dt_rate() == doctest::Approx(0.1));
    CHECK(table.head_step() == doctest::Approx(0.005));
    CHECK(table.head_end() > 0.0);
    CHECK(table.head_end() <= 50.0);
    const auto nodes = table.nodes_up_to(20.0);
    CHECK(nodes.front() == 0.0);
    for (std::size_t i = 1; i < nodes.size(); ++i) CHECK(nodes[i] > nodes[i - 1]);
    CHECK(nodes.back() <= 20.0 + 1e-12);
    CHECK_THROWS_AS(build_rate_table(mixed_channels(3), detuned3(), 50.0, 0.0), ValidationError);
    CHECK_THROWS_AS(table.coefficients_at(50.5), ValidationError);
}

TEST_CASE("node values and interpolation against direct integrals") {
    const auto chans = mixed_channels(3);
    const auto reg = detuned3();
    const auto table = build_rate_table(chans, reg, 200.0, 0.1);
    for (std::size_t k = 0; k < chans.size(); ++k) {
        std::vector<double> nus;
        if (chans[k].coupling == Coupling::transverse)
            for (double w : reg.frequencies) { nus.push_back(w); nus.push_back(-w); }
        else
            nus.push_back(0.0);
        const double scale = chans[k].spectrum.strength;
        for (double nu : nus) {
            const FilterIntegral direct(chans[k].spectrum, nu);
            for (double t : table.nodes_up_to(5.0)) CHECK(std::abs(table.phi(k, nu, t) - direct(t)) <= 1e-14 * scale);
            // head: direct quadrature; body: cubic interpolation on the dt_rate grid
            for (double t : {0.0031, 0.0517, 0.3333, 1.2345, 7.77, 33.3, 123.456, 199.99}) {
                const cplx d = direct(t);
                const double tol = t < table.head_end() ? 1e-15 * scale : 1e-8 * (std::abs(d) + scale);
                CHECK_MESSAGE(std::abs(table.phi(k, nu, t) - d) <= tol, "channel " << k << " nu " << nu << " t " << t);
            }
        }
    }
}

TEST_CASE("coefficient set matches the direct coefficient functions") {
    const auto chans = mixed_channels(3);
    const auto reg = detuned3();
    const auto table = build_rate_table(chans, reg, 100.0, 0.1);
    for (double t : {0.0, 0.4, 17.0, 99.9}) {
        const auto set = table.coefficients_at(t);
        REQUIRE(set.channels.size() == 2);
        const auto& tr = set.channels[0];
        const auto& lo = set.channels[1];
        CHECK(tr.coupling == Coupling::transverse);
        CHECK(lo.coupling == Coupling::longitudinal);
        const double tol = 1e-8 * 1e-5;
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b) {
                const auto r = relaxation_rates(chans[0], reg.frequencies, a, b, t);
                const auto h = hamiltonian_coeffs(chans[0], reg.frequencies, a, b, t);
                CHECK(std::abs(tr.g12(a - 1, b - 1) - r.g12) <= tol);
                CHECK(std::abs(tr.g21(a - 1, b - 1) - r.g21) <= tol);
                CHECK(std::abs(tr.g11(a - 1, b - 1) - r.g11) <= tol);
                CHECK(std::abs(tr.g22(b - 1, a - 1) - std::conj(r.g11)) <= tol);
                CHECK(std::abs(tr.J1(a - 1, b - 1) - h.J1) <= tol);
                CHECK(std::abs(tr.J2(a - 1, b - 1) - h.J2) <= tol);
                CHECK(std::abs(tr.J3(a - 1, b - 1) - h.J3) <= tol);
                const cplx gp = dephasing_rate(chans[1], a, b, t);
                CHECK(std::abs(lo.gphi(a - 1, b - 1) - gp) <= 1e-8 * (std::abs(gp) + 1e-9));
                CHECK(std::abs(lo.jzz(a - 1, b - 1) - zz_coupling(chans[1], a, b, t)) <= 1e-17);
            }
    }
}

}
