// Parity and multiple-quantum-coherence protocols against explicit
// Kronecker-product oracles.

#include "support.hpp"

#include "corrnoise/errors.hpp"
#include "corrnoise/protocols.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <memory>
#include <set>

using namespace corrnoise;
using namespace testsupport;

namespace {

Matrix global(const Eigen::Matrix2cd& u, int n) {
    return kron_chain(std::vector<Eigen::Matrix2cd>(static_cast<std::size_t>(n), u));
}

// <Z x Z x ... x Z> after the gate, Z the textbook Pauli.
double parity_oracle(const Matrix& rho, double phi, int n) {
    Eigen::Matrix2cd g;
    g << 1, cplx(0, 1) * std::exp(cplx(0, -phi)), cplx(0, 1) * std::exp(cplx(0, phi)), 1;
    g /= std::sqrt(2.0);
    const Matrix U = global(g, n);
    return (global(sz(), n) * U * rho * U.adjoint()).trace().real();
}

// Coherence-order block q: elements whose excitation numbers differ by q.
Matrix order_block(const Matrix& rho, int q) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j)
            if (std::popcount(static_cast<unsigned>(i)) - std::popcount(static_cast<unsigned>(j)) == q) out(i, j) = rho(i, j);
    return out;
}

} // namespace

TEST_SUITE("protocols") {

TEST_CASE("gate and signal against explicit products") {
    std::mt19937_64 rng(1);
    for (int n : {1, 2, 3}) {
        const Matrix rho = random_density(n, rng);
        for (double phi : {0.0, 0.4, 2.0, -1.3}) {
            CHECK(parity_signal(rho, phi) == doctest::Approx(parity_oracle(rho, phi, n)).epsilon(1e-13));
            const Matrix2 g = parity_gate(phi);
            CHECK(max_abs(apply_local_gate(rho, g) - global(g, n) * rho * global(g, n).adjoint()) < 1e-15);
            CHECK(max_abs(Matrix(g * g.adjoint()) - Matrix::Identity(2, 2)) < 1e-15);
        }
    }
    const auto a = parity_angles(2);
    REQUIRE(a.size() == 5);
    CHECK(a[0] == doctest::Approx(M_PI / 2));
    CHECK(a[1] - a[0] == doctest::Approx(2 * M_PI / 5));
    CHECK(mqc_angles(2)[1] == doctest::Approx(-4 * M_PI / 5));
}

TEST_CASE("parity extraction inverts the signal on random states") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 5;
        const Matrix rho = random_density(n, rng);
        const auto got = parity_extract(parity_trace(rho));
        const auto want = cluster_by_excess(rho);
        REQUIRE(got.size() == want.size());
        for (const auto& [k, v] : want) CHECK(std::abs(got.at(k) - v) < 1e-13);
    }
    const auto ghz = parity_extract(parity_trace(initial_state(StateKind::ghz, 5)));
    CHECK(std::abs(ghz.at(5) - 0.5) < 1e-13);
    CHECK(std::abs(ghz.at(-5) - 0.5) < 1e-13);
    CHECK(std::abs(ghz.at(1)) < 1e-13);
    ParityTrace bad = parity_trace(initial_state(StateKind::ghz, 2));
    bad.phis[1] += 0.01;
    CHECK_THROWS_AS(parity_extract(bad), ValidationError);
}

TEST_CASE("multiple-quantum coherences") {
    std::mt19937_64 rng(4);
    for (int n : {2, 3, 4}) {
        const Matrix rho = random_density(n, rng);
        const auto direct = coherence_intensities(rho);
        const auto fourier = mqc_extract(mqc_trace(rho));
        for (int q = -n; q <= n; ++q) {
            const double want = (order_block(rho, q) * order_block(rho, -q)).trace().real();
            CHECK(std::abs(direct.at(q) - want) < 1e-13);
            CHECK(std::abs(fourier.at(q) - want) < 1e-13);
        }
        const std::size_t last = (std::size_t{1} << n) - 1;
        CHECK(std::abs(direct.at(n) - std::norm(rho(0, last))) < 1e-15);
    }
    const Matrix ghz = initial_state(StateKind::ghz, 4);
    CHECK(coherence_intensities(ghz).at(4) == doctest::Approx(0.25));
    // the preparation circuit produces the GHZ state from |0...0>
    const Matrix U = ghz_preparation(4);
    const Matrix g0 = initial_state(StateKind::ground, 4);
    CHECK(max_abs(U * g0 * U.adjoint() - ghz) < 1e-14);
    // with the ideal state, the echo readout reproduces the overlap signal
    for (double phi : mqc_angles(4)) CHECK(mqc_echo_signal(ghz, phi, U) == doctest::Approx(mqc_signal(ghz, phi)).epsilon(1e-13));
    const auto echo = mqc_extract(mqc_trace(ghz, MqcMode::echo_protocol, &U));
    CHECK(echo.at(4) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(mqc_trace(ghz, MqcMode::echo_protocol, nullptr), ValidationError);
}

TEST_CASE("sampled parity is seeded and unbiased") {
    std::mt19937_64 rng(5);
    const Matrix rho = random_density(3, rng);
    const double phi = 0.8;
    CHECK(sample_parity(rho, phi, 1000, 42) == sample_parity(rho, phi, 1000, 42));
    CHECK(sample_parity(rho, phi, 1000, 42) != sample_parity(rho, phi, 1000, 43));
    const double exact = parity_signal(rho, phi);
    const double est = sample_parity(rho, phi, 4000000, 9);
    const double sd = std::sqrt((1.0 - exact * exact) / 4e6);
    CHECK(std::abs(est - exact) < 5.0 * sd);
    const auto a = parity_trace_sampled(rho, 500, 7, 0), b = parity_trace_sampled(rho, 500, 7, 0);
    const auto c = parity_trace_sampled(rho, 500, 7, 1);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    std::set<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 4; ++s)
        for (std::uint64_t i = 0; i < 100; ++i) seeds.insert(derive_seed(123, s, i));
    CHECK(seeds.size() == 400);
    const auto fit = shot_noise_scaling(rho, phi, {100, 1000, 10000}, 200, 3);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(0.1));
}

TEST_CASE("protocol runs sample the trajectory at idle times") {
    GeneratorContext ctx;
    ctx.reg = RegisterConfig::uniform(3);
    const std::vector<NoiseChannel> chans{{Coupling::longitudinal, SpectrumModel::white(1e-3), CorrelationMatrix::full(3)}};
    ctx.table = std::make_shared<const RateTable>(build_rate_table(chans, ctx.reg, 20.0, 0.1));
    ProtocolSpec spec;
    spec.idle_times = {0.0, 10.0, 20.0};
    const auto res = run_protocol(ctx, initial_state(StateKind::plus_all, 3), spec, 2.0);
    REQUIRE(res.points.size() == 3);
    for (const auto& p : res.points) {
        const auto k = static_cast<std::size_t>(std::lround(p.idle_time / 2.0));
        const auto want = cluster_by_excess(res.trajectory.states[k]);
        for (const auto& [q, v] : want) CHECK(std::abs(p.rho_k.at(q) - v) < 1e-13);
    }
    // collective white dephasing: the k = 3 cluster decays as exp(-2 S0 k^2 t)
    const double r3 = std::abs(res.points[2].rho_k.at(3)) / std::abs(res.points[0].rho_k.at(3));
    CHECK(r3 == doctest::Approx(std::exp(-2.0 * 1e-3 * 9.0 * 20.0)).epsilon(1e-6));
    spec.idle_times = {3.0};
    CHECK_THROWS_AS(run_protocol(ctx, initial_state(StateKind::plus_all, 3), spec, 2.0), ValidationError);
}

}
