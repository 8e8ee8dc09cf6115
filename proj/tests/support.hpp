// support.hpp — shared helpers for the test binaries: random states and
// operators built by explicit Kronecker products
#pragma once

#include "corrnoise/hilbert.hpp"

#include <Eigen/Dense>
#include <random>

namespace testsupport {

using corrnoise::cplx;
using corrnoise::Matrix;

// Kronecker product of 2x2 factors, qubit 1 leftmost.
inline Matrix kron_chain(const std::vector<Eigen::Matrix2cd>& f) {
    Matrix out = Matrix::Ones(1, 1);
    for (const auto& m : f) {
        Matrix next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * m;
        out = next;
    }
    return out;
}

// Single-site operator `m` on qubit `site` (1-based) of an n-qubit register.
inline Matrix embed(const Eigen::Matrix2cd& m, int site, int n) {
    std::vector<Eigen::Matrix2cd> f(static_cast<std::size_t>(n), Eigen::Matrix2cd::Identity());
    f[static_cast<std::size_t>(site - 1)] = m;
    return kron_chain(f);
}

inline Eigen::Matrix2cd sx() { Eigen::Matrix2cd m; m << 0, 1, 1, 0; return m; }
inline Eigen::Matrix2cd sy() { Eigen::Matrix2cd m; m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Eigen::Matrix2cd sz() { Eigen::Matrix2cd m; m << 1, 0, 0, -1; return m; }
// (X + iY)/2 = |0><1|
inline Eigen::Matrix2cd lower() { return 0.5 * (sx() + cplx(0, 1) * sy()); }

// Random full-rank density matrix from a Ginibre matrix.
inline Matrix random_density(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const auto dim = static_cast<Eigen::Index>(1) << n;
    Matrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

// Random Hermitian (not necessarily positive) matrix of unit trace.
inline Matrix random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const auto dim = static_cast<Eigen::Index>(1) << n;
    Matrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
    Matrix h = 0.5 * (a + a.adjoint());
    h += Matrix::Identity(dim, dim) * ((1.0 - h.trace().real()) / static_cast<double>(dim));
    return h;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace testsupport
