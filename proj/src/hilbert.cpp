// hilbert.cpp — register operators and states

#include "corrnoise/hilbert.hpp"

#include "corrnoise/errors.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>

namespace corrnoise {

namespace {

using Local = Eigen::Matrix2cd;

Matrix embed(const Local& op, int site, int n) {
    check_register(n, site);
    const std::size_t dim = dimension(n);
    const int shift = n - site;
    const std::uint32_t mask = 1u << shift;
    Matrix out = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const std::uint32_t rest = static_cast<std::uint32_t>(i) & ~mask;
        const int bi = static_cast<int>((i >> shift) & 1u);
        for (int bj = 0; bj < 2; ++bj) {
            const std::size_t j = rest | (static_cast<std::uint32_t>(bj) << shift);
            out(i, j) = op(bi, bj);
        }
    }
    return out;
}

} // namespace

Bitstring Bitstring::parse(const std::string& bits) {
    if (bits.empty() || bits.size() > static_cast<std::size_t>(kMaxQubits))
        throw ValidationError("bitstring length must be 1.." + std::to_string(kMaxQubits));
    Bitstring b;
    b.n = static_cast<int>(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') throw ValidationError("bitstring must contain only 0/1: " + bits);
        b.value = (b.value << 1) | static_cast<std::uint32_t>(c - '0');
    }
    return b;
}

std::string Bitstring::str() const {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int a = 1; a <= n; ++a) s[static_cast<std::size_t>(a - 1)] = bit(a) ? '1' : '0';
    return s;
}

Bitstring Bitstring::complement() const {
    const std::uint32_t all = (n >= 32) ? ~0u : ((1u << n) - 1u);
    return Bitstring{n, ~value & all};
}

int Bitstring::excess() const {
    const int ones = std::popcount(value);
    return ones - (n - ones);
}

void check_register(int n, int site) {
    if (n < 1 || n > kMaxQubits)
        throw ValidationError("qubit count " + std::to_string(n) + " outside 1.." +
                              std::to_string(kMaxQubits));
    if (site != 0 && (site < 1 || site > n))
        throw ValidationError("site " + std::to_string(site) + " outside 1.." + std::to_string(n));
}

std::size_t dimension(int n) { return std::size_t{1} << n; }

Matrix pauli(Axis axis, int site, int n) {
    Local p;
    switch (axis) {
    case Axis::X: p << 0, 1, 1, 0; break;
    case Axis::Y: p << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case Axis::Z: p << 1, 0, 0, -1; break;
    }
    return embed(p, site, n);
}

Matrix ladder(int site, int n, LadderKind kind) {
    Local p = Local::Zero();
    if (kind == LadderKind::lowering) p(0, 1) = 1.0; // |0><1|
    else p(1, 0) = 1.0;
    return embed(p, site, n);
}

Matrix excitation_z(int site, int n) {
    Local p;
    p << -1, 0, 0, 1;
    return embed(p, site, n);
}

Matrix identity(int n) {
    check_register(n);
    return Matrix::Identity(dimension(n), dimension(n));
}

StateKind parse_state_kind(const std::string& name) {
    if (name == "ground") return StateKind::ground;
    if (name == "inverted") return StateKind::inverted;
    if (name == "plus_all") return StateKind::plus_all;
    if (name == "ghz") return StateKind::ghz;
    if (name == "basis") return StateKind::basis;
    throw ValidationError("unknown initial state '" + name + "'");
}

std::string state_kind_name(StateKind k) {
    switch (k) {
    case StateKind::ground: return "ground";
    case StateKind::inverted: return "inverted";
    case StateKind::plus_all: return "plus_all";
    case StateKind::ghz: return "ghz";
    case StateKind::basis: return "basis";
    }
    return "?";
}

Matrix initial_state(StateKind kind, int n, std::uint32_t basis_value) {
    check_register(n);
    const std::size_t dim = dimension(n);
    Matrix rho = Matrix::Zero(dim, dim);
    switch (kind) {
    case StateKind::ground: rho(0, 0) = 1.0; break;
    case StateKind::inverted: rho(dim - 1, dim - 1) = 1.0; break;
    case StateKind::plus_all: rho.setConstant(1.0 / static_cast<double>(dim)); break;
    case StateKind::ghz:
        rho(0, 0) = rho(0, dim - 1) = rho(dim - 1, 0) = rho(dim - 1, dim - 1) = 0.5;
        break;
    case StateKind::basis:
        if (basis_value >= dim) throw ValidationError("basis state index out of range");
        rho(basis_value, basis_value) = 1.0;
        break;
    }
    return rho;
}

double hermiticity_error(const Matrix& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

int qubits_of(const Matrix& rho) {
    const auto dim = static_cast<std::size_t>(rho.rows());
    if (rho.rows() != rho.cols() || dim < 2 || !std::has_single_bit(dim))
        throw ValidationError("density matrix must be square with power-of-two dimension");
    const int n = std::countr_zero(dim);
    check_register(n);
    return n;
}

void validate_density(const Matrix& rho) {
    qubits_of(rho);
    if (std::abs(rho.trace() - 1.0) >= 1e-10) throw ValidationError("density matrix trace differs from 1");
    if (hermiticity_error(rho) >= 1e-12) throw ValidationError("density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(rho), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8) throw ValidationError("density matrix is not positive");
}

cplx anti_diagonal_element(const Matrix& rho, const Bitstring& l) {
    if (qubits_of(rho) != l.n) throw ValidationError("bitstring length does not match register size");
    return rho(l.complement().value, l.value);
}

std::map<int, cplx> cluster_by_excess(const Matrix& rho) {
    const int n = qubits_of(rho);
    std::map<int, cplx> out;
    for (int k = -n; k <= n; k += 2) out[k] = 0.0;
    const auto dim = static_cast<std::uint32_t>(dimension(n));
    for (std::uint32_t v = 0; v < dim; ++v) {
        const Bitstring l{n, v};
        out[l.excess()] += rho(l.complement().value, v);
    }
    return out;
}

} // namespace corrnoise
