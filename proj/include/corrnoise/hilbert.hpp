// hilbert.hpp — dense N-qubit operators, bitstrings and standard states
//
// Basis convention: |l> with l a big-endian bitstring, qubit 1 is the most
// significant bit. pauli() returns textbook matrices (Z|0> = |0>, Z|1> = -|1>).
// The excited state is |1>; lowering() = |0><1| removes one quantum, and
// excitation_z() = raising*lowering - lowering*raising is the "energy" Z that
// reads +1 on |1>. Energy, intensity and the Z columns of every output use
// excitation_z() so the fully inverted register has maximal energy.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <string>

namespace corrnoise {

using cplx = std::complex<double>;
using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

inline constexpr int kMaxQubits = 12;

enum class Axis { X, Y, Z };
enum class LadderKind { raising, lowering };

struct Bitstring {
    int n = 0;
    std::uint32_t value = 0;

    static Bitstring parse(const std::string& bits); // "0110", qubit 1 first
    std::string str() const;
    int bit(int site) const { return static_cast<int>((value >> (n - site)) & 1u); }
    Bitstring complement() const;
    int excess() const; // (#1s - #0s)
    bool operator==(const Bitstring& o) const { return n == o.n && value == o.value; }
};

// Checks 1 <= site <= n <= kMaxQubits (site may be 0 to check n only).
void check_register(int n, int site = 0);
std::size_t dimension(int n);

Matrix pauli(Axis axis, int site, int n);
Matrix ladder(int site, int n, LadderKind kind);
Matrix excitation_z(int site, int n);
Matrix identity(int n);

enum class StateKind { ground, inverted, plus_all, ghz, basis };
StateKind parse_state_kind(const std::string& name);
std::string state_kind_name(StateKind k);

Matrix initial_state(StateKind kind, int n, std::uint32_t basis_value = 0);

double hermiticity_error(const Matrix& a);
// Throws ValidationError unless rho is a valid initial density matrix.
void validate_density(const Matrix& rho);
int qubits_of(const Matrix& rho);

cplx anti_diagonal_element(const Matrix& rho, const Bitstring& l);
std::map<int, cplx> cluster_by_excess(const Matrix& rho);

} // namespace corrnoise
