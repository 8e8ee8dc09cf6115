// spectra.hpp — noise spectra, spatial correlation and dissipator coefficients
//
// All frequencies and rates are in units of the mean qubit frequency (hbar = 1).
// Qubit indices in this interface are 1-based.
#pragma once

#include "corrnoise/hilbert.hpp"

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace corrnoise {

enum class SpectrumKind { ohmic, one_over_f, white, tabulated };

struct SpectrumModel {
    SpectrumKind kind = SpectrumKind::ohmic;
    double strength = 0.0;  // lambda, lambda_phi or S0
    double cutoff = 1.0;    // ohmic high-frequency cutoff
    double ir_cutoff = 1e-6; // 1/f plateau edge
    std::vector<std::pair<double, double>> table; // (omega, S), strictly increasing omega

    static SpectrumModel ohmic(double lambda, double cutoff);
    static SpectrumModel one_over_f(double lambda, double ir_cutoff);
    static SpectrumModel white(double s0);
    static SpectrumModel tabulated(std::vector<std::pair<double, double>> samples);

    void validate() const;
    double operator()(double omega) const;
    bool is_zero() const;
};

SpectrumKind parse_spectrum_kind(const std::string& name);
std::string spectrum_kind_name(SpectrumKind k);

// Two-column "omega S" text with '#' comments.
std::vector<std::pair<double, double>> read_spectrum_table(const std::string& path);

double spectrum_value(const SpectrumModel& model, double omega);

enum class CorrelationKind { full, diagonal, window, custom };
CorrelationKind parse_correlation_kind(const std::string& name);
std::string correlation_kind_name(CorrelationKind k);

struct CorrelationMatrix {
    CorrelationKind kind = CorrelationKind::full;
    int range = 0;
    Eigen::MatrixXd xi; // N x N, real symmetric, unit diagonal
    double theta = 0.0;

    static CorrelationMatrix full(int n, double theta = 0.0);
    static CorrelationMatrix diagonal(int n);
    static CorrelationMatrix window(int n, int r, double theta = 0.0);
    static CorrelationMatrix custom(const Eigen::MatrixXd& xi, double theta = 0.0);

    void validate() const;
    // Spatial factor c_ab of S_ab(omega) = c_ab S(omega); 0-based indices.
    cplx factor(int a, int b) const;
    int size() const { return static_cast<int>(xi.rows()); }
};

enum class Coupling { transverse, longitudinal };
Coupling parse_coupling(const std::string& name);
std::string coupling_name(Coupling c);

struct NoiseChannel {
    Coupling coupling = Coupling::transverse;
    SpectrumModel spectrum;
    CorrelationMatrix correlation;
    void validate(int n) const;
};

struct RegisterConfig {
    int n = 1;
    std::vector<double> frequencies;

    static RegisterConfig uniform(int n, double omega0 = 1.0);
    void validate() const;
    bool is_uniform(double tol = 1e-15) const;
};

cplx filter_function(double omega, double t);

struct QuadratureOptions {
    double rel_tol = 1e-12;
    int max_depth = 64;
    // Split every accepted panel once more (self-convergence checks).
    bool split_all = false;
};

// Phi(nu, t) = (1/2pi) * integral S(w) F(w + nu, t) dw for a real base spectrum.
// Equivalently the integral over [0, t] of exp(-i nu s) C(s) ds, C being the
// bath correlation function. Panels are built once; each t costs one pass
// over them, independent of how oscillatory the integrand is.
class FilterIntegral {
public:
    FilterIntegral(const SpectrumModel& model, double nu, const QuadratureOptions& opt = {});
    FilterIntegral(const FilterIntegral&);
    FilterIntegral& operator=(const FilterIntegral&);
    FilterIntegral(FilterIntegral&&) noexcept;
    FilterIntegral& operator=(FilterIntegral&&) noexcept;
    ~FilterIntegral();

    cplx operator()(double t) const;
    double nu() const;
    std::size_t panel_count() const;
    // Sum over panels of the truncated Legendre tail, a bound on the
    // discretisation error of the smooth part.
    double error_estimate() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct RelaxationRates {
    cplx g12, g21, g11;
};

struct RelaxationHamiltonian {
    cplx J1, J2, J3;
    double JXX, JYY, JXY, D;
};

RelaxationRates relaxation_rates(const NoiseChannel& ch, const std::vector<double>& freqs,
                                 int alpha, int beta, double t,
                                 const QuadratureOptions& opt = {});
cplx dephasing_rate(const NoiseChannel& ch, int alpha, int beta, double t,
                    const QuadratureOptions& opt = {});
RelaxationHamiltonian hamiltonian_coeffs(const NoiseChannel& ch, const std::vector<double>& freqs,
                                         int alpha, int beta, double t,
                                         const QuadratureOptions& opt = {});
cplx zz_coupling(const NoiseChannel& ch, int alpha, int beta, double t,
                 const QuadratureOptions& opt = {});
cplx q_factor(const NoiseChannel& ch, const std::vector<double>& freqs, int alpha, int beta,
              double t, bool markovian, const QuadratureOptions& opt = {});

// Pauli-form combinations of the exchange couplings.
RelaxationHamiltonian pauli_form(cplx J1, cplx J2, cplx J3);

// Coefficients from base integrals; shared by the direct operations above and
// by the rate table so both routes use identical algebra.
namespace coeff {
struct PhiPair {
    cplx plus;  // Phi(+omega, t)
    cplx minus; // Phi(-omega, t)
};
// (gamma12, gamma21, gamma11) for sites a, b given Phi at their frequencies.
RelaxationRates rates(cplx c, double wa, double wb, const PhiPair& pa, const PhiPair& pb, double t);
// (J1, J2, J3)
void exchange(cplx c, double wa, double wb, const PhiPair& pa, const PhiPair& pb, double t,
              cplx& J1, cplx& J2, cplx& J3);
} // namespace coeff

} // namespace corrnoise
