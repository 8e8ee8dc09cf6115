// observables.hpp — energy, emitted intensity and its local/correlated split
#pragma once

#include "corrnoise/dynamics.hpp"

#include <vector>

namespace corrnoise {

// <Z_a> in the excitation convention (+1 on |1>), one entry per qubit.
std::vector<double> z_expectations(const Matrix& rho);
// <P_a^{r1} P_b^{r2}> with P^{true} = raising, P^{false} = lowering (0-based sites).
cplx pair_expectation(const Matrix& rho, bool raise_a, int a, bool raise_b, int b);

double total_energy(const Matrix& rho, const RegisterConfig& reg);

struct IntensityBreakdown {
    double total = 0.0;
    std::vector<double> per_channel;
};
IntensityBreakdown intensity_from_generator(const GeneratorContext& ctx, const Matrix& rho, double t);

// Exact single-qubit emission minus absorption from the diagonal rates,
// sum_a w_a [gamma_down_aa <n_a> - gamma_up_aa <1 - n_a>].
double local_emission(const GeneratorContext& ctx, const Matrix& rho, double t);

// The T1 approximation sum_a w_a <n_a> / T1_a.
double local_intensity(const Matrix& rho, const RegisterConfig& reg, const std::vector<double>& t1);

std::vector<double> intensity_from_finite_difference(const std::vector<double>& times,
                                                     const std::vector<double>& W);

struct PartialIntensity {
    double dissipative = 0.0; // Re 2 w0 sum_{a<=k, b!=a} Q_ab <Pi+_a Pi_b>
    double nonsecular = 0.0;  // 2 w0 sum_{a<=k, b!=a} 2 Re(i J3_ab <Pi+_a Pi+_b>)
    double total() const { return dissipative + nonsecular; }
};
PartialIntensity correlated_partial_intensity(const GeneratorContext& ctx, const Matrix& rho, double t,
                                              int k);

struct T1Fit {
    double t1 = 0.0;
    double residual = 0.0; // rms residual of the log-population fit
};
T1Fit extract_t1(const std::vector<double>& times, const std::vector<double>& population);

struct IntensityTrace {
    std::vector<double> times, W, I_total, I_local, I_corr, min_eig;
    std::vector<std::vector<double>> I_corr_partial; // [k-1][sample]; empty when not uniform
    std::vector<std::vector<double>> I_ns_partial;
    std::vector<std::vector<double>> zexp; // [alpha-1][sample]
};
IntensityTrace intensity_trace(const GeneratorContext& ctx, const Trajectory& tr, bool partial = true);

} // namespace corrnoise
