// dynamics.hpp — TCL2 generator assembly and time integration
#pragma once

#include "corrnoise/hilbert.hpp"
#include "corrnoise/rate_table.hpp"


#include <memory>
#include <vector>

namespace corrnoise {

struct GeneratorOptions {
    bool include_nonsecular = true;        // (1,1)/(2,2) rate terms and J3 exchange pieces
    bool include_lamb_hamiltonians = true; // H_XY and H_ZZ
};

struct GeneratorContext {
    RegisterConfig reg;
    std::shared_ptr<const RateTable> table;
    GeneratorOptions options;

    bool has(Coupling c) const;
};

enum class ChannelFilter { all, transverse, longitudinal };

// The generator at one instant, reduced to a handful of dense arrays so
// repeated application (RK stages, intensity breakdowns) does no further
// coefficient work:
//   D[rho] = L rho + rho R + sum_a T_a(rho) Y_a + G o rho
// with L = -iH - M/2 and R = +iH - M/2 built separately (not as adjoints of
// each other), the jump operators folded into per-site row mixes T_a, and
// the diagonal dephasing action as an elementwise factor G.
class PreparedGenerator {
public:
    PreparedGenerator(const CoefficientSet& coeffs, int n, const GeneratorOptions& opt,
                      ChannelFilter filter = ChannelFilter::all);
    // Restrict to a single channel of the set.
    PreparedGenerator(const CoefficientSet& coeffs, std::size_t channel, int n,
                      const GeneratorOptions& opt);

    void apply(const Matrix& rho, Matrix& out) const; // out = D[rho]
    Matrix operator()(const Matrix& rho) const;
    // One entry of D[rho] without forming the full product.
    cplx entry(const Matrix& rho, std::size_t i, std::size_t j) const;

    bool has_relaxation() const { return relax_; }
    bool has_dephasing() const { return dephase_; }
    const Matrix& left() const { return L_; }
    const Matrix& right() const { return R_; }
    // Summed jump rates gamma^{(ij)}, 0-based (alpha, beta).
    const Eigen::MatrixXcd& jump_rates(int i, int j) const;
    const Matrix& dephasing_factor() const { return G_; }

private:
    void init(int n);
    void add_channel(const ChannelCoefficients& c, const GeneratorOptions& opt);
    void finalize();

    int n_ = 0;
    std::size_t dim_ = 0;
    bool relax_ = false, dephase_ = false;
    Matrix L_, R_, G_;
    // L and R^T in compressed-row form for the products in apply()
    std::vector<int> L_rows_, L_cols_, RT_rows_, RT_cols_;
    std::vector<cplx> L_vals_, RT_vals_;
    Eigen::MatrixXcd g12_, g21_, g11_, g22_, H1_, H2_, H3_;
    Eigen::MatrixXcd gphi_, jzz_;
};

Matrix relaxation_dissipator(const GeneratorContext& ctx, const Matrix& rho, double t);
Matrix dephasing_dissipator(const GeneratorContext& ctx, const Matrix& rho, double t);
Matrix full_generator(const GeneratorContext& ctx, const Matrix& rho, double t);

struct EvolveOptions {
    double step = 0.0;        // internal RK4 step; 0 picks default_step()
    double tolerance = 1e-8;  // max-norm change allowed when halving the step
    int max_halvings = 6;
    bool verify = true;       // run the halved-step comparison
    // Steps inside the rate table's fine head (bath memory time) are divided
    // by this factor; the coefficients change fastest there.
    int startup_refinement = 16;
    bool record_min_eigenvalue = true;
    int threads = 1;          // generator preparation and the two verification runs
};

// Largest divisor of dt_out not above min(1, 0.5 / Omega), Omega being the
// fastest phase factor of the generator; the halving check still decides.
double default_step(const GeneratorContext& ctx, double dt_out);

struct EvolveStats {
    double step = 0.0;            // step of the recorded (finer) run
    int halvings = 0;
    double halving_change = 0.0;  // max-norm difference between step and step/2 runs
    std::size_t generator_calls = 0;
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
    std::vector<double> min_eigenvalues;
    EvolveStats stats;
};

Trajectory evolve(const GeneratorContext& ctx, const Matrix& rho0, double t_max, double dt_out,
                  const EvolveOptions& opt = {});

struct AntidiagonalRhs {
    cplx total;
    cplx dephasing;     // -2 rho sum (-1)^{l_a + l_b} gamma_phi
    cplx local_damping; // -1/2 sum (gamma_up + gamma_down) rho
    cplx lamb_shift;    // diagonal H_XY energy difference
    cplx source;        // couplings to other elements (nonsecular and exchange)
};

AntidiagonalRhs antidiagonal_ode_rhs(const GeneratorContext& ctx, const Matrix& rho, double t,
                                     const Bitstring& l);

// Integral over [0, t] of -1/2 sum (gamma_up + gamma_down)_aa - 2 sum gamma_phi_ab
// by the trapezoid rule on the rate grid. The pieces are available separately.
struct DecoherenceExponent {
    double total = 0.0;
    double relaxation = 0.0;
    double dephasing = 0.0;
};
DecoherenceExponent decoherence_exponent(const GeneratorContext& ctx, double t);
double superdecoherence_exponent(const GeneratorContext& ctx, double t);

} // namespace corrnoise
