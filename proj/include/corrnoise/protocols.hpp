// protocols.hpp — parity-oscillation and multiple-quantum-coherence protocols
//
// Gates are ideal and instantaneous; noise acts only while the register idles.
#pragma once

#include "corrnoise/dynamics.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace corrnoise {

using Matrix2 = Eigen::Matrix2cd;

// (1/sqrt 2)[1 + i offdiag(e^{-i phi}, e^{+i phi})]
Matrix2 parity_gate(double phi);
// U^{(x)N} rho U^{(x)N}+ for a single-qubit gate applied to every site.
Matrix apply_local_gate(const Matrix& rho, const Matrix2& u);

// phi_x = 2 pi x / (2N+1) + pi/2, x = 0..2N
std::vector<double> parity_angles(int n);
// phi_x = -4 pi x / (2N+1)
std::vector<double> mqc_angles(int n);

double parity_signal(const Matrix& rho, double phi);

struct ParityTrace {
    int n = 0;
    std::vector<double> phis;
    std::vector<double> values;
    std::uint64_t shots = 0; // 0 = exact expectation
    std::uint64_t seed = 0;
};

ParityTrace parity_trace(const Matrix& rho);
ParityTrace parity_trace_sampled(const Matrix& rho, std::uint64_t shots, std::uint64_t seed,
                                 std::uint64_t stream = 0);
std::map<int, cplx> parity_extract(const ParityTrace& trace);

// Seeded deterministic estimate (#even - #odd)/shots from the post-gate populations.
double sample_parity(const Matrix& rho, double phi, std::uint64_t shots, std::uint64_t seed);

// Independent, reproducible seed for a (stream, index) pair under a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

enum class MqcMode { overlap_exact, echo_protocol };
MqcMode parse_mqc_mode(const std::string& name);
std::string mqc_mode_name(MqcMode m);

// Hadamard on qubit 1 followed by a CNOT ladder 1->2->...->N.
Matrix ghz_preparation(int n);

double mqc_signal(const Matrix& rho, double phi);
// Echo variant: population of |0...0> after rotating and undoing `prep`.
double mqc_echo_signal(const Matrix& rho, double phi, const Matrix& prep);

struct MqcTrace {
    int n = 0;
    std::vector<double> phis;
    std::vector<double> values;
    MqcMode mode = MqcMode::overlap_exact;
};
MqcTrace mqc_trace(const Matrix& rho, MqcMode mode = MqcMode::overlap_exact, const Matrix* prep = nullptr);
std::map<int, double> mqc_extract(const MqcTrace& trace);
// Direct tr(rho_q rho_{-q}) from the coherence-order blocks of rho.
std::map<int, double> coherence_intensities(const Matrix& rho);

enum class ProtocolKind { none, parity, mqc };
ProtocolKind parse_protocol_kind(const std::string& name);
std::string protocol_kind_name(ProtocolKind k);

struct ProtocolSpec {
    ProtocolKind kind = ProtocolKind::parity;
    std::vector<double> idle_times;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    MqcMode mode = MqcMode::overlap_exact;
};

struct ProtocolPoint {
    double idle_time = 0.0;
    ParityTrace parity;
    std::map<int, cplx> rho_k;
    MqcTrace mqc;
    std::map<int, double> intensities;
};

struct ProtocolResult {
    std::vector<ProtocolPoint> points;
    Trajectory trajectory;
};

// Idle times must be multiples of dt_out; one trajectory serves all of them.
ProtocolResult run_protocol(const GeneratorContext& ctx, const Matrix& rho0, const ProtocolSpec& spec,
                            double dt_out, const EvolveOptions& opt = {});
// Synthesises traces for an already evolved trajectory.
ProtocolResult run_protocol_on(const Trajectory& tr, const ProtocolSpec& spec, int n);

struct ShotNoiseFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> shots, std_errors;
};
// Regresses log(standard deviation of repeated estimates) on log(shots).
ShotNoiseFit shot_noise_scaling(const Matrix& rho, double phi, const std::vector<std::uint64_t>& shots,
                                int repeats, std::uint64_t seed);

} // namespace corrnoise
