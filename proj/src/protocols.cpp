// protocols.cpp — gate application, signal synthesis, DFT extraction, sampling

#include "corrnoise/protocols.hpp"

#include "corrnoise/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace corrnoise {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// xoshiro256** seeded through splitmix64
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        for (auto& w : s_) w = seed = splitmix64(seed);
    }
    std::uint64_t next() {
        const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t s_[4];
};

inline int parity_sign(std::size_t i) { return (std::popcount(i) % 2 == 0) ? 1 : -1; }

void check_grid(const std::vector<double>& got, const std::vector<double>& want, const char* what) {
    if (got.size() != want.size())
        throw ValidationError(std::string(what) + " trace must have exactly 2N+1 samples");
    for (std::size_t i = 0; i < got.size(); ++i)
        if (std::abs(got[i] - want[i]) > 1e-12 * std::max(1.0, std::abs(want[i])))
            throw ValidationError(std::string(what) + " trace is not on the canonical angle grid");
}

std::vector<double> populations(const Matrix& rho) {
    std::vector<double> p(static_cast<std::size_t>(rho.rows()));
    double total = 0.0;
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        p[i] = std::max(0.0, rho(i, i).real());
        total += rho(i, i).real();
    }
    if (std::abs(total - 1.0) > 1e-9) throw NumericalError("measurement probabilities do not sum to 1");
    return p;
}

double sample_populations(const std::vector<double>& p, std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) throw ValidationError("shots must be >= 1");
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) cdf[i] = acc += p[i];
    Rng rng(seed);
    long long even_minus_odd = 0;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        even_minus_odd += parity_sign(static_cast<std::size_t>(it - cdf.begin()));
    }
    return static_cast<double>(even_minus_odd) / static_cast<double>(shots);
}

} // namespace

Matrix2 parity_gate(double phi) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    Matrix2 u;
    u << s, s * i * std::polar(1.0, -phi), s * i * std::polar(1.0, phi), s;
    return u;
}

Matrix apply_local_gate(const Matrix& rho, const Matrix2& u) {
    const int n = qubits_of(rho);
    const std::size_t dim = dimension(n);
    Matrix out = rho;
    for (int a = 0; a < n; ++a) {
        const std::size_t m = std::size_t{1} << (n - 1 - a);
        for (std::size_t i = 0; i < dim; ++i) {
            if (i & m) continue;
            for (std::size_t j = 0; j < dim; ++j) {
                const cplx lo = out(i, j), hi = out(i | m, j);
                out(i, j) = u(0, 0) * lo + u(0, 1) * hi;
                out(i | m, j) = u(1, 0) * lo + u(1, 1) * hi;
            }
        }
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                if (j & m) continue;
                const cplx lo = out(i, j), hi = out(i, j | m);
                out(i, j) = lo * std::conj(u(0, 0)) + hi * std::conj(u(0, 1));
                out(i, j | m) = lo * std::conj(u(1, 0)) + hi * std::conj(u(1, 1));
            }
        }
    }
    return out;
}

std::vector<double> parity_angles(int n) {
    check_register(n);
    const int m = 2 * n + 1;
    std::vector<double> phis(static_cast<std::size_t>(m));
    for (int x = 0; x < m; ++x) phis[x] = 2.0 * kPi * x / m + kPi / 2.0;
    return phis;
}

std::vector<double> mqc_angles(int n) {
    check_register(n);
    const int m = 2 * n + 1;
    std::vector<double> phis(static_cast<std::size_t>(m));
    for (int x = 0; x < m; ++x) phis[x] = -4.0 * kPi * x / m;
    return phis;
}

double parity_signal(const Matrix& rho, double phi) {
    const Matrix r = apply_local_gate(rho, parity_gate(phi));
    double p = 0.0;
    for (Eigen::Index i = 0; i < r.rows(); ++i) p += parity_sign(static_cast<std::size_t>(i)) * r(i, i).real();
    return p;
}

ParityTrace parity_trace(const Matrix& rho) {
    ParityTrace tr;
    tr.n = qubits_of(rho);
    tr.phis = parity_angles(tr.n);
    for (double phi : tr.phis) tr.values.push_back(parity_signal(rho, phi));
    return tr;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

double sample_parity(const Matrix& rho, double phi, std::uint64_t shots, std::uint64_t seed) {
    return sample_populations(populations(apply_local_gate(rho, parity_gate(phi))), shots, seed);
}

ParityTrace parity_trace_sampled(const Matrix& rho, std::uint64_t shots, std::uint64_t seed,
                                 std::uint64_t stream) {
    ParityTrace tr;
    tr.n = qubits_of(rho);
    tr.phis = parity_angles(tr.n);
    tr.shots = shots;
    tr.seed = seed;
    for (std::size_t x = 0; x < tr.phis.size(); ++x)
        tr.values.push_back(sample_parity(rho, tr.phis[x], shots, derive_seed(seed, stream, x)));
    return tr;
}

std::map<int, cplx> parity_extract(const ParityTrace& trace) {
    check_register(trace.n);
    check_grid(trace.phis, parity_angles(trace.n), "parity");
    if (trace.values.size() != trace.phis.size()) throw ValidationError("parity trace values/angles mismatch");
    const int m = 2 * trace.n + 1;
    std::map<int, cplx> out;
    for (int k = -trace.n; k <= trace.n; k += 2) {
        cplx s = 0.0;
        for (int x = 0; x < m; ++x)
            s += std::polar(1.0, -2.0 * kPi * static_cast<double>((static_cast<long>(k) * x) % m) / m) *
                 trace.values[x];
        out[k] = s / static_cast<double>(m);
    }
    return out;
}

MqcMode parse_mqc_mode(const std::string& name) {
    if (name == "overlap_exact") return MqcMode::overlap_exact;
    if (name == "echo_protocol") return MqcMode::echo_protocol;
    throw ValidationError("unknown MQC mode '" + name + "'");
}

std::string mqc_mode_name(MqcMode m) { return m == MqcMode::overlap_exact ? "overlap_exact" : "echo_protocol"; }

Matrix ghz_preparation(int n) {
    check_register(n);
    const std::size_t dim = dimension(n);
    // Columns are images of basis states: H on qubit 1 (MSB), then CNOT(a -> a+1).
    Matrix v = Matrix::Zero(dim, dim);
    const double s = 1.0 / std::sqrt(2.0);
    const std::size_t msb = std::size_t{1} << (n - 1);
    for (std::size_t k = 0; k < dim; ++k) {
        const bool top = (k & msb) != 0;
        for (int branch = 0; branch < 2; ++branch) {
            std::size_t state = branch ? (k | msb) : (k & ~msb);
            const double amp = (top && branch) ? -s : s;
            for (int a = 1; a < n; ++a) {
                const std::size_t ctrl = std::size_t{1} << (n - a);
                const std::size_t targ = std::size_t{1} << (n - a - 1);
                if (state & ctrl) state ^= targ;
            }
            v(state, k) += amp;
        }
    }
    return v;
}

namespace {

// RZ^{(x)N}(phi) rho RZ^{(x)N}(-phi): entry (i,j) picks up exp(i phi (ones(i) - ones(j))).
Matrix rotate_z(const Matrix& rho, double phi) {
    Matrix r = rho;
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            const int q = std::popcount(static_cast<std::size_t>(i)) - std::popcount(static_cast<std::size_t>(j));
            if (q != 0) r(i, j) *= std::polar(1.0, phi * q);
        }
    return r;
}

} // namespace

double mqc_signal(const Matrix& rho, double phi) {
    qubits_of(rho);
    const Matrix r = rotate_z(rho, phi);
    // tr(rho r) = sum_ij rho_ji r_ij
    return (rho.transpose().cwiseProduct(r)).sum().real();
}

double mqc_echo_signal(const Matrix& rho, double phi, const Matrix& prep) {
    if (prep.rows() != rho.rows() || prep.cols() != rho.cols())
        throw ValidationError("echo protocol needs a preparation unitary of matching size");
    const Matrix r = rotate_z(rho, phi);
    const Matrix back = prep.adjoint() * r * prep;
    return back(0, 0).real();
}

MqcTrace mqc_trace(const Matrix& rho, MqcMode mode, const Matrix* prep) {
    MqcTrace tr;
    tr.n = qubits_of(rho);
    tr.mode = mode;
    tr.phis = mqc_angles(tr.n);
    if (mode == MqcMode::echo_protocol && !prep)
        throw ValidationError("echo protocol requires a preparation circuit");
    for (double phi : tr.phis)
        tr.values.push_back(mode == MqcMode::overlap_exact ? mqc_signal(rho, phi) : mqc_echo_signal(rho, phi, *prep));
    return tr;
}

std::map<int, double> mqc_extract(const MqcTrace& trace) {
    check_register(trace.n);
    check_grid(trace.phis, mqc_angles(trace.n), "MQC");
    if (trace.values.size() != trace.phis.size()) throw ValidationError("MQC trace values/angles mismatch");
    const int m = 2 * trace.n + 1;
    std::map<int, double> out;
    for (int q = -trace.n; q <= trace.n; ++q) {
        // S(phi_x) = sum_q exp(-i 2 pi (2q) x / m) I_q, so I_q sits in bin 2q mod m
        const long bin = ((2L * q) % m + m) % m;
        cplx s = 0.0;
        for (int x = 0; x < m; ++x)
            s += std::polar(1.0, 2.0 * kPi * static_cast<double>((bin * x) % m) / m) * trace.values[x];
        out[q] = s.real() / static_cast<double>(m);
    }
    return out;
}

std::map<int, double> coherence_intensities(const Matrix& rho) {
    const int n = qubits_of(rho);
    const std::size_t dim = dimension(n);
    // rho_q = sum_m P_m rho P_{m-q}, with P_m the projector on m excitations
    std::vector<Matrix> blocks;
    std::map<int, double> out;
    for (int q = -n; q <= n; ++q) {
        Matrix rq = Matrix::Zero(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                if (std::popcount(i) - std::popcount(j) == q) rq(i, j) = rho(i, j);
        blocks.push_back(std::move(rq));
    }
    for (int q = -n; q <= n; ++q)
        out[q] = (blocks[q + n] * blocks[-q + n]).trace().real();
    return out;
}

ProtocolKind parse_protocol_kind(const std::string& name) {
    if (name == "none") return ProtocolKind::none;
    if (name == "parity") return ProtocolKind::parity;
    if (name == "mqc") return ProtocolKind::mqc;
    throw ValidationError("unknown protocol kind '" + name + "'");
}

std::string protocol_kind_name(ProtocolKind k) {
    switch (k) {
    case ProtocolKind::none: return "none";
    case ProtocolKind::parity: return "parity";
    case ProtocolKind::mqc: return "mqc";
    }
    return "?";
}

ProtocolResult run_protocol_on(const Trajectory& tr, const ProtocolSpec& spec, int n) {
    ProtocolResult res;
    const Matrix prep = spec.kind == ProtocolKind::mqc && spec.mode == MqcMode::echo_protocol
                            ? ghz_preparation(n)
                            : Matrix();
    for (std::size_t idx = 0; idx < spec.idle_times.size(); ++idx) {
        const double t = spec.idle_times[idx];
        auto it = std::find_if(tr.times.begin(), tr.times.end(), [&](double x) {
            return std::abs(x - t) <= 1e-9 * std::max(1.0, std::abs(t));
        });
        if (it == tr.times.end())
            throw ValidationError("idle time " + std::to_string(t) + " is not a recorded output time");
        const Matrix& rho = tr.states[static_cast<std::size_t>(it - tr.times.begin())];
        ProtocolPoint p;
        p.idle_time = t;
        if (spec.kind == ProtocolKind::parity) {
            p.parity = spec.shots == 0 ? parity_trace(rho) : parity_trace_sampled(rho, spec.shots, spec.seed, idx);
            p.rho_k = parity_extract(p.parity);
        } else if (spec.kind == ProtocolKind::mqc) {
            p.mqc = mqc_trace(rho, spec.mode, spec.mode == MqcMode::echo_protocol ? &prep : nullptr);
            p.intensities = mqc_extract(p.mqc);
        }
        res.points.push_back(std::move(p));
    }
    return res;
}

ProtocolResult run_protocol(const GeneratorContext& ctx, const Matrix& rho0, const ProtocolSpec& spec,
                            double dt_out, const EvolveOptions& opt) {
    if (spec.idle_times.empty()) throw ValidationError("protocol needs at least one idle time");
    double t_end = 0.0;
    for (double t : spec.idle_times) {
        if (t < 0.0) throw ValidationError("idle times must be >= 0");
        const double r = t / dt_out;
        if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
            throw ValidationError("idle times must be multiples of dt_out");
        t_end = std::max(t_end, t);
    }
    Trajectory tr = evolve(ctx, rho0, t_end, dt_out, opt);
    ProtocolResult res = run_protocol_on(tr, spec, ctx.reg.n);
    res.trajectory = std::move(tr);
    return res;
}

ShotNoiseFit shot_noise_scaling(const Matrix& rho, double phi, const std::vector<std::uint64_t>& shots,
                                int repeats, std::uint64_t seed) {
    if (shots.size() < 2 || repeats < 2) throw ValidationError("shot-noise fit needs >= 2 shot counts and repeats");
    const auto p = populations(apply_local_gate(rho, parity_gate(phi)));
    ShotNoiseFit fit;
    std::vector<double> lx, ly;
    for (std::size_t s = 0; s < shots.size(); ++s) {
        double mean = 0.0, m2 = 0.0;
        for (int r = 0; r < repeats; ++r) {
            const double v = sample_populations(p, shots[s], derive_seed(seed, s, static_cast<std::uint64_t>(r)));
            const double d = v - mean;
            mean += d / (r + 1);
            m2 += d * (v - mean);
        }
        const double sd = std::sqrt(m2 / (repeats - 1));
        fit.shots.push_back(static_cast<double>(shots[s]));
        fit.std_errors.push_back(sd);
        lx.push_back(std::log(static_cast<double>(shots[s])));
        ly.push_back(std::log(sd));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

} // namespace corrnoise
