// dynamics.cpp — generator application, RK4 integration, anti-diagonal analysis

#include "corrnoise/dynamics.hpp"

#include "corrnoise/errors.hpp"
#include "corrnoise/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <thread>

namespace corrnoise {

namespace {

// Lowering |0><1| and raising |1><0| acting on a basis index.
inline std::optional<std::uint32_t> ladder_on(bool raise, std::uint32_t mask, std::uint32_t k) {
    const bool set = (k & mask) != 0;
    if (raise) return set ? std::nullopt : std::optional<std::uint32_t>(k | mask);
    return set ? std::optional<std::uint32_t>(k ^ mask) : std::nullopt;
}

// X += coef * P_a Q_b, where P, Q are raising (true) or lowering (false).
void add_pair(Matrix& X, cplx coef, bool raise_a, std::uint32_t ma, bool raise_b, std::uint32_t mb) {
    if (coef == 0.0) return;
    const auto dim = static_cast<std::uint32_t>(X.rows());
    for (std::uint32_t k = 0; k < dim; ++k) {
        const auto k1 = ladder_on(raise_b, mb, k);
        if (!k1) continue;
        const auto k2 = ladder_on(raise_a, ma, *k1);
        if (!k2) continue;
        X(*k2, k) += coef;
    }
}

inline std::uint32_t site_mask(int n, int a) { return 1u << (n - 1 - a); }

void to_csr(const Matrix& m, std::vector<int>& rows, std::vector<int>& cols, std::vector<cplx>& vals) {
    rows.assign(1, 0);
    cols.clear();
    vals.clear();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) == 0.0) continue;
            cols.push_back(static_cast<int>(j));
            vals.push_back(m(i, j));
        }
        rows.push_back(static_cast<int>(cols.size()));
    }
}

} // namespace

bool GeneratorContext::has(Coupling c) const {
    if (!table) return false;
    for (const auto& ch : table->channels())
        if (ch.coupling == c) return true;
    return false;
}

void PreparedGenerator::init(int n) {
    n_ = n;
    dim_ = dimension(n);
    for (auto* m : {&g12_, &g21_, &g11_, &g22_, &H1_, &H2_, &H3_, &gphi_, &jzz_})
        *m = Eigen::MatrixXcd::Zero(n, n);
}

PreparedGenerator::PreparedGenerator(const CoefficientSet& coeffs, int n, const GeneratorOptions& opt,
                                     ChannelFilter filter) {
    init(n);
    for (const auto& c : coeffs.channels) {
        if (filter == ChannelFilter::transverse && c.coupling != Coupling::transverse) continue;
        if (filter == ChannelFilter::longitudinal && c.coupling != Coupling::longitudinal) continue;
        add_channel(c, opt);
    }
    finalize();
}

PreparedGenerator::PreparedGenerator(const CoefficientSet& coeffs, std::size_t channel, int n,
                                     const GeneratorOptions& opt) {
    init(n);
    if (channel >= coeffs.channels.size()) throw ValidationError("channel index out of range");
    add_channel(coeffs.channels[channel], opt);
    finalize();
}

void PreparedGenerator::add_channel(const ChannelCoefficients& c, const GeneratorOptions& opt) {
    if (c.coupling == Coupling::transverse) {
        relax_ = true;
        g12_ += c.g12;
        g21_ += c.g21;
        if (opt.include_nonsecular) {
            g11_ += c.g11;
            g22_ += c.g22;
        }
        if (opt.include_lamb_hamiltonians) {
            H1_ += c.J1;
            H2_ += c.J2;
            if (opt.include_nonsecular) H3_ += c.J3;
        }
    } else {
        dephase_ = true;
        gphi_ += c.gphi;
        if (opt.include_lamb_hamiltonians) jzz_ += c.jzz;
    }
}

void PreparedGenerator::finalize() {
    const std::size_t dim = dim_;
    if (relax_) {
        Matrix M = Matrix::Zero(dim, dim);
        Matrix H = Matrix::Zero(dim, dim);
        for (int a = 0; a < n_; ++a) {
            const auto ma = site_mask(n_, a);
            for (int b = 0; b < n_; ++b) {
                const auto mb = site_mask(n_, b);
                add_pair(M, g12_(a, b), false, ma, true, mb);
                add_pair(M, g21_(a, b), true, ma, false, mb);
                add_pair(M, g11_(a, b), true, ma, true, mb);
                add_pair(M, g22_(a, b), false, ma, false, mb);
                add_pair(H, H1_(a, b), false, ma, true, mb);
                add_pair(H, H2_(a, b), true, ma, false, mb);
                add_pair(H, H3_(a, b), true, ma, true, mb);
                add_pair(H, std::conj(H3_(a, b)), false, mb, false, ma);
            }
        }
        const cplx mi(0.0, 1.0);
        L_ = -mi * H - 0.5 * M;
        R_ = mi * H - 0.5 * M;
        to_csr(L_, L_rows_, L_cols_, L_vals_);
        to_csr(R_.transpose(), RT_rows_, RT_cols_, RT_vals_);
    }
    if (dephase_) {
        // z_a(i) = +1 when bit a of i is clear; the sign convention cancels in
        // every product below.
        auto z = [&](int a, std::size_t i) { return (i & site_mask(n_, a)) ? -1.0 : 1.0; };
        // v(b, j) = sum_a gamma_ab z_a(j)
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n_, static_cast<Eigen::Index>(dim));
        std::vector<double> h(dim, 0.0);
        for (std::size_t j = 0; j < dim; ++j) {
            for (int b = 0; b < n_; ++b) {
                cplx s = 0.0;
                for (int a = 0; a < n_; ++a) s += gphi_(a, b) * z(a, j);
                v(b, static_cast<Eigen::Index>(j)) = s;
            }
            cplx hz = 0.0;
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b) hz += jzz_(a, b) * z(a, j) * z(b, j);
            h[j] = hz.real();
        }
        auto W = [&](std::size_t i, std::size_t j) {
            cplx s = 0.0;
            for (int b = 0; b < n_; ++b) s += z(b, i) * v(b, static_cast<Eigen::Index>(j));
            return s;
        };
        std::vector<cplx> wd(dim);
        for (std::size_t i = 0; i < dim; ++i) wd[i] = W(i, i);
        G_ = Matrix(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                G_(i, j) = W(i, j) - 0.5 * wd[i] - 0.5 * wd[j] - cplx(0.0, h[i] - h[j]);
    }
}

const Eigen::MatrixXcd& PreparedGenerator::jump_rates(int i, int j) const {
    if (i == 1 && j == 2) return g12_;
    if (i == 2 && j == 1) return g21_;
    if (i == 1 && j == 1) return g11_;
    if (i == 2 && j == 2) return g22_;
    throw ValidationError("jump index pair must be (1,2), (2,1), (1,1) or (2,2)");
}

void PreparedGenerator::apply(const Matrix& rho, Matrix& out) const {
    const std::size_t dim = dim_;
    out.setZero(dim, dim);
    const auto& k = kernels::active();
    if (relax_) {
        // L rho by rows; rho R through its transpose, R^T rho^T, so that both
        // products run over the sparse operator with contiguous row updates.
        for (std::size_t i = 0; i < dim; ++i)
            for (int p = L_rows_[i]; p < L_rows_[i + 1]; ++p)
                k.caxpy(dim, L_vals_[p], rho.data() + L_cols_[p] * dim, out.data() + i * dim);
        Matrix rt = rho.transpose();
        Matrix acc = Matrix::Zero(dim, dim);
        for (std::size_t j = 0; j < dim; ++j)
            for (int p = RT_rows_[j]; p < RT_rows_[j + 1]; ++p)
                k.caxpy(dim, RT_vals_[p], rt.data() + RT_cols_[p] * dim, acc.data() + j * dim);
        out += acc.transpose();
        Matrix T(dim, dim);
        for (int a = 0; a < n_; ++a) {
            const std::uint32_t ma = site_mask(n_, a);
            // pass 0: sum_b [g12 Pi+_b + g22 Pi_b] rho, then right-multiplied by Pi_a
            // pass 1: sum_b [g21 Pi_b + g11 Pi+_b] rho, then right-multiplied by Pi+_a
            for (int pass = 0; pass < 2; ++pass) {
                T.setZero();
                bool any = false;
                for (int b = 0; b < n_; ++b) {
                    const cplx c_raise = pass == 0 ? g12_(a, b) : g11_(a, b);
                    const cplx c_lower = pass == 0 ? g22_(a, b) : g21_(a, b);
                    if (c_raise == 0.0 && c_lower == 0.0) continue;
                    any = true;
                    const std::uint32_t mb = site_mask(n_, b);
                    for (std::uint32_t l = 0; l < dim; ++l) {
                        const bool set = (l & mb) != 0;
                        const cplx c = set ? c_raise : c_lower;
                        if (c == 0.0) continue;
                        k.caxpy(dim, c, rho.data() + (l ^ mb) * dim, T.data() + l * dim);
                    }
                }
                if (!any) continue;
                // (T Pi_a)_{ij} = T_{i, j^ma} for bit a of j set; (T Pi+_a) for it clear
                const std::uint32_t want = pass == 0 ? ma : 0u;
                for (std::size_t i = 0; i < dim; ++i) {
                    const cplx* trow = T.data() + i * dim;
                    cplx* orow = out.data() + i * dim;
                    for (std::uint32_t j = 0; j < dim; ++j)
                        if ((j & ma) == want) orow[j] += trow[j ^ ma];
                }
            }
        }
    }
    if (dephase_) k.cmul_acc(dim * dim, G_.data(), rho.data(), out.data());
}

Matrix PreparedGenerator::operator()(const Matrix& rho) const {
    Matrix out;
    apply(rho, out);
    return out;
}

cplx PreparedGenerator::entry(const Matrix& rho, std::size_t i, std::size_t j) const {
    cplx val = 0.0;
    if (relax_) {
        for (std::size_t m = 0; m < dim_; ++m) val += L_(i, m) * rho(m, j) + rho(i, m) * R_(m, j);
        for (int a = 0; a < n_; ++a) {
            const std::uint32_t ma = site_mask(n_, a);
            const bool jset = (j & ma) != 0;
            // (T Pi_a)_{ij} needs bit a of j set; (T Pi+_a)_{ij} needs it clear
            const std::size_t col = j ^ ma;
            for (int b = 0; b < n_; ++b) {
                const std::uint32_t mb = site_mask(n_, b);
                const bool iset = (i & mb) != 0;
                const cplx c = jset ? (iset ? g12_(a, b) : g22_(a, b)) : (iset ? g11_(a, b) : g21_(a, b));
                if (c != 0.0) val += c * rho(i ^ mb, col);
            }
        }
    }
    if (dephase_) val += G_(i, j) * rho(i, j);
    return val;
}

namespace {

CoefficientSet coefficients(const GeneratorContext& ctx, double t) {
    if (!ctx.table) return CoefficientSet{t, {}};
    return ctx.table->coefficients_at(t);
}

void check_state(const GeneratorContext& ctx, const Matrix& rho) {
    if (qubits_of(rho) != ctx.reg.n) throw ValidationError("state dimension does not match register");
}

} // namespace

Matrix relaxation_dissipator(const GeneratorContext& ctx, const Matrix& rho, double t) {
    if (!ctx.has(Coupling::transverse)) throw ValidationError("no transverse channel configured");
    check_state(ctx, rho);
    return PreparedGenerator(coefficients(ctx, t), ctx.reg.n, ctx.options, ChannelFilter::transverse)(rho);
}

Matrix dephasing_dissipator(const GeneratorContext& ctx, const Matrix& rho, double t) {
    if (!ctx.has(Coupling::longitudinal)) throw ValidationError("no longitudinal channel configured");
    check_state(ctx, rho);
    return PreparedGenerator(coefficients(ctx, t), ctx.reg.n, ctx.options, ChannelFilter::longitudinal)(rho);
}

Matrix full_generator(const GeneratorContext& ctx, const Matrix& rho, double t) {
    check_state(ctx, rho);
    return PreparedGenerator(coefficients(ctx, t), ctx.reg.n, ctx.options)(rho);
}

namespace {

// Generators for one output interval, prepared once at every quarter point
// of every coarse step. The fine run (two half steps per coarse step) uses
// all of them, the coarse run every second one, so both runs share the same
// objects and the same time values bit for bit.
class StageCache {
public:
    void build(const GeneratorContext& ctx, double start, const std::vector<double>& steps, int threads) {
        times_.clear();
        double t = start;
        for (double hc : steps) {
            for (int q = 0; q < 4; ++q) times_.push_back(t + 0.25 * q * hc);
            t += hc;
        }
        times_.push_back(t);
        const std::size_t count = times_.size();
        gens_.clear();
        gens_.resize(count);
        auto work = [&](std::size_t begin, std::size_t stride) {
            for (std::size_t q = begin; q < count; q += stride) {
                // Steps see the generator as a right limit at t = 0; a white
                // spectrum switches its rates on discontinuously there.
                const double tq = times_[q] == 0.0 ? std::numeric_limits<double>::denorm_min() : times_[q];
                gens_[q].emplace(coefficients(ctx, tq), ctx.reg.n, ctx.options);
            }
        };
        const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
        std::vector<std::thread> pool;
        for (std::size_t w = 1; w < nt; ++w) pool.emplace_back(work, w, nt);
        work(0, nt);
        for (auto& th : pool) th.join();
    }
    const PreparedGenerator& at(std::size_t q) const { return *gens_[q]; }

private:
    std::vector<double> times_;
    std::vector<std::optional<PreparedGenerator>> gens_;
};

class Integrator {
public:
    // One RK4 step using generators at indices q0, q0 + dq, q0 + 2 dq of the
    // cache, then Hermitian symmetrisation.
    void step(const StageCache& c, Matrix& rho, std::size_t q0, std::size_t dq, double h) {
        const auto& kt = kernels::active();
        const std::size_t n = static_cast<std::size_t>(rho.size());
        y_.resize(rho.rows(), rho.cols());
        c.at(q0).apply(rho, k1_);
        kt.cxpay(n, rho.data(), 0.5 * h, k1_.data(), y_.data());
        c.at(q0 + dq).apply(y_, k2_);
        kt.cxpay(n, rho.data(), 0.5 * h, k2_.data(), y_.data());
        c.at(q0 + dq).apply(y_, k3_);
        kt.cxpay(n, rho.data(), h, k3_.data(), y_.data());
        c.at(q0 + 2 * dq).apply(y_, k4_);
        kt.caxpy(n, h / 6.0, k1_.data(), rho.data());
        kt.caxpy(n, h / 3.0, k2_.data(), rho.data());
        kt.caxpy(n, h / 3.0, k3_.data(), rho.data());
        kt.caxpy(n, h / 6.0, k4_.data(), rho.data());
        rho = (0.5 * (rho + rho.adjoint())).eval();
        calls += 4;
    }

    // Coarse run: one step per entry of `steps`.
    void advance_coarse(const StageCache& c, Matrix& rho, const std::vector<double>& steps) {
        for (std::size_t i = 0; i < steps.size(); ++i) step(c, rho, 4 * i, 2, steps[i]);
    }
    // Fine run: two half steps per entry.
    void advance_fine(const StageCache& c, Matrix& rho, const std::vector<double>& steps) {
        for (std::size_t i = 0; i < steps.size(); ++i) {
            step(c, rho, 4 * i, 1, 0.5 * steps[i]);
            step(c, rho, 4 * i + 2, 1, 0.5 * steps[i]);
        }
    }

    std::size_t calls = 0;

private:
    Matrix k1_, k2_, k3_, k4_, y_;
};

// Coarse steps covering [t0, t0 + dt_out]: nominal step h, each step that
// starts inside the rate table's head split into `refine` equal parts.
std::vector<double> interval_steps(const GeneratorContext& ctx, double t0, double dt_out, double h, int refine) {
    const long n = std::lround(dt_out / h);
    const double hn = dt_out / static_cast<double>(n);
    std::vector<double> steps;
    for (long j = 0; j < n; ++j) {
        const double tj = t0 + static_cast<double>(j) * hn;
        if (ctx.table && refine > 1 && tj < ctx.table->head_end())
            steps.insert(steps.end(), static_cast<std::size_t>(refine), hn / refine);
        else
            steps.push_back(hn);
    }
    return steps;
}

// Fastest phase factor exp(i Omega t) the generator can contain.
double fastest_frequency(const GeneratorContext& ctx) {
    if (!ctx.has(Coupling::transverse)) return 0.0;
    double w = 0.0;
    for (double a : ctx.reg.frequencies)
        for (double b : ctx.reg.frequencies)
            w = std::max(w, ctx.options.include_nonsecular ? std::abs(a + b) : std::abs(a - b));
    return w;
}

} // namespace

double default_step(const GeneratorContext& ctx, double dt_out) {
    const double omega = fastest_frequency(ctx);
    const double target = omega > 0.0 ? std::min(1.0, 0.5 / omega) : 1.0;
    return dt_out / std::ceil(dt_out / target - 1e-9);
}

Trajectory evolve(const GeneratorContext& ctx, const Matrix& rho0, double t_max, double dt_out,
                  const EvolveOptions& opt) {
    check_state(ctx, rho0);
    validate_density(rho0);
    if (!(dt_out > 0.0) || !(t_max >= 0.0)) throw ValidationError("evolve needs dt_out > 0 and t_max >= 0");
    const double ratio = t_max / dt_out;
    const auto n_out = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(n_out)) > 1e-9 * std::max(1.0, ratio))
        throw ValidationError("t_max must be a multiple of dt_out");
    if (ctx.table && t_max > ctx.table->t_max() * (1.0 + 1e-12))
        throw ValidationError("rate table does not cover [0, t_max]");
    if (opt.threads < 1) throw ValidationError("evolve needs threads >= 1");

    double h = opt.step > 0.0 ? opt.step : default_step(ctx, dt_out);
    {
        const double per = dt_out / h;
        if (std::abs(per - std::round(per)) > 1e-9 * per || std::round(per) < 1)
            throw ValidationError("integrator step must divide dt_out");
    }

    for (int halvings = 0;; ++halvings) {
        Trajectory tr;
        Integrator fine, coarse;
        StageCache cache;
        Matrix rho_f = rho0, rho_c = rho0;
        double worst = 0.0;
        bool failed = false;
        auto record = [&](double t, const Matrix& rho) {
            tr.times.push_back(t);
            tr.states.push_back(rho);
            tr.stats.max_trace_error = std::max(tr.stats.max_trace_error, std::abs(rho.trace() - 1.0));
            tr.stats.max_hermiticity_error = std::max(tr.stats.max_hermiticity_error, hermiticity_error(rho));
            if (opt.record_min_eigenvalue) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(rho), Eigen::EigenvaluesOnly);
                tr.min_eigenvalues.push_back(es.eigenvalues().minCoeff());
            }
        };
        record(0.0, rho_f);
        for (std::size_t k = 0; k < n_out; ++k) {
            const double t0 = static_cast<double>(k) * dt_out;
            const std::vector<double> steps = interval_steps(ctx, t0, dt_out, h, opt.startup_refinement);
            if (opt.verify) {
                cache.build(ctx, t0, steps, opt.threads);
                if (opt.threads > 1) {
                    std::thread side([&] { coarse.advance_coarse(cache, rho_c, steps); });
                    fine.advance_fine(cache, rho_f, steps);
                    side.join();
                } else {
                    fine.advance_fine(cache, rho_f, steps);
                    coarse.advance_coarse(cache, rho_c, steps);
                }
            } else {
                // Unverified: the recorded run takes the coarse steps themselves.
                cache.build(ctx, t0, steps, opt.threads);
                coarse.advance_coarse(cache, rho_f, steps);
            }
            if (!rho_f.allFinite())
                throw NumericalError("non-finite state at t=" + std::to_string((k + 1) * dt_out));
            if (opt.verify) {
                worst = std::max(worst, (rho_f - rho_c).cwiseAbs().maxCoeff());
                if (worst >= opt.tolerance) {
                    failed = true;
                    break;
                }
            }
            record(static_cast<double>(k + 1) * dt_out, rho_f);
        }
        if (!failed) {
            tr.stats.step = opt.verify ? 0.5 * h : h;
            tr.stats.halvings = halvings;
            tr.stats.halving_change = worst;
            tr.stats.generator_calls = fine.calls + coarse.calls;
            return tr;
        }
        if (halvings >= opt.max_halvings)
        {
            char msg[160];
            std::snprintf(msg, sizeof msg, "step-halving check failed: change %.3e exceeds tolerance %.1e at step %g",
                          worst, opt.tolerance, h);
            throw NumericalError(msg);
        }
        h *= 0.5;
    }
}

AntidiagonalRhs antidiagonal_ode_rhs(const GeneratorContext& ctx, const Matrix& rho, double t,
                                     const Bitstring& l) {
    check_state(ctx, rho);
    if (l.n != ctx.reg.n) throw ValidationError("bitstring length does not match register");
    const int n = ctx.reg.n;
    const auto coeffs = coefficients(ctx, t);
    const PreparedGenerator gen(coeffs, n, ctx.options);
    const std::size_t i = l.complement().value, j = l.value;
    const cplx r = rho(i, j);

    AntidiagonalRhs out{};
    // Closed forms for the self-coupling of rho_{lbar,l}.
    cplx dephase = 0.0;
    for (const auto& c : coeffs.channels) {
        if (c.coupling != Coupling::longitudinal) continue;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double sign = ((l.bit(a + 1) + l.bit(b + 1)) % 2 == 0) ? 1.0 : -1.0;
                dephase += sign * c.gphi(a, b);
            }
    }
    out.dephasing = -2.0 * dephase * r;
    if (gen.has_relaxation()) {
        const auto& up = gen.jump_rates(1, 2);
        const auto& down = gen.jump_rates(2, 1);
        cplx damp = 0.0;
        for (int a = 0; a < n; ++a) damp += up(a, a) + down(a, a);
        out.local_damping = -0.5 * damp * r;
        // Whatever remains of L_ii + R_jj after the damping is the Hamiltonian energy shift.
        out.lamb_shift = (gen.left()(i, i) + gen.right()(j, j)) * r - out.local_damping;
    }
    Matrix others = rho;
    others(i, j) = 0.0;
    out.source = gen.entry(others, i, j);
    out.total = out.dephasing + out.local_damping + out.lamb_shift + out.source;
    return out;
}

DecoherenceExponent decoherence_exponent(const GeneratorContext& ctx, double t) {
    DecoherenceExponent e;
    if (!ctx.table || ctx.table->channel_count() == 0 || t == 0.0) return e;
    const auto nodes = ctx.table->nodes_up_to(t);
    double prev_r = 0.0, prev_d = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto c = ctx.table->coefficients_at(nodes[k]);
        double rel = 0.0, deph = 0.0;
        for (const auto& ch : c.channels) {
            if (ch.coupling == Coupling::transverse) {
                for (int a = 0; a < ctx.reg.n; ++a) rel += -0.5 * (ch.g12(a, a).real() + ch.g21(a, a).real());
            } else {
                deph += -2.0 * ch.gphi.sum().real();
            }
        }
        if (k > 0) {
            const double dt = nodes[k] - nodes[k - 1];
            e.relaxation += 0.5 * dt * (rel + prev_r);
            e.dephasing += 0.5 * dt * (deph + prev_d);
        }
        prev_r = rel;
        prev_d = deph;
    }
    e.total = e.relaxation + e.dephasing;
    return e;
}

double superdecoherence_exponent(const GeneratorContext& ctx, double t) {
    return decoherence_exponent(ctx, t).total;
}

} // namespace corrnoise
