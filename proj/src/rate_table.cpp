// rate_table.cpp — grid construction (optionally threaded) and interpolation

#include "corrnoise/rate_table.hpp"

#include "corrnoise/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace corrnoise {

namespace {

constexpr int kHeadRefinement = 20;
constexpr int kGuardNodes = 3;

double head_length(const std::vector<NoiseChannel>& channels) {
    double len = 5.0;
    for (const auto& ch : channels)
        if (ch.spectrum.kind == SpectrumKind::ohmic) len = std::max(len, 50.0 / ch.spectrum.cutoff);
    return len;
}

} // namespace

RateTable RateTable::build(const std::vector<NoiseChannel>& channels, const RegisterConfig& reg,
                           double t_max, double dt_rate, const RateTableOptions& opt) {
    reg.validate();
    if (!(dt_rate > 0.0)) throw ValidationError("dt_rate must be > 0");
    if (!(t_max >= dt_rate)) throw ValidationError("t_max must be >= dt_rate");
    for (const auto& ch : channels) ch.validate(reg.n);

    RateTable tab;
    tab.channels_ = channels;
    tab.reg_ = reg;
    tab.t_max_ = t_max;
    tab.dt_body_ = dt_rate;
    tab.dt_head_ = dt_rate / kHeadRefinement;
    tab.head_end_ = std::min(head_length(channels), t_max);

    const std::size_t n_body = static_cast<std::size_t>(std::ceil(t_max / dt_rate)) + kGuardNodes + 1;

    struct Task {
        std::size_t channel, series;
    };
    std::vector<Task> tasks;
    tab.data_.resize(channels.size());
    for (std::size_t j = 0; j < channels.size(); ++j) {
        auto& cs = tab.data_[j];
        auto index_of = [&](double nu) {
            for (std::size_t k = 0; k < cs.series.size(); ++k)
                if (cs.series[k].nu == nu) return static_cast<int>(k);
            cs.series.push_back(Series{nu, nullptr, {}});
            tasks.push_back({j, cs.series.size() - 1});
            return static_cast<int>(cs.series.size() - 1);
        };
        if (channels[j].coupling == Coupling::transverse) {
            for (double w : reg.frequencies) {
                cs.plus_index.push_back(index_of(w));
                cs.minus_index.push_back(index_of(-w));
            }
        } else {
            cs.zero_index = index_of(0.0);
        }
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) {
            const auto [j, si] = tasks[k];
            Series& s = tab.data_[j].series[si];
            try {
                auto phi = std::make_shared<const FilterIntegral>(channels[j].spectrum, s.nu, opt.quadrature);
                s.body.resize(n_body);
                for (std::size_t i = 0; i < n_body; ++i) s.body[i] = (*phi)(static_cast<double>(i) * dt_rate);
                s.exact = std::move(phi);
            } catch (const QuadratureError& e) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::make_exception_ptr(QuadratureError(
                        "rate table, channel " + std::to_string(j + 1) + ", base integral at nu=" +
                            std::to_string(s.nu) + ": " + e.what(),
                        e.achieved_error()));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(tasks.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return tab;
}

RateTable build_rate_table(const std::vector<NoiseChannel>& channels, const RegisterConfig& reg,
                           double t_max, double dt_rate, const RateTableOptions& opt) {
    return RateTable::build(channels, reg, t_max, dt_rate, opt);
}

const RateTable::Series& RateTable::find(std::size_t channel, double nu) const {
    if (channel >= data_.size()) throw ValidationError("rate table channel index out of range");
    for (const auto& s : data_[channel].series)
        if (s.nu == nu) return s;
    throw ValidationError("rate table has no base integral at nu=" + std::to_string(nu));
}

cplx RateTable::interpolate(const Series& s, double t) const {
    if (t < 0.0 || t > t_max_ * (1.0 + 1e-12) + 1e-12)
        throw ValidationError("time " + std::to_string(t) + " outside rate table range [0, " +
                              std::to_string(t_max_) + "]");
    if (t < head_end_) return (*s.exact)(t);
    const std::vector<cplx>& v = s.body;
    const double x = t / dt_body_;
    const auto i = static_cast<std::size_t>(x);
    const double u = x - static_cast<double>(i);
    if (u == 0.0) return v[i];
    // four-point Lagrange on nodes i0..i0+3
    const std::size_t i0 = i == 0 ? 0 : i - 1;
    const double p = x - static_cast<double>(i0); // position relative to node i0, in [0, 3)
    const double w0 = -(p - 1.0) * (p - 2.0) * (p - 3.0) / 6.0;
    const double w1 = p * (p - 2.0) * (p - 3.0) / 2.0;
    const double w2 = -p * (p - 1.0) * (p - 3.0) / 2.0;
    const double w3 = p * (p - 1.0) * (p - 2.0) / 6.0;
    return w0 * v[i0] + w1 * v[i0 + 1] + w2 * v[i0 + 2] + w3 * v[i0 + 3];
}

cplx RateTable::phi(std::size_t channel, double nu, double t) const {
    return interpolate(find(channel, nu), t);
}

std::vector<double> RateTable::nodes_up_to(double t) const {
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
        const double x = static_cast<double>(i) * dt_head_;
        if (x >= head_end_ || x > t) break;
        out.push_back(x);
    }
    for (std::size_t i = 0;; ++i) {
        const double x = static_cast<double>(i) * dt_body_;
        if (x > t) break;
        if (x >= head_end_) out.push_back(x);
    }
    if (out.empty() || out.back() < t) out.push_back(t);
    return out;
}

CoefficientSet RateTable::coefficients_at(double t) const {
    CoefficientSet set;
    set.t = t;
    const int n = reg_.n;
    for (std::size_t j = 0; j < channels_.size(); ++j) {
        const auto& ch = channels_[j];
        const auto& cs = data_[j];
        ChannelCoefficients cc;
        cc.coupling = ch.coupling;
        if (ch.coupling == Coupling::transverse) {
            std::vector<coeff::PhiPair> phis(static_cast<std::size_t>(n));
            for (int a = 0; a < n; ++a)
                phis[a] = {interpolate(cs.series[cs.plus_index[a]], t),
                           interpolate(cs.series[cs.minus_index[a]], t)};
            for (auto* m : {&cc.g12, &cc.g21, &cc.g11, &cc.g22, &cc.J1, &cc.J2, &cc.J3})
                *m = Eigen::MatrixXcd::Zero(n, n);
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    const cplx c = ch.correlation.factor(a, b);
                    if (c == 0.0) continue;
                    const double wa = reg_.frequencies[a], wb = reg_.frequencies[b];
                    const auto r = coeff::rates(c, wa, wb, phis[a], phis[b], t);
                    cc.g12(a, b) = r.g12;
                    cc.g21(a, b) = r.g21;
                    cc.g11(a, b) = r.g11;
                    coeff::exchange(c, wa, wb, phis[a], phis[b], t, cc.J1(a, b), cc.J2(a, b), cc.J3(a, b));
                }
            }
            cc.g22 = cc.g11.adjoint();
        } else {
            const cplx p0 = interpolate(cs.series[cs.zero_index], t);
            cc.gphi = Eigen::MatrixXcd::Zero(n, n);
            cc.jzz = Eigen::MatrixXcd::Zero(n, n);
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    const cplx c = ch.correlation.factor(a, b);
                    if (c == 0.0) continue;
                    cc.gphi(a, b) = c * (2.0 * p0.real());
                    cc.jzz(a, b) = c * p0.imag();
                }
            }
        }
        set.channels.push_back(std::move(cc));
    }
    return set;
}

} // namespace corrnoise
