// experiment.cpp — stage sequencing with stage-tagged errors

#include "corrnoise/experiment.hpp"

#include "corrnoise/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace corrnoise {

namespace {

// Runs one stage, timing it and prefixing any error with the stage name while
// keeping the error category (validation or numerical) intact.
template <class F>
void stage(const char* name, double& seconds, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        f();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("stage ") + name + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("stage ") + name + ": " + e.what());
    }
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix initial_density(const ExperimentConfig& cfg) {
    return initial_state(cfg.initial.kind, cfg.reg.n, cfg.initial.basis_value);
}

} // namespace

int resolve_threads(int requested) {
    if (requested < 0) throw ValidationError("--threads must be >= 0");
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

ClusterSeries cluster_series(const std::vector<ProtocolPoint>& points, const Matrix& rho0) {
    ClusterSeries s;
    for (const auto& [k, v] : cluster_by_excess(rho0)) s.reference[k] = std::abs(v);
    for (std::size_t i = 0; i < points.size(); ++i) {
        s.idle_times.push_back(points[i].idle_time);
        for (const auto& [k, v] : points[i].rho_k) {
            auto& col = s.magnitude[k];
            col.resize(points.size(), 0.0);
            col[i] = std::abs(v);
        }
    }
    return s;
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    cfg.validate();
    RunResult res;
    res.config = cfg;
    if (opt.seed) res.config.protocol.seed = *opt.seed;
    const ExperimentConfig& c = res.config;

    stage("rate-table", res.timings.rate_table, [&] {
        RateTableOptions ro;
        ro.threads = resolve_threads(opt.threads);
        res.table = std::make_shared<const RateTable>(RateTable::build(c.channels, c.reg, c.t_max, c.dt_rate, ro));
    });
    const GeneratorContext ctx{c.reg, res.table, c.options};
    const Matrix rho0 = initial_density(c);

    stage("evolution", res.timings.evolution, [&] {
        EvolveOptions eo = c.integrator;
        eo.threads = resolve_threads(opt.threads);
        res.trajectory = evolve(ctx, rho0, c.t_max, c.dt_out, eo);
    });

    if (c.analysis.intensity) {
        stage("intensity", res.timings.analysis, [&] {
            res.intensity = intensity_trace(ctx, res.trajectory, c.analysis.partial_intensity);
        });
    }
    if (c.protocol.kind != ProtocolKind::none) {
        stage("protocol", res.timings.protocol, [&] {
            res.protocol = run_protocol_on(res.trajectory, c.protocol, c.reg.n).points;
            if (c.protocol.kind == ProtocolKind::parity) res.clusters = cluster_series(res.protocol, rho0);
        });
    }
    if (c.analysis.detection) {
        stage("detection", res.timings.analysis, [&] {
            if (res.intensity) {
                const auto cols = columns_of(*res.intensity);
                res.report.relaxation = detect_relaxation(cols, c.analysis);
                res.report.length = estimate_correlation_length(cols, c.analysis);
            } else {
                res.report.relaxation.threshold = c.analysis.theta_relaxation;
                res.report.relaxation.note = "intensity analysis disabled";
                res.report.length.threshold = c.analysis.theta_length;
                res.report.length.note = "intensity analysis disabled";
            }
            if (!res.clusters.idle_times.empty()) {
                res.report.dephasing = detect_dephasing(res.clusters, c.analysis);
            } else {
                res.report.dephasing.threshold = c.analysis.theta_dephasing;
                res.report.dephasing.note = "no parity protocol configured";
            }
        });
    }
    return res;
}

SweepResult sweep_n(const ExperimentConfig& base, const std::vector<int>& n_values, const RunOptions& opt) {
    if (n_values.size() < 3) throw ValidationError("sweep needs at least three register sizes");
    if (base.protocol.kind != ProtocolKind::parity) throw ValidationError("sweep needs a parity protocol with idle times");
    SweepResult out;
    for (int n : n_values) {
        ExperimentConfig cfg = base.resized(n);
        cfg.analysis.intensity = false;
        cfg.analysis.partial_intensity = false;
        cfg.analysis.detection = false;
        double t_end = 0.0;
        for (double t : cfg.protocol.idle_times) t_end = std::max(t_end, t);
        cfg.t_max = t_end;
        const auto t0 = std::chrono::steady_clock::now();
        RunResult r = run_experiment(cfg, opt);
        SweepRow row;
        row.n = n;
        double dummy = 0.0;
        stage("sweep-fit", dummy, [&] { row.rate = cluster_decay_rate(r.clusters, n); });
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.stats = r.trajectory.stats;
        const auto& ev = r.trajectory.min_eigenvalues;
        row.min_eigenvalue = ev.empty() ? 0.0 : *std::min_element(ev.begin(), ev.end());
        out.rows.push_back(row);
    }
    std::vector<int> ns;
    std::vector<double> rates;
    for (const auto& row : out.rows) {
        ns.push_back(row.n);
        rates.push_back(row.rate);
    }
    double dummy = 0.0;
    stage("sweep-fit", dummy, [&] { out.fit = fit_scaling(ns, rates); });
    return out;
}

CoefficientSet coefficients_for(const ExperimentConfig& cfg, double t, const RunOptions& opt) {
    cfg.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("--t must be a finite time >= 0");
    CoefficientSet set;
    double dummy = 0.0;
    stage("rate-table", dummy, [&] {
        RateTableOptions ro;
        ro.threads = resolve_threads(opt.threads);
        const double horizon = std::max(t, 2.0 * cfg.dt_rate);
        const RateTable table = RateTable::build(cfg.channels, cfg.reg, horizon, cfg.dt_rate, ro);
        set = table.coefficients_at(t);
    });
    return set;
}

} // namespace corrnoise
