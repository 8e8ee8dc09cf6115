// experiment.hpp — run orchestration: rate table, evolution, analyses, protocols
#pragma once

#include "corrnoise/detect.hpp"
#include "corrnoise/rate_table.hpp"

#include <memory>
#include <optional>

namespace corrnoise {

struct RunOptions {
    int threads = 0;                    // 0: hardware concurrency
    std::optional<std::uint64_t> seed;  // overrides protocol.seed
};

struct StageTimings {
    double rate_table = 0.0;
    double evolution = 0.0;
    double analysis = 0.0;
    double protocol = 0.0;
    double output = 0.0;
};

struct RunResult {
    ExperimentConfig config;
    std::shared_ptr<const RateTable> table;
    Trajectory trajectory;
    std::optional<IntensityTrace> intensity;
    std::vector<ProtocolPoint> protocol;
    ClusterSeries clusters;
    DetectionReport report;
    StageTimings timings;
};

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

// |rho^(k)| per idle time from protocol points, referenced to the exact initial state.
ClusterSeries cluster_series(const std::vector<ProtocolPoint>& points, const Matrix& rho0);

struct SweepRow {
    int n = 0;
    double rate = 0.0;     // decay rate of |rho^(N)|
    double seconds = 0.0;
    EvolveStats stats;     // of the member run
    double min_eigenvalue = 0.0;
};
struct SweepResult {
    std::vector<SweepRow> rows;
    ScalingFit fit;
};
SweepResult sweep_n(const ExperimentConfig& base, const std::vector<int>& n_values, const RunOptions& opt = {});

// Dissipator coefficients of every channel at time t.
CoefficientSet coefficients_for(const ExperimentConfig& cfg, double t, const RunOptions& opt = {});

int resolve_threads(int requested);

} // namespace corrnoise
