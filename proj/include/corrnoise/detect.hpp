// detect.hpp — correlation verdicts from intensity and cluster-coherence traces
#pragma once

#include "corrnoise/config.hpp"
#include "corrnoise/observables.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace corrnoise {

enum class Verdict { correlated, uncorrelated, inconclusive };
std::string verdict_name(Verdict v);

// Columns of intensity.csv that the relaxation analyses read.
struct IntensityColumns {
    std::vector<double> t, I_total, I_corr;
    std::vector<std::vector<double>> partial; // I_corr_k for k = 1..N, empty if unavailable
};
IntensityColumns columns_of(const IntensityTrace& trace);

// |rho^(k)| at each idle time plus the reference values at t = 0.
struct ClusterSeries {
    std::vector<double> idle_times;
    std::map<int, std::vector<double>> magnitude; // k -> |rho^(k)| per idle time
    std::map<int, double> reference;              // k -> |rho^(k)(0)|
};

struct RelaxationVerdict {
    Verdict verdict = Verdict::inconclusive;
    double peak_ratio = 0.0;
    double threshold = 0.0;
    int longest_run = 0;
    int sustain = 0;
    std::string note;
};

struct LengthEstimate {
    bool available = false;
    int value = 0;            // smallest qualifying r
    bool at_least_n = false;  // no r < N qualifies
    int n = 0;
    double threshold = 0.0;
    std::vector<double> deviation; // max_t |I^(r) - I^(N)| / peak |I^(N)|, r = 1..N
    std::string note;
};

struct DephasingVerdict {
    Verdict verdict = Verdict::inconclusive;
    double spread = 0.0;
    double threshold = 0.0;
    double idle_time = 0.0;
    std::map<int, double> normalized;
    std::string note;
};

struct ScalingFit {
    bool available = false;
    double exponent = 0.0;
    double std_error = 0.0;
    double residual = 0.0;
    std::vector<int> n_values;
    std::vector<double> rates;
};

struct DetectionReport {
    RelaxationVerdict relaxation;
    LengthEstimate length;
    DephasingVerdict dephasing;
    ScalingFit scaling;
};

RelaxationVerdict detect_relaxation(const IntensityColumns& cols, const AnalysisConfig& cfg);
LengthEstimate estimate_correlation_length(const IntensityColumns& cols, const AnalysisConfig& cfg);
DephasingVerdict detect_dephasing(const ClusterSeries& series, const AnalysisConfig& cfg);

// Decay rate of |rho^(k)| from a least-squares fit of log magnitude against
// idle time. Requires at least two idle times with nonzero magnitude.
double cluster_decay_rate(const ClusterSeries& series, int k);
// Fits log(rate) = p log(N) + c; needs at least three register sizes.
ScalingFit fit_scaling(const std::vector<int>& n_values, const std::vector<double>& rates);

} // namespace corrnoise
