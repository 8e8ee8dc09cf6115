// detect.cpp — threshold logic behind the detection report

#include "corrnoise/detect.hpp"

#include "corrnoise/errors.hpp"

#include <algorithm>
#include <cmath>

namespace corrnoise {

std::string verdict_name(Verdict v) {
    switch (v) {
    case Verdict::correlated: return "correlated";
    case Verdict::uncorrelated: return "uncorrelated";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

IntensityColumns columns_of(const IntensityTrace& trace) {
    return {trace.times, trace.I_total, trace.I_corr, trace.I_corr_partial};
}

namespace {

double peak_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v)
        if (std::isfinite(x)) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

RelaxationVerdict detect_relaxation(const IntensityColumns& cols, const AnalysisConfig& cfg) {
    RelaxationVerdict r;
    r.threshold = cfg.theta_relaxation;
    r.sustain = cfg.sustain_samples;
    if (cols.I_total.size() != cols.I_corr.size()) throw ValidationError("intensity columns differ in length");
    if (static_cast<int>(cols.I_total.size()) < cfg.sustain_samples) {
        r.note = "fewer samples than the sustain requirement";
        return r;
    }
    const double peak_total = peak_abs(cols.I_total);
    if (peak_total == 0.0) {
        r.note = "total intensity is identically zero";
        return r;
    }
    r.peak_ratio = peak_abs(cols.I_corr) / peak_total;
    const double level = cfg.theta_relaxation * peak_total;
    int run = 0;
    for (double x : cols.I_corr) {
        run = (std::isfinite(x) && std::abs(x) > level) ? run + 1 : 0;
        r.longest_run = std::max(r.longest_run, run);
    }
    if (r.longest_run >= cfg.sustain_samples) {
        r.verdict = Verdict::correlated;
    } else if (r.peak_ratio < 0.5 * cfg.theta_relaxation) {
        r.verdict = Verdict::uncorrelated;
    } else {
        r.note = "correlated intensity near threshold or not sustained";
    }
    return r;
}

LengthEstimate estimate_correlation_length(const IntensityColumns& cols, const AnalysisConfig& cfg) {
    LengthEstimate e;
    e.threshold = cfg.theta_length;
    const int n = static_cast<int>(cols.partial.size());
    e.n = n;
    if (n == 0) {
        e.note = "partial intensities unavailable";
        return e;
    }
    const auto& full = cols.partial.back();
    const double peak = peak_abs(full);
    if (peak == 0.0 || !std::isfinite(peak)) {
        e.note = "correlated intensity is identically zero";
        return e;
    }
    e.available = true;
    for (int r = 1; r <= n; ++r) {
        double dev = 0.0;
        const auto& col = cols.partial[r - 1];
        for (std::size_t i = 0; i < full.size(); ++i) dev = std::max(dev, std::abs(col[i] - full[i]));
        e.deviation.push_back(dev / peak);
    }
    for (int r = 1; r <= n; ++r) {
        if (e.deviation[r - 1] < cfg.theta_length) {
            e.value = r;
            break;
        }
    }
    e.at_least_n = e.value == n;
    return e;
}

DephasingVerdict detect_dephasing(const ClusterSeries& series, const AnalysisConfig& cfg) {
    DephasingVerdict d;
    d.threshold = cfg.theta_dephasing;
    if (series.idle_times.empty()) {
        d.note = "no idle times";
        return d;
    }
    std::size_t last = 0;
    for (std::size_t i = 0; i < series.idle_times.size(); ++i)
        if (series.idle_times[i] > series.idle_times[last]) last = i;
    d.idle_time = series.idle_times[last];
    if (d.idle_time <= 0.0) {
        d.note = "no idle time beyond zero";
        return d;
    }
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& [k, mags] : series.magnitude) {
        auto ref = series.reference.find(k);
        if (ref == series.reference.end() || ref->second < 1e-12) continue;
        const double v = mags[last] / ref->second;
        d.normalized[k] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (d.normalized.size() < 2) {
        d.note = "fewer than two populated coherence clusters";
        return d;
    }
    d.spread = hi - lo;
    if (d.spread > cfg.theta_dephasing) {
        d.verdict = Verdict::correlated;
    } else if (d.spread < 0.5 * cfg.theta_dephasing) {
        d.verdict = Verdict::uncorrelated;
    } else {
        d.note = "spread inside the inconclusive band";
    }
    return d;
}

double cluster_decay_rate(const ClusterSeries& series, int k) {
    auto it = series.magnitude.find(k);
    if (it == series.magnitude.end()) throw ValidationError("no cluster k = " + std::to_string(k));
    std::vector<double> x, y;
    for (std::size_t i = 0; i < series.idle_times.size(); ++i) {
        if (it->second[i] > 0.0) {
            x.push_back(series.idle_times[i]);
            y.push_back(std::log(it->second[i]));
        }
    }
    if (x.size() < 2) throw NumericalError("decay rate needs two idle times with nonzero coherence");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den <= 0.0) throw NumericalError("decay rate fit is degenerate");
    return -(n * sxy - sx * sy) / den;
}

ScalingFit fit_scaling(const std::vector<int>& n_values, const std::vector<double>& rates) {
    if (n_values.size() != rates.size()) throw ValidationError("scaling fit: size mismatch");
    std::vector<int> distinct = n_values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw ValidationError("scaling fit needs at least three distinct register sizes");
    ScalingFit f;
    f.n_values = n_values;
    f.rates = rates;
    const std::size_t m = rates.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> x(m), y(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(rates[i] > 0.0)) throw NumericalError("scaling fit needs positive decay rates");
        x[i] = std::log(static_cast<double>(n_values[i]));
        y[i] = std::log(rates[i]);
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double dm = static_cast<double>(m);
    const double den = dm * sxx - sx * sx;
    f.exponent = (dm * sxy - sx * sy) / den;
    const double c = (sy - f.exponent * sx) / dm;
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) ss += std::pow(y[i] - f.exponent * x[i] - c, 2);
    f.residual = std::sqrt(ss / dm);
    f.std_error = m > 2 ? std::sqrt(ss / (dm - 2.0) * dm / den) : 0.0;
    f.available = true;
    return f;
}

} // namespace corrnoise
