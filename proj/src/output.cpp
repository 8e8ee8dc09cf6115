// output.cpp — artifact emission with atomic writes, plus the readers used by `detect`

#include "corrnoise/output.hpp"

#include "corrnoise/errors.hpp"
#include "corrnoise/kernels.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace corrnoise {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Shortest text that round-trips the double; "nan" for missing values.
std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

class AtomicWriter {
public:
    explicit AtomicWriter(fs::path dir) : dir_(std::move(dir)) {}
    ~AtomicWriter() {
        if (!committed_) rollback();
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path final = dir_ / name;
        const fs::path tmp = dir_ / ("." + name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw ValidationError("cannot write " + tmp.string());
            out << content;
            out.flush();
            if (!out) throw ValidationError("write failed for " + tmp.string());
        }
        written_.push_back(final);
        fs::rename(tmp, final);
    }

    void commit() { committed_ = true; }
    const std::vector<fs::path>& written() const { return written_; }

private:
    void rollback() {
        std::error_code ec;
        for (const auto& p : written_) fs::remove(p, ec);
        for (const auto& e : fs::directory_iterator(dir_, ec))
            if (e.path().filename().string().ends_with(".tmp")) fs::remove(e.path(), ec);
    }

    fs::path dir_;
    std::vector<fs::path> written_;
    bool committed_ = false;
};

struct Series {
    std::string label;
    std::vector<double> x, y;
};

// Minimal line plot: shared axes, one polyline per series, a legend.
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::vector<Series>& series) {
    const double W = 720, H = 440, L = 80, R = 160, T = 40, B = 60;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << L << "\" y=\"24\" font-size=\"15\">" << title << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\">" << num(x0) << "</text>\n";
    o << "<text x=\"" << W - R << "\" y=\"" << H - B + 18 << "\" text-anchor=\"end\">" << num(x1) << "</text>\n";
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\">" << num(y1) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" text-anchor=\"end\">" << num(y0) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* c = colors[s % 8];
        o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            if (std::isfinite(series[s].y[i])) o << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
        o << "\"/>\n";
        o << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (s + 1) << "\" fill=\"" << c << "\">" << series[s].label
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_num(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw ValidationError(where + ": not a number: '" + s + "'");
    return v;
}

// Header-indexed CSV table.
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

Csv read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    Csv csv;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
    csv.header = split(line);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != csv.header.size())
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(csv.header.size()) +
                                  " columns");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_num(c, path + ":" + std::to_string(lineno)));
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fnv_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json verdict_json(const DetectionReport& r) {
    json j;
    j["relaxation_correlated"] = {{"verdict", verdict_name(r.relaxation.verdict)},
                                  {"peak_ratio", finite_or_null(r.relaxation.peak_ratio)},
                                  {"threshold", r.relaxation.threshold},
                                  {"longest_run", r.relaxation.longest_run},
                                  {"sustain_samples", r.relaxation.sustain},
                                  {"note", r.relaxation.note}};
    if (!r.length.available) {
        j["correlation_length_estimate"] = nullptr;
    } else if (r.length.at_least_n) {
        j["correlation_length_estimate"] = ">=" + std::to_string(r.length.n);
    } else {
        j["correlation_length_estimate"] = r.length.value;
    }
    json dev = json::array();
    for (double d : r.length.deviation) dev.push_back(finite_or_null(d));
    j["correlation_length_detail"] = {{"threshold", r.length.threshold}, {"deviation", dev}, {"note", r.length.note}};
    json norm = json::object();
    for (const auto& [k, v] : r.dephasing.normalized) norm[std::to_string(k)] = finite_or_null(v);
    j["dephasing_correlated"] = {{"verdict", verdict_name(r.dephasing.verdict)},
                                 {"spread", finite_or_null(r.dephasing.spread)},
                                 {"threshold", r.dephasing.threshold},
                                 {"idle_time", r.dephasing.idle_time},
                                 {"normalized", norm},
                                 {"note", r.dephasing.note}};
    if (r.scaling.available) {
        j["superdecoherence_scaling"] = {{"exponent", r.scaling.exponent},
                                         {"std_error", r.scaling.std_error},
                                         {"residual", r.scaling.residual},
                                         {"n_values", r.scaling.n_values},
                                         {"rates", r.scaling.rates}};
    } else {
        j["superdecoherence_scaling"] = nullptr;
    }
    return j;
}

} // namespace

std::string version_string() { return "corrnoise 1.0.0"; }

std::string intensity_csv(const IntensityTrace& tr, int n) {
    std::ostringstream o;
    o << "t,W,I_total,I_local,I_corr";
    for (int k = 1; k <= n; ++k) o << ",I_corr_" << k;
    for (int a = 1; a <= n; ++a) o << ",Z_" << a;
    o << ",min_eig\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        o << num(tr.times[i]) << ',' << num(tr.W[i]) << ',' << num(tr.I_total[i]) << ',' << num(tr.I_local[i]) << ','
          << num(tr.I_corr[i]);
        for (int k = 1; k <= n; ++k)
            o << ',' << (tr.I_corr_partial.empty() ? std::string("nan") : num(tr.I_corr_partial[k - 1][i]));
        for (int a = 1; a <= n; ++a) o << ',' << num(tr.zexp[a - 1][i]);
        o << ',' << (i < tr.min_eig.size() ? num(tr.min_eig[i]) : std::string("nan")) << '\n';
    }
    return o.str();
}

std::string antidiagonals_csv(const Trajectory& tr, int n) {
    std::vector<Bitstring> ls;
    const std::uint32_t half = 1u << (n - 1);
    for (std::uint32_t v = 0; v < half; ++v) ls.push_back(Bitstring{n, v});
    std::ostringstream o;
    o << 't';
    for (const auto& l : ls) o << ",Re_" << l.str() << ",Im_" << l.str();
    o << '\n';
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        o << num(tr.times[i]);
        for (const auto& l : ls) {
            const cplx v = anti_diagonal_element(tr.states[i], l);
            o << ',' << num(v.real()) << ',' << num(v.imag());
        }
        o << '\n';
    }
    return o.str();
}

std::string parity_csv(const ParityTrace& trace) {
    std::ostringstream o;
    o << "phi,parity\n";
    for (std::size_t i = 0; i < trace.phis.size(); ++i) o << num(trace.phis[i]) << ',' << num(trace.values[i]) << '\n';
    return o.str();
}

std::string rho_k_csv(const std::vector<ProtocolPoint>& points) {
    std::ostringstream o;
    o << "idle_t,k,Re,Im,abs\n";
    for (const auto& p : points)
        for (const auto& [k, v] : p.rho_k)
            o << num(p.idle_time) << ',' << k << ',' << num(v.real()) << ',' << num(v.imag()) << ',' << num(std::abs(v))
              << '\n';
    return o.str();
}

std::string report_json(const DetectionReport& report) { return verdict_json(report).dump(2) + "\n"; }

std::string coefficients_csv(const CoefficientSet& set) {
    std::ostringstream o;
    o << "channel,coupling,name,alpha,beta,Re,Im\n";
    for (std::size_t c = 0; c < set.channels.size(); ++c) {
        const auto& ch = set.channels[c];
        auto dump = [&](const char* name, const Eigen::MatrixXcd& m) {
            for (int a = 0; a < m.rows(); ++a)
                for (int b = 0; b < m.cols(); ++b)
                    o << c << ',' << coupling_name(ch.coupling) << ',' << name << ',' << a + 1 << ',' << b + 1 << ','
                      << num(m(a, b).real()) << ',' << num(m(a, b).imag()) << '\n';
        };
        if (ch.coupling == Coupling::transverse) {
            dump("gamma12", ch.g12);
            dump("gamma21", ch.g21);
            dump("gamma11", ch.g11);
            dump("gamma22", ch.g22);
            dump("J1", ch.J1);
            dump("J2", ch.J2);
            dump("J3", ch.J3);
        } else {
            dump("gamma_phi", ch.gphi);
            dump("J_zz", ch.jzz);
        }
    }
    return o.str();
}

std::string sweep_csv(const SweepResult& sweep) {
    std::ostringstream o;
    o << "n,rate,seconds\n";
    for (const auto& r : sweep.rows) o << r.n << ',' << num(r.rate) << ',' << num(r.seconds) << '\n';
    return o.str();
}

void write_run(const RunResult& run, const std::string& dir_name) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir(dir_name);
    fs::create_directories(dir);
    AtomicWriter w(dir);
    const ExperimentConfig& c = run.config;
    const int n = c.reg.n;
    json files = json::object();
    auto put = [&](const std::string& name, const std::string& content) {
        w.write(name, content);
        files[name] = fnv_hex(content);
    };

    if (run.intensity) put("intensity.csv", intensity_csv(*run.intensity, n));
    if (c.analysis.antidiagonals && n >= 1) put("antidiagonals.csv", antidiagonals_csv(run.trajectory, n));
    if (c.protocol.kind == ProtocolKind::parity) {
        for (std::size_t i = 0; i < run.protocol.size(); ++i)
            put("parity_t" + std::to_string(i) + ".csv", parity_csv(run.protocol[i].parity));
        put("rho_k.csv", rho_k_csv(run.protocol));
    } else if (c.protocol.kind == ProtocolKind::mqc) {
        std::ostringstream o;
        o << "idle_t,q,intensity\n";
        for (const auto& p : run.protocol)
            for (const auto& [q, v] : p.intensities) o << num(p.idle_time) << ',' << q << ',' << num(v) << '\n';
        put("mqc.csv", o.str());
    }
    if (c.analysis.detection) put("report.json", report_json(run.report));

    if (c.svg) {
        // Plots are decoration; a failure here must not sink the run.
        try {
            if (run.intensity) {
                const auto& it = *run.intensity;
                w.write("intensity.svg", svg_plot(c.name + " intensity", "t",
                                                  {{"I_total", it.times, it.I_total},
                                                   {"I_local", it.times, it.I_local},
                                                   {"I_corr", it.times, it.I_corr}}));
                if (!it.I_corr_partial.empty()) {
                    std::vector<Series> s;
                    for (int k = 1; k <= n; ++k) s.push_back({"I_corr_" + std::to_string(k), it.times, it.I_corr_partial[k - 1]});
                    w.write("partial_intensity.svg", svg_plot(c.name + " partial intensity", "t", s));
                }
            }
            if (!run.clusters.idle_times.empty()) {
                std::vector<Series> s;
                for (const auto& [k, mags] : run.clusters.magnitude) {
                    auto ref = run.clusters.reference.find(k);
                    if (ref == run.clusters.reference.end() || ref->second < 1e-12) continue;
                    Series ser{"k=" + std::to_string(k), run.clusters.idle_times, {}};
                    for (double m : mags) ser.y.push_back(m / ref->second);
                    s.push_back(std::move(ser));
                }
                w.write("rho_k.svg", svg_plot(c.name + " normalized |rho^(k)|", "idle time", s));
            }
        } catch (const std::exception&) {
        }
    }

    double min_eig = INFINITY;
    for (double e : run.trajectory.min_eigenvalues) min_eig = std::min(min_eig, e);
    json ref = json::object();
    for (const auto& [k, v] : run.clusters.reference) ref[std::to_string(k)] = v;
    const auto& st = run.trajectory.stats;
    json manifest = {
        {"version", version_string()},
        {"simd", std::string(kernels::isa_name(kernels::active_isa()))},
        {"created", timestamp_utc()},
        {"config_digest", config_digest(c)},
        {"config", json::parse(canonical_json(c))},
        {"files", files},
        {"thresholds",
         {{"relaxation", c.analysis.theta_relaxation},
          {"length", c.analysis.theta_length},
          {"dephasing", c.analysis.theta_dephasing},
          {"sustain_samples", c.analysis.sustain_samples}}},
        {"reference_rho_k", ref},
        {"integrator",
         {{"step", st.step},
          {"halvings", st.halvings},
          {"halving_change", st.halving_change},
          {"generator_calls", st.generator_calls},
          {"max_trace_error", st.max_trace_error},
          {"max_hermiticity_error", st.max_hermiticity_error},
          {"min_eigenvalue", finite_or_null(min_eig)}}},
        {"runtimes_seconds",
         {{"rate_table", run.timings.rate_table},
          {"evolution", run.timings.evolution},
          {"analysis", run.timings.analysis},
          {"protocol", run.timings.protocol},
          {"output", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}}}};
    w.write("manifest.json", manifest.dump(2) + "\n");
    w.commit();
}

void write_sweep(const ExperimentConfig& base, const SweepResult& sweep, const std::string& dir_name) {
    const fs::path dir(dir_name);
    fs::create_directories(dir);
    AtomicWriter w(dir);
    w.write("sweep.csv", sweep_csv(sweep));
    DetectionReport r;
    r.relaxation.threshold = base.analysis.theta_relaxation;
    r.relaxation.sustain = base.analysis.sustain_samples;
    r.relaxation.note = "not evaluated in a sweep";
    r.length.threshold = base.analysis.theta_length;
    r.length.note = "not evaluated in a sweep";
    r.dephasing.threshold = base.analysis.theta_dephasing;
    r.dephasing.note = "not evaluated in a sweep";
    r.scaling = sweep.fit;
    w.write("report.json", report_json(r));
    json manifest = {{"version", version_string()},
                     {"created", timestamp_utc()},
                     {"config_digest", config_digest(base)},
                     {"config", json::parse(canonical_json(base))}};
    w.write("manifest.json", manifest.dump(2) + "\n");
    w.commit();
}

IntensityColumns read_intensity_csv(const std::string& path) {
    const Csv csv = read_csv(path);
    auto col = [&](const std::string& name) {
        const int i = csv.column(name);
        if (i < 0) throw ValidationError(path + ": missing column " + name);
        std::vector<double> v;
        for (const auto& r : csv.rows) v.push_back(r[static_cast<std::size_t>(i)]);
        return v;
    };
    IntensityColumns c;
    c.t = col("t");
    c.I_total = col("I_total");
    c.I_corr = col("I_corr");
    for (int k = 1; csv.column("I_corr_" + std::to_string(k)) >= 0; ++k) c.partial.push_back(col("I_corr_" + std::to_string(k)));
    for (const auto& p : c.partial)
        for (double x : p)
            if (std::isnan(x)) {
                c.partial.clear();
                return c;
            }
    return c;
}

ClusterSeries read_rho_k_csv(const std::string& path) {
    const Csv csv = read_csv(path);
    const int it = csv.column("idle_t"), ik = csv.column("k"), ia = csv.column("abs");
    if (it < 0 || ik < 0 || ia < 0) throw ValidationError(path + ": needs idle_t, k and abs columns");
    ClusterSeries s;
    std::map<double, std::map<int, double>> by_time;
    for (const auto& r : csv.rows) by_time[r[it]][static_cast<int>(std::lround(r[ik]))] = r[ia];
    std::size_t idx = 0;
    for (const auto& [t, ks] : by_time) {
        s.idle_times.push_back(t);
        for (const auto& [k, v] : ks) {
            auto& col = s.magnitude[k];
            col.resize(by_time.size(), 0.0);
            col[idx] = v;
        }
        ++idx;
    }
    if (by_time.count(0.0))
        for (const auto& [k, v] : by_time.at(0.0)) s.reference[k] = v;
    return s;
}

DetectionReport detect_directory(const std::string& dir_name) {
    const fs::path dir(dir_name);
    if (!fs::is_directory(dir)) throw ValidationError(dir_name + " is not a directory");
    AnalysisConfig cfg;
    std::map<int, double> reference;
    if (fs::exists(dir / "manifest.json")) {
        std::ifstream in(dir / "manifest.json");
        json m;
        try {
            m = json::parse(in);
        } catch (const json::exception& e) {
            throw ValidationError((dir / "manifest.json").string() + ": " + e.what());
        }
        if (m.contains("thresholds")) {
            const auto& t = m["thresholds"];
            cfg.theta_relaxation = t.value("relaxation", cfg.theta_relaxation);
            cfg.theta_length = t.value("length", cfg.theta_length);
            cfg.theta_dephasing = t.value("dephasing", cfg.theta_dephasing);
            cfg.sustain_samples = t.value("sustain_samples", cfg.sustain_samples);
        }
        if (m.contains("reference_rho_k"))
            for (auto it = m["reference_rho_k"].begin(); it != m["reference_rho_k"].end(); ++it)
                reference[std::stoi(it.key())] = it.value().get<double>();
    }
    DetectionReport r;
    r.relaxation.threshold = cfg.theta_relaxation;
    r.length.threshold = cfg.theta_length;
    r.dephasing.threshold = cfg.theta_dephasing;
    bool any = false;
    if (fs::exists(dir / "intensity.csv")) {
        const auto cols = read_intensity_csv((dir / "intensity.csv").string());
        r.relaxation = detect_relaxation(cols, cfg);
        r.length = estimate_correlation_length(cols, cfg);
        any = true;
    } else {
        r.relaxation.note = r.length.note = "no intensity.csv";
    }
    if (fs::exists(dir / "rho_k.csv")) {
        ClusterSeries s = read_rho_k_csv((dir / "rho_k.csv").string());
        if (!reference.empty()) s.reference = reference;
        r.dephasing = detect_dephasing(s, cfg);
        any = true;
    } else {
        r.dephasing.note = "no rho_k.csv";
    }
    if (!any) throw ValidationError(dir_name + ": neither intensity.csv nor rho_k.csv found");
    return r;
}

} // namespace corrnoise
