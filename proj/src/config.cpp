// config.cpp — strict JSON parsing, validation, canonical form and digest

#include "corrnoise/config.hpp"

#include "corrnoise/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace corrnoise {

using json = nlohmann::json;

namespace {

// Object accessor that remembers which keys were read so leftovers can be
// reported as errors.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("", "must be an object");
    }

    bool has(const std::string& k) const { return j_.contains(k); }

    const json& at(const std::string& k) {
        seen_.insert(k);
        if (!j_.contains(k)) fail(k, "is required");
        return j_.at(k);
    }

    double number(const std::string& k) {
        const json& v = at(k);
        if (!v.is_number()) fail(k, "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(k, "must be finite");
        return d;
    }
    double number(const std::string& k, double dflt) { return has(k) ? number(k) : (seen_.insert(k), dflt); }

    long long integer(const std::string& k) {
        const json& v = at(k);
        if (!v.is_number_integer()) fail(k, "must be an integer");
        return v.get<long long>();
    }
    long long integer(const std::string& k, long long dflt) { return has(k) ? integer(k) : dflt; }

    bool boolean(const std::string& k, bool dflt) {
        if (!has(k)) return dflt;
        const json& v = at(k);
        if (!v.is_boolean()) fail(k, "must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& k) {
        const json& v = at(k);
        if (!v.is_string()) fail(k, "must be a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& k, const std::string& dflt) { return has(k) ? string(k) : dflt; }

    std::string child(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ValidationError(child(it.key()) + ": unknown key");
    }

    [[noreturn]] void fail(const std::string& k, const std::string& msg) const {
        throw ValidationError((k.empty() ? (path_.empty() ? std::string("config") : path_) : child(k)) + ": " + msg);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

// Wraps module validation errors with the offending config path.
template <class F>
void with_path(const std::string& path, F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

std::vector<double> number_list(const json& v, const std::string& path) {
    if (!v.is_array()) throw ValidationError(path + ": must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ValidationError(path + "[" + std::to_string(i) + "]: must be a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

SpectrumModel parse_spectrum(const json& j, const std::string& path) {
    Reader r(j, path);
    SpectrumModel m;
    m.kind = [&] {
        SpectrumKind k{};
        with_path(r.child("kind"), [&] { k = parse_spectrum_kind(r.string("kind")); });
        return k;
    }();
    switch (m.kind) {
    case SpectrumKind::ohmic:
        m.strength = r.number("strength");
        m.cutoff = r.number("cutoff");
        break;
    case SpectrumKind::one_over_f:
        m.strength = r.number("strength");
        m.ir_cutoff = r.number("ir_cutoff");
        break;
    case SpectrumKind::white:
        m.strength = r.number("strength");
        break;
    case SpectrumKind::tabulated:
        if (r.has("table") == r.has("table_file")) r.fail("", "tabulated spectrum needs exactly one of table, table_file");
        if (r.has("table")) {
            const json& t = r.at("table");
            if (!t.is_array()) r.fail("table", "must be an array of [omega, S] pairs");
            for (std::size_t i = 0; i < t.size(); ++i) {
                const auto row = number_list(t[i], r.child("table") + "[" + std::to_string(i) + "]");
                if (row.size() != 2) r.fail("table", "rows must be [omega, S] pairs");
                m.table.emplace_back(row[0], row[1]);
            }
        } else {
            const std::string file = r.string("table_file");
            with_path(r.child("table_file"), [&] { m.table = read_spectrum_table(file); });
        }
        break;
    }
    r.done();
    with_path(path, [&] { m.validate(); });
    return m;
}

CorrelationMatrix parse_correlation(const json& j, int n, const std::string& path) {
    Reader r(j, path);
    CorrelationKind kind{};
    with_path(r.child("kind"), [&] { kind = parse_correlation_kind(r.string("kind")); });
    const double theta = r.number("theta", 0.0);
    CorrelationMatrix c;
    with_path(path, [&] {
        switch (kind) {
        case CorrelationKind::full: c = CorrelationMatrix::full(n, theta); break;
        case CorrelationKind::diagonal:
            if (theta != 0.0) throw ValidationError("theta has no effect on a diagonal correlation");
            c = CorrelationMatrix::diagonal(n);
            break;
        case CorrelationKind::window: c = CorrelationMatrix::window(n, static_cast<int>(r.integer("range")), theta); break;
        case CorrelationKind::custom: {
            const json& mj = r.at("matrix");
            if (!mj.is_array() || mj.size() != static_cast<std::size_t>(n))
                throw ValidationError("matrix must have n rows");
            Eigen::MatrixXd xi(n, n);
            for (int a = 0; a < n; ++a) {
                const auto row = number_list(mj[a], "matrix[" + std::to_string(a) + "]");
                if (row.size() != static_cast<std::size_t>(n)) throw ValidationError("matrix must be n x n");
                for (int b = 0; b < n; ++b) xi(a, b) = row[b];
            }
            c = CorrelationMatrix::custom(xi, theta);
            break;
        }
        }
        c.validate();
    });
    r.done();
    return c;
}

json spectrum_json(const SpectrumModel& m) {
    json j{{"kind", spectrum_kind_name(m.kind)}};
    switch (m.kind) {
    case SpectrumKind::ohmic: j["strength"] = m.strength; j["cutoff"] = m.cutoff; break;
    case SpectrumKind::one_over_f: j["strength"] = m.strength; j["ir_cutoff"] = m.ir_cutoff; break;
    case SpectrumKind::white: j["strength"] = m.strength; break;
    case SpectrumKind::tabulated: {
        json t = json::array();
        for (const auto& [w, s] : m.table) t.push_back({w, s});
        j["table"] = t;
        break;
    }
    }
    return j;
}

json correlation_json(const CorrelationMatrix& c) {
    json j{{"kind", correlation_kind_name(c.kind)}};
    if (c.kind != CorrelationKind::diagonal) j["theta"] = c.theta;
    if (c.kind == CorrelationKind::window) j["range"] = c.range;
    if (c.kind == CorrelationKind::custom) {
        json m = json::array();
        for (int a = 0; a < c.xi.rows(); ++a) {
            json row = json::array();
            for (int b = 0; b < c.xi.cols(); ++b) row.push_back(c.xi(a, b));
            m.push_back(row);
        }
        j["matrix"] = m;
    }
    return j;
}

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text, nullptr, true, false);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        // drop the library's own "[json.exception...] parse error at line L, column C:" prefix
        if (auto p = msg.find("parse error"); p != std::string::npos) {
            const auto colon = msg.find(": ", p);
            msg = colon == std::string::npos ? msg.substr(p) : msg.substr(colon + 2);
        }
        throw ValidationError(origin + ": " + line_col(text, e.byte) + ": parse error: " + msg);
    }
    ExperimentConfig cfg;
    try {
        Reader r(root, "");
        cfg.name = r.string("name", "");
        cfg.description = r.string("description", "");

        {
            Reader reg(r.at("register"), "register");
            cfg.reg.n = static_cast<int>(reg.integer("n"));
            with_path("register.n", [&] { check_register(cfg.reg.n); });
            if (reg.has("frequencies") == reg.has("uniform_frequency"))
                reg.fail("", "give exactly one of frequencies, uniform_frequency");
            if (reg.has("frequencies")) {
                cfg.reg.frequencies = number_list(reg.at("frequencies"), "register.frequencies");
            } else {
                cfg.uniform_frequency = true;
                cfg.reg.frequencies.assign(static_cast<std::size_t>(cfg.reg.n), reg.number("uniform_frequency"));
            }
            reg.done();
            with_path("register", [&] { cfg.reg.validate(); });
        }

        if (r.has("channels")) {
            const json& chs = r.at("channels");
            if (!chs.is_array()) r.fail("channels", "must be an array");
            for (std::size_t i = 0; i < chs.size(); ++i) {
                const std::string p = "channels[" + std::to_string(i) + "]";
                Reader c(chs[i], p);
                NoiseChannel ch;
                with_path(p + ".coupling", [&] { ch.coupling = parse_coupling(c.string("coupling")); });
                ch.spectrum = parse_spectrum(c.at("spectrum"), p + ".spectrum");
                ch.correlation = parse_correlation(c.at("correlation"), cfg.reg.n, p + ".correlation");
                c.done();
                cfg.channels.push_back(std::move(ch));
            }
        }

        {
            const json& s = r.at("initial_state");
            if (s.is_string()) {
                with_path("initial_state", [&] { cfg.initial.kind = parse_state_kind(s.get<std::string>()); });
                if (cfg.initial.kind == StateKind::basis) r.fail("initial_state", "basis state needs {\"kind\": \"basis\", \"bits\": ...}");
            } else {
                Reader is(s, "initial_state");
                with_path("initial_state.kind", [&] { cfg.initial.kind = parse_state_kind(is.string("kind")); });
                if (cfg.initial.kind == StateKind::basis) {
                    Bitstring b;
                    with_path("initial_state.bits", [&] { b = Bitstring::parse(is.string("bits")); });
                    if (b.n != cfg.reg.n) is.fail("bits", "length must equal register.n");
                    cfg.initial.basis_value = b.value;
                }
                is.done();
            }
        }

        cfg.t_max = r.number("t_max");
        cfg.dt_out = r.number("dt_out");
        cfg.dt_rate = r.number("dt_rate", 0.1);

        if (r.has("integrator")) {
            Reader in(r.at("integrator"), "integrator");
            cfg.integrator.step = in.number("step", 0.0);
            cfg.integrator.tolerance = in.number("tolerance", 1e-8);
            cfg.integrator.max_halvings = static_cast<int>(in.integer("max_halvings", 6));
            cfg.integrator.verify = in.boolean("verify", true);
            cfg.integrator.startup_refinement = static_cast<int>(in.integer("startup_refinement", 16));
            in.done();
        }
        if (r.has("options")) {
            Reader o(r.at("options"), "options");
            cfg.options.include_nonsecular = o.boolean("include_nonsecular", true);
            cfg.options.include_lamb_hamiltonians = o.boolean("include_lamb_hamiltonians", true);
            o.done();
        }
        if (r.has("protocol")) {
            Reader p(r.at("protocol"), "protocol");
            with_path("protocol.kind", [&] { cfg.protocol.kind = parse_protocol_kind(p.string("kind")); });
            if (p.has("idle_times")) cfg.protocol.idle_times = number_list(p.at("idle_times"), "protocol.idle_times");
            const long long shots = p.integer("shots", 0);
            if (shots < 0) p.fail("shots", "must be >= 0");
            cfg.protocol.shots = static_cast<std::uint64_t>(shots);
            const long long seed = p.integer("seed", 0);
            if (seed < 0) p.fail("seed", "must be >= 0");
            cfg.protocol.seed = static_cast<std::uint64_t>(seed);
            with_path("protocol.mode", [&] { cfg.protocol.mode = parse_mqc_mode(p.string("mode", "overlap_exact")); });
            p.done();
        }
        if (r.has("analysis")) {
            Reader a(r.at("analysis"), "analysis");
            cfg.analysis.intensity = a.boolean("intensity", true);
            cfg.analysis.partial_intensity = a.boolean("partial_intensity", true);
            cfg.analysis.antidiagonals = a.boolean("antidiagonals", true);
            cfg.analysis.detection = a.boolean("detection", true);
            cfg.analysis.sustain_samples = static_cast<int>(a.integer("sustain_samples", 10));
            if (a.has("thresholds")) {
                Reader t(a.at("thresholds"), "analysis.thresholds");
                cfg.analysis.theta_relaxation = t.number("relaxation", 0.05);
                cfg.analysis.theta_length = t.number("length", 0.02);
                cfg.analysis.theta_dephasing = t.number("dephasing", 0.1);
                t.done();
            }
            a.done();
        }
        if (r.has("sweep")) {
            Reader s(r.at("sweep"), "sweep");
            for (double v : number_list(s.at("n_values"), "sweep.n_values")) {
                if (v != std::floor(v)) s.fail("n_values", "must be integers");
                cfg.sweep.n_values.push_back(static_cast<int>(v));
            }
            s.done();
        }
        if (r.has("output")) {
            Reader o(r.at("output"), "output");
            cfg.output_dir = o.string("directory", "out");
            cfg.svg = o.boolean("svg", true);
            o.done();
        }
        r.done();
    } catch (const ValidationError& e) {
        throw ValidationError(origin + ": " + e.what());
    } catch (const json::exception& e) {
        throw ValidationError(origin + ": " + e.what());
    }
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(origin + ": " + e.what());
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    with_path("register", [&] { reg.validate(); });
    for (std::size_t i = 0; i < channels.size(); ++i)
        with_path("channels[" + std::to_string(i) + "]", [&] { channels[i].validate(reg.n); });
    if (!(t_max > 0.0)) throw ValidationError("t_max: must be > 0");
    if (!(dt_out > 0.0)) throw ValidationError("dt_out: must be > 0");
    if (!(dt_rate > 0.0)) throw ValidationError("dt_rate: must be > 0");
    if (dt_rate > t_max) throw ValidationError("dt_rate: must not exceed t_max");
    auto multiple = [](double a, double b) {
        const double r = a / b;
        return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r) && std::round(r) >= 1.0;
    };
    if (!multiple(t_max, dt_out)) throw ValidationError("t_max: must be a multiple of dt_out");
    if (integrator.step < 0.0) throw ValidationError("integrator.step: must be >= 0");
    if (integrator.step > 0.0 && !multiple(dt_out, integrator.step))
        throw ValidationError("integrator.step: must divide dt_out");
    if (!(integrator.tolerance > 0.0)) throw ValidationError("integrator.tolerance: must be > 0");
    if (integrator.max_halvings < 0) throw ValidationError("integrator.max_halvings: must be >= 0");
    if (integrator.startup_refinement < 1) throw ValidationError("integrator.startup_refinement: must be >= 1");
    if (protocol.kind != ProtocolKind::none) {
        if (protocol.idle_times.empty()) throw ValidationError("protocol.idle_times: at least one idle time required");
        for (double t : protocol.idle_times) {
            if (t < 0.0 || t > t_max * (1.0 + 1e-12)) throw ValidationError("protocol.idle_times: must lie in [0, t_max]");
            if (t > 0.0 && !multiple(t, dt_out)) throw ValidationError("protocol.idle_times: must be multiples of dt_out");
        }
    }
    if (!(analysis.theta_relaxation > 0.0) || !(analysis.theta_length > 0.0) || !(analysis.theta_dephasing > 0.0))
        throw ValidationError("analysis.thresholds: must be > 0");
    if (analysis.sustain_samples < 1) throw ValidationError("analysis.sustain_samples: must be >= 1");
    for (int n : sweep.n_values)
        with_path("sweep.n_values", [&] { check_register(n); });
    if (initial.kind == StateKind::basis && initial.basis_value >= dimension(reg.n))
        throw ValidationError("initial_state.bits: out of range");
}

ExperimentConfig ExperimentConfig::resized(int n) const {
    check_register(n);
    ExperimentConfig c = *this;
    double mean = 0.0;
    for (double w : reg.frequencies) mean += w / reg.n;
    c.reg = RegisterConfig::uniform(n, uniform_frequency ? reg.frequencies.front() : mean);
    c.uniform_frequency = true;
    if (initial.kind == StateKind::basis) throw ValidationError("cannot resize a basis-state initial condition");
    for (auto& ch : c.channels) {
        const auto& old = ch.correlation;
        switch (old.kind) {
        case CorrelationKind::full: ch.correlation = CorrelationMatrix::full(n, old.theta); break;
        case CorrelationKind::diagonal: ch.correlation = CorrelationMatrix::diagonal(n); break;
        case CorrelationKind::window: ch.correlation = CorrelationMatrix::window(n, std::min(old.range, n), old.theta); break;
        case CorrelationKind::custom: throw ValidationError("cannot resize a custom correlation matrix");
        }
    }
    return c;
}

std::string canonical_json(const ExperimentConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["register"] = {{"n", cfg.reg.n}, {"frequencies", cfg.reg.frequencies}};
    j["channels"] = json::array();
    for (const auto& ch : cfg.channels)
        j["channels"].push_back({{"coupling", coupling_name(ch.coupling)},
                                 {"spectrum", spectrum_json(ch.spectrum)},
                                 {"correlation", correlation_json(ch.correlation)}});
    if (cfg.initial.kind == StateKind::basis)
        j["initial_state"] = {{"kind", "basis"}, {"bits", Bitstring{cfg.reg.n, cfg.initial.basis_value}.str()}};
    else
        j["initial_state"] = {{"kind", state_kind_name(cfg.initial.kind)}};
    j["t_max"] = cfg.t_max;
    j["dt_out"] = cfg.dt_out;
    j["dt_rate"] = cfg.dt_rate;
    j["integrator"] = {{"step", cfg.integrator.step},
                       {"tolerance", cfg.integrator.tolerance},
                       {"max_halvings", cfg.integrator.max_halvings},
                       {"verify", cfg.integrator.verify},
                       {"startup_refinement", cfg.integrator.startup_refinement}};
    j["options"] = {{"include_nonsecular", cfg.options.include_nonsecular},
                    {"include_lamb_hamiltonians", cfg.options.include_lamb_hamiltonians}};
    j["protocol"] = {{"kind", protocol_kind_name(cfg.protocol.kind)},
                     {"idle_times", cfg.protocol.idle_times},
                     {"shots", cfg.protocol.shots},
                     {"seed", cfg.protocol.seed},
                     {"mode", mqc_mode_name(cfg.protocol.mode)}};
    j["analysis"] = {{"intensity", cfg.analysis.intensity},
                     {"partial_intensity", cfg.analysis.partial_intensity},
                     {"antidiagonals", cfg.analysis.antidiagonals},
                     {"detection", cfg.analysis.detection},
                     {"sustain_samples", cfg.analysis.sustain_samples},
                     {"thresholds",
                      {{"relaxation", cfg.analysis.theta_relaxation},
                       {"length", cfg.analysis.theta_length},
                       {"dephasing", cfg.analysis.theta_dephasing}}}};
    j["sweep"] = {{"n_values", cfg.sweep.n_values}};
    return j.dump();
}

std::string config_digest(const ExperimentConfig& cfg) {
    const std::string s = canonical_json(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig load_config(const std::string& path_or_preset) {
    if (auto text = preset_text(path_or_preset)) return parse_config(*text, "preset " + path_or_preset);
    std::ifstream in(path_or_preset);
    if (!in) throw ValidationError("'" + path_or_preset + "' is neither a readable file nor a bundled preset");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path_or_preset);
}

} // namespace corrnoise
