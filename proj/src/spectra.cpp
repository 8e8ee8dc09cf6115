// spectra.cpp — spectrum models, correlation matrices and coefficient formulas

#include "corrnoise/spectra.hpp"

#include "corrnoise/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace corrnoise {

SpectrumModel SpectrumModel::ohmic(double lambda, double cutoff) {
    SpectrumModel m;
    m.kind = SpectrumKind::ohmic;
    m.strength = lambda;
    m.cutoff = cutoff;
    return m;
}

SpectrumModel SpectrumModel::one_over_f(double lambda, double ir_cutoff) {
    SpectrumModel m;
    m.kind = SpectrumKind::one_over_f;
    m.strength = lambda;
    m.ir_cutoff = ir_cutoff;
    return m;
}

SpectrumModel SpectrumModel::white(double s0) {
    SpectrumModel m;
    m.kind = SpectrumKind::white;
    m.strength = s0;
    return m;
}

SpectrumModel SpectrumModel::tabulated(std::vector<std::pair<double, double>> samples) {
    SpectrumModel m;
    m.kind = SpectrumKind::tabulated;
    m.table = std::move(samples);
    return m;
}

void SpectrumModel::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    switch (kind) {
    case SpectrumKind::ohmic:
        if (!finite(strength) || strength < 0.0) throw ValidationError("ohmic strength must be >= 0");
        if (!finite(cutoff) || cutoff <= 0.0) throw ValidationError("ohmic cutoff must be > 0");
        break;
    case SpectrumKind::one_over_f:
        if (!finite(strength) || strength < 0.0) throw ValidationError("1/f strength must be >= 0");
        if (!finite(ir_cutoff) || ir_cutoff <= 0.0)
            throw ValidationError("1/f ir_cutoff must be > 0");
        break;
    case SpectrumKind::white:
        if (!finite(strength) || strength < 0.0) throw ValidationError("white strength must be >= 0");
        break;
    case SpectrumKind::tabulated:
        if (table.size() < 2) throw ValidationError("tabulated spectrum needs at least 2 samples");
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (!finite(table[i].first) || !finite(table[i].second) || table[i].second < 0.0)
                throw ValidationError("tabulated spectrum values must be finite and >= 0");
            if (i > 0 && table[i].first <= table[i - 1].first)
                throw ValidationError("tabulated spectrum frequencies must be strictly increasing");
        }
        break;
    }
}

double SpectrumModel::operator()(double omega) const {
    switch (kind) {
    case SpectrumKind::ohmic:
        return omega >= 0.0 ? strength * omega * std::exp(-omega / cutoff) : 0.0;
    case SpectrumKind::one_over_f: {
        const double a = std::abs(omega);
        return a >= ir_cutoff ? strength / a : strength / ir_cutoff;
    }
    case SpectrumKind::white:
        return strength;
    case SpectrumKind::tabulated: {
        if (table.size() < 2) throw ValidationError("tabulated spectrum needs at least 2 samples");
        if (omega < table.front().first || omega > table.back().first) return 0.0;
        auto it = std::upper_bound(table.begin(), table.end(), omega,
                                   [](double w, const auto& p) { return w < p.first; });
        if (it == table.end()) return table.back().second;
        const auto& [w1, s1] = *it;
        const auto& [w0, s0] = *(it - 1);
        const double u = (omega - w0) / (w1 - w0);
        return s0 + u * (s1 - s0);
    }
    }
    return 0.0;
}

bool SpectrumModel::is_zero() const {
    if (kind == SpectrumKind::tabulated)
        return std::all_of(table.begin(), table.end(), [](const auto& p) { return p.second == 0.0; });
    return strength == 0.0;
}

SpectrumKind parse_spectrum_kind(const std::string& name) {
    if (name == "ohmic") return SpectrumKind::ohmic;
    if (name == "one_over_f") return SpectrumKind::one_over_f;
    if (name == "white") return SpectrumKind::white;
    if (name == "tabulated") return SpectrumKind::tabulated;
    throw ValidationError("unknown spectrum kind '" + name + "'");
}

std::string spectrum_kind_name(SpectrumKind k) {
    switch (k) {
    case SpectrumKind::ohmic: return "ohmic";
    case SpectrumKind::one_over_f: return "one_over_f";
    case SpectrumKind::white: return "white";
    case SpectrumKind::tabulated: return "tabulated";
    }
    return "?";
}

std::vector<std::pair<double, double>> read_spectrum_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open spectrum table '" + path + "'");
    std::vector<std::pair<double, double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double w, s;
        if (!(ss >> w)) continue;
        std::string extra;
        if (!(ss >> s) || (ss >> extra))
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected two columns");
        rows.emplace_back(w, s);
    }
    SpectrumModel::tabulated(rows).validate();
    return rows;
}

double spectrum_value(const SpectrumModel& model, double omega) {
    model.validate();
    return model(omega);
}

CorrelationKind parse_correlation_kind(const std::string& name) {
    if (name == "full") return CorrelationKind::full;
    if (name == "diagonal") return CorrelationKind::diagonal;
    if (name == "window") return CorrelationKind::window;
    if (name == "custom") return CorrelationKind::custom;
    throw ValidationError("unknown correlation kind '" + name + "'");
}

std::string correlation_kind_name(CorrelationKind k) {
    switch (k) {
    case CorrelationKind::full: return "full";
    case CorrelationKind::diagonal: return "diagonal";
    case CorrelationKind::window: return "window";
    case CorrelationKind::custom: return "custom";
    }
    return "?";
}

CorrelationMatrix CorrelationMatrix::full(int n, double theta) {
    CorrelationMatrix c;
    c.kind = CorrelationKind::full;
    c.range = n;
    c.xi = Eigen::MatrixXd::Ones(n, n);
    c.theta = theta;
    return c;
}

CorrelationMatrix CorrelationMatrix::diagonal(int n) {
    CorrelationMatrix c;
    c.kind = CorrelationKind::diagonal;
    c.range = 1;
    c.xi = Eigen::MatrixXd::Identity(n, n);
    return c;
}

CorrelationMatrix CorrelationMatrix::window(int n, int r, double theta) {
    if (r < 1 || r > n) throw ValidationError("correlation window range must be in 1..n");
    CorrelationMatrix c;
    c.kind = CorrelationKind::window;
    c.range = r;
    c.xi = Eigen::MatrixXd::Identity(n, n);
    c.xi.topLeftCorner(r, r).setOnes();
    c.theta = theta;
    return c;
}

CorrelationMatrix CorrelationMatrix::custom(const Eigen::MatrixXd& xi, double theta) {
    CorrelationMatrix c;
    c.kind = CorrelationKind::custom;
    c.range = static_cast<int>(xi.rows());
    c.xi = xi;
    c.theta = theta;
    return c;
}

void CorrelationMatrix::validate() const {
    if (xi.rows() != xi.cols() || xi.rows() < 1) throw ValidationError("correlation matrix must be square");
    if (!std::isfinite(theta)) throw ValidationError("correlation theta must be finite");
    for (int a = 0; a < xi.rows(); ++a) {
        if (xi(a, a) != 1.0) throw ValidationError("correlation matrix diagonal must be 1");
        for (int b = 0; b < xi.cols(); ++b) {
            if (!std::isfinite(xi(a, b)) || std::abs(xi(a, b)) > 1.0)
                throw ValidationError("correlation entries must satisfy |xi| <= 1");
            if (xi(a, b) != xi(b, a)) throw ValidationError("correlation matrix must be symmetric");
        }
    }
}

cplx CorrelationMatrix::factor(int a, int b) const {
    const double x = xi(a, b);
    if (a == b || x == 0.0) return x;
    if (theta == 0.0) return x;
    return std::polar(x, a < b ? theta : -theta);
}

Coupling parse_coupling(const std::string& name) {
    if (name == "transverse") return Coupling::transverse;
    if (name == "longitudinal") return Coupling::longitudinal;
    throw ValidationError("unknown coupling '" + name + "'");
}

std::string coupling_name(Coupling c) {
    return c == Coupling::transverse ? "transverse" : "longitudinal";
}

void NoiseChannel::validate(int n) const {
    spectrum.validate();
    correlation.validate();
    if (correlation.size() != n) throw ValidationError("correlation matrix size does not match register");
}

RegisterConfig RegisterConfig::uniform(int n, double omega0) {
    return RegisterConfig{n, std::vector<double>(static_cast<std::size_t>(n), omega0)};
}

void RegisterConfig::validate() const {
    check_register(n);
    if (frequencies.size() != static_cast<std::size_t>(n))
        throw ValidationError("register.frequencies length must equal register.n");
    for (double w : frequencies)
        if (!std::isfinite(w) || w <= 0.0) throw ValidationError("register frequencies must be positive");
}

bool RegisterConfig::is_uniform(double tol) const {
    return std::all_of(frequencies.begin(), frequencies.end(),
                       [&](double w) { return std::abs(w - frequencies.front()) <= tol; });
}

cplx filter_function(double omega, double t) {
    if (t < 0.0) throw ValidationError("filter function requires t >= 0");
    const double x = omega * t;
    if (std::abs(x) < 1e-8) return {t - omega * omega * t * t * t / 6.0, -omega * t * t / 2.0};
    // (1 - e^{-ix}) / (i omega) = sin(x)/omega - i (1 - cos x)/omega
    return {std::sin(x) / omega, -2.0 * std::pow(std::sin(0.5 * x), 2) / omega};
}

namespace coeff {

RelaxationRates rates(cplx c, double wa, double wb, const PhiPair& pa, const PhiPair& pb, double t) {
    const cplx p12 = std::polar(1.0, (wb - wa) * t);
    const cplx p11 = std::polar(1.0, (wa + wb) * t);
    return {c * p12 * (pb.plus + std::conj(pa.plus)), c * std::conj(p12) * (pb.minus + std::conj(pa.minus)),
            c * p11 * (pb.plus + std::conj(pa.minus))};
}

void exchange(cplx c, double wa, double wb, const PhiPair& pa, const PhiPair& pb, double t, cplx& J1,
              cplx& J2, cplx& J3) {
    const cplx p12 = std::polar(1.0, (wb - wa) * t);
    const cplx p11 = std::polar(1.0, (wa + wb) * t);
    const cplx two_i(0.0, 2.0);
    J1 = c * p12 * (pb.plus - std::conj(pa.plus)) / two_i;
    J2 = c * std::conj(p12) * (pb.minus - std::conj(pa.minus)) / two_i;
    J3 = c * p11 * (pb.plus - std::conj(pa.minus)) / two_i;
}

} // namespace coeff

namespace {

void require(const NoiseChannel& ch, Coupling want, const char* op) {
    if (ch.coupling != want)
        throw ValidationError(std::string(op) + " requires a " + coupling_name(want) + " channel");
}

void check_sites(const NoiseChannel& ch, int alpha, int beta, std::size_t n_freqs) {
    const int n = ch.correlation.size();
    if (alpha < 1 || alpha > n || beta < 1 || beta > n)
        throw ValidationError("qubit index outside 1.." + std::to_string(n));
    if (n_freqs != 0 && n_freqs != static_cast<std::size_t>(n))
        throw ValidationError("frequency list length does not match correlation matrix");
}

coeff::PhiPair phi_pair(const SpectrumModel& s, double w, double t, const QuadratureOptions& opt) {
    return {FilterIntegral(s, w, opt)(t), FilterIntegral(s, -w, opt)(t)};
}

} // namespace

RelaxationRates relaxation_rates(const NoiseChannel& ch, const std::vector<double>& freqs, int alpha,
                                 int beta, double t, const QuadratureOptions& opt) {
    require(ch, Coupling::transverse, "relaxation_rates");
    check_sites(ch, alpha, beta, freqs.size());
    const cplx c = ch.correlation.factor(alpha - 1, beta - 1);
    if (c == 0.0 || ch.spectrum.is_zero() || t == 0.0) return {0.0, 0.0, 0.0};
    const double wa = freqs[alpha - 1], wb = freqs[beta - 1];
    const auto pa = phi_pair(ch.spectrum, wa, t, opt);
    const auto pb = alpha == beta ? pa : phi_pair(ch.spectrum, wb, t, opt);
    return coeff::rates(c, wa, wb, pa, pb, t);
}

cplx dephasing_rate(const NoiseChannel& ch, int alpha, int beta, double t, const QuadratureOptions& opt) {
    require(ch, Coupling::longitudinal, "dephasing_rate");
    check_sites(ch, alpha, beta, 0);
    const cplx c = ch.correlation.factor(alpha - 1, beta - 1);
    if (c == 0.0 || ch.spectrum.is_zero() || t == 0.0) return 0.0;
    return c * (2.0 * FilterIntegral(ch.spectrum, 0.0, opt)(t).real());
}

cplx zz_coupling(const NoiseChannel& ch, int alpha, int beta, double t, const QuadratureOptions& opt) {
    require(ch, Coupling::longitudinal, "zz_coupling");
    check_sites(ch, alpha, beta, 0);
    const cplx c = ch.correlation.factor(alpha - 1, beta - 1);
    if (c == 0.0 || ch.spectrum.is_zero() || t == 0.0) return 0.0;
    return c * FilterIntegral(ch.spectrum, 0.0, opt)(t).imag();
}

RelaxationHamiltonian pauli_form(cplx J1, cplx J2, cplx J3) {
    RelaxationHamiltonian h{J1, J2, J3, 0, 0, 0, 0};
    h.JXX = ((J1 + J2).real() + 2.0 * J3.real()) / 4.0;
    h.JYY = ((J1 + J2).real() - 2.0 * J3.real()) / 4.0;
    h.D = (J1 - J2).real() / 4.0;
    h.JXY = -J3.imag() / 2.0;
    return h;
}

RelaxationHamiltonian hamiltonian_coeffs(const NoiseChannel& ch, const std::vector<double>& freqs,
                                         int alpha, int beta, double t, const QuadratureOptions& opt) {
    require(ch, Coupling::transverse, "hamiltonian_coeffs");
    check_sites(ch, alpha, beta, freqs.size());
    const cplx c = ch.correlation.factor(alpha - 1, beta - 1);
    if (c == 0.0 || ch.spectrum.is_zero() || t == 0.0) return pauli_form(0.0, 0.0, 0.0);
    const double wa = freqs[alpha - 1], wb = freqs[beta - 1];
    const auto pa = phi_pair(ch.spectrum, wa, t, opt);
    const auto pb = alpha == beta ? pa : phi_pair(ch.spectrum, wb, t, opt);
    cplx J1, J2, J3;
    coeff::exchange(c, wa, wb, pa, pb, t, J1, J2, J3);
    return pauli_form(J1, J2, J3);
}

cplx q_factor(const NoiseChannel& ch, const std::vector<double>& freqs, int alpha, int beta, double t,
              bool markovian, const QuadratureOptions& opt) {
    require(ch, Coupling::transverse, "q_factor");
    check_sites(ch, alpha, beta, freqs.size());
    const RegisterConfig reg{static_cast<int>(freqs.size()), freqs};
    if (!reg.is_uniform()) throw ValidationError("q_factor requires uniform qubit frequencies");
    const double w0 = freqs.front();
    const cplx c_ab = ch.correlation.factor(alpha - 1, beta - 1);
    const cplx c_ba = ch.correlation.factor(beta - 1, alpha - 1);
    if (markovian) {
        ch.spectrum.validate();
        return (c_ab * ch.spectrum(w0) - c_ba * ch.spectrum(-w0)) / 2.0;
    }
    if (t == 0.0 || ch.spectrum.is_zero()) return 0.0;
    const double re_minus = FilterIntegral(ch.spectrum, -w0, opt)(t).real();
    const double re_plus = FilterIntegral(ch.spectrum, w0, opt)(t).real();
    return c_ab * re_minus - c_ba * re_plus;
}

} // namespace corrnoise
