// rate_table.hpp — time-gridded dissipator coefficients with cubic interpolation
#pragma once

#include "corrnoise/spectra.hpp"

#include <memory>
#include <vector>

namespace corrnoise {

// Coefficient matrices for one channel at one time; 0-based (alpha, beta).
struct ChannelCoefficients {
    Coupling coupling = Coupling::transverse;
    // transverse
    Eigen::MatrixXcd g12, g21, g11, g22, J1, J2, J3;
    // longitudinal
    Eigen::MatrixXcd gphi, jzz;
};

struct CoefficientSet {
    double t = 0.0;
    std::vector<ChannelCoefficients> channels;
};

struct RateTableOptions {
    int threads = 1;
    QuadratureOptions quadrature;
};

// Stores the base integrals Phi(nu, t) for every frequency a channel needs.
// Inside the head, which covers the bath memory time and is where Phi changes
// fastest, queries go straight to the quadrature (a few microseconds each).
// Beyond it Phi is interpolated from a uniform grid of step dt_rate. A fine
// head grid of step dt_rate/20 is kept as well; it supplies the nodes for
// trapezoid sums over the rates.
// The oscillating phase factors exp(i(w_a +- w_b) t) are applied exactly at
// query time, so only the slowly varying part is ever interpolated.
class RateTable {
public:
    static RateTable build(const std::vector<NoiseChannel>& channels, const RegisterConfig& reg,
                           double t_max, double dt_rate, const RateTableOptions& opt = {});

    CoefficientSet coefficients_at(double t) const;
    // Interpolated Phi(nu, t) for a frequency the channel tabulated.
    cplx phi(std::size_t channel, double nu, double t) const;

    double t_max() const { return t_max_; }
    double dt_rate() const { return dt_body_; }
    double head_end() const { return head_end_; }
    double head_step() const { return dt_head_; }
    // Grid nodes covering [0, t]: head nodes first, body nodes after head_end.
    std::vector<double> nodes_up_to(double t) const;
    std::size_t channel_count() const { return channels_.size(); }
    const std::vector<NoiseChannel>& channels() const { return channels_; }
    const RegisterConfig& register_config() const { return reg_; }

private:
    struct Series {
        double nu = 0.0;
        std::shared_ptr<const FilterIntegral> exact;
        std::vector<cplx> body;
    };
    struct ChannelSeries {
        std::vector<Series> series;
        std::vector<int> plus_index, minus_index; // per qubit, into series
        int zero_index = -1;
    };

    const Series& find(std::size_t channel, double nu) const;
    cplx interpolate(const Series& s, double t) const;

    std::vector<NoiseChannel> channels_;
    RegisterConfig reg_;
    std::vector<ChannelSeries> data_;
    double t_max_ = 0.0, dt_body_ = 0.0, dt_head_ = 0.0, head_end_ = 0.0;
};

RateTable build_rate_table(const std::vector<NoiseChannel>& channels, const RegisterConfig& reg,
                           double t_max, double dt_rate, const RateTableOptions& opt = {});

} // namespace corrnoise
