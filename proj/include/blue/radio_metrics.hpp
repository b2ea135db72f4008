#ifndef BLUE_RADIO_METRICS_HPP
#define BLUE_RADIO_METRICS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "blue/geometry.hpp"

namespace blue {

struct RadioConfig {
    double bandwidth_hz = 800e6;       // W
    double noise_psd_w_hz = 3.9810717055349565e-21; // N_0, -174 dBm/Hz
    double wavelength_m = kSpeedOfLight / 28e9;
    double max_tx_power_w = 0.1;       // P_tx^max

    double noise_power_w() const { return noise_psd_w_hz * bandwidth_hz; }

    void validate() const {
        if (bandwidth_hz <= 0.0 || noise_psd_w_hz <= 0.0 || wavelength_m <= 0.0 || max_tx_power_w < 0.0)
            throw std::invalid_argument("RadioConfig: parameters must be positive");
    }
};

/// Spatial cells where exposure is evaluated, with their objective weights.
struct PixelSet {
    std::vector<Position3D> positions;
    std::vector<double> weights;

    void validate() const {
        if (positions.size() != weights.size())
            throw std::invalid_argument("PixelSet: positions/weights length mismatch");
        bool any = false;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("PixelSet: negative weight");
            if (w > 0.0) any = true;
        }
        if (!any) throw std::invalid_argument("PixelSet: at least one weight must be > 0");
    }
};

/// R_u = W log2(1 + |w_a^H H w_u|^2 P / (N_0 W)), bits/s.
inline double uplink_rate(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& w_u,
                          const Eigen::VectorXcd& w_a, double p_tx, const RadioConfig& cfg) {
    if (p_tx < 0.0) throw std::invalid_argument("uplink_rate: negative power");
    const std::complex<double> g = w_a.adjoint() * H * w_u;
    const double snr = std::norm(g) * p_tx / cfg.noise_power_w();
    return cfg.bandwidth_hz * std::log2(1.0 + snr);
}

/// Incident power density at a pixel: (4pi/lambda^2) P |h_p w_u|^2, W/m^2.
inline double pixel_power_density(const Eigen::RowVectorXcd& h_p, const Eigen::VectorXcd& w_u,
                                  double p_tx, const RadioConfig& cfg) {
    if (p_tx < 0.0) throw std::invalid_argument("pixel_power_density: negative power");
    const std::complex<double> g = h_p * w_u;
    return 4.0 * std::numbers::pi / (cfg.wavelength_m * cfg.wavelength_m) * p_tx * std::norm(g);
}

/// Instantaneous weighted pixel sum; the long-term averaging lives in the simulator.
inline double weighted_emfe(const std::vector<double>& densities, const PixelSet& pixels) {
    if (densities.size() != pixels.weights.size())
        throw std::invalid_argument("weighted_emfe: length mismatch");
    double s = 0.0;
    for (size_t p = 0; p < densities.size(); ++p) s += pixels.weights[p] * densities[p];
    return s;
}

inline double w_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

} // namespace blue

#endif // BLUE_RADIO_METRICS_HPP
