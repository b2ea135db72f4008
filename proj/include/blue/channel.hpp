#ifndef BLUE_CHANNEL_HPP
#define BLUE_CHANNEL_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "blue/geometry.hpp"

namespace blue {


/// Rician small-scale + power-law large-scale fading parameters for one link class.
struct RicianParams {
    double carrier_frequency_hz = 28e9;
    double k_factor = 10.0;           // linear LOS/NLOS power ratio; may be +inf
    double pathloss_exponent = 2.0;
    double reference_pathloss = 1.0;  // dimensionless multiplier at 1 m

    double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }

    void validate() const {
        if (carrier_frequency_hz <= 0.0) throw std::invalid_argument("RicianParams: carrier_frequency must be > 0");
        if (k_factor < 0.0) throw std::invalid_argument("RicianParams: k_factor must be >= 0");
        if (pathloss_exponent < 2.0) throw std::invalid_argument("RicianParams: pathloss_exponent must be >= 2");
        if (reference_pathloss <= 0.0) throw std::invalid_argument("RicianParams: reference_pathloss must be > 0");
    }
};

/// Free-space-anchored power law: PL(d) = ref * (lambda/4pi)^2 / d^n.
/// With ref = 1 and n = 2 this is the Friis |h|^2 at distance d.
inline double path_loss(const RicianParams& p, double d) {
    const double fs = p.wavelength() / (4.0 * std::numbers::pi);
    return p.reference_pathloss * fs * fs / std::pow(d, p.pathloss_exponent);
}

/// Per-link-class channel parameters. All links share the carrier; the RIS-adjacent
/// links carry their own reference gains (RIS element aperture is folded in there).
struct ChannelModel {
    RicianParams direct;
    RicianParams ue_ris;
    RicianParams ris_ap;
    RicianParams ue_pixel;
    RicianParams ris_pixel;

    double wavelength() const { return direct.wavelength(); }

    void validate() const {
        direct.validate(); ue_ris.validate(); ris_ap.validate();
        ue_pixel.validate(); ris_pixel.validate();
    }
};

/// Unit-modulus per-element RIS phase configuration (the diagonal of Theta).
struct RisProfile {
    std::vector<double> phases; // radians in [0, 2pi)
};

/// One slot's realization of every channel block.
struct SlotChannels {
    Eigen::MatrixXcd H_direct;   // N_a x N_u
    Eigen::MatrixXcd H_ue_ris;   // M x N_u
    Eigen::MatrixXcd H_ris_ap;   // N_a x M
    std::vector<Eigen::RowVectorXcd> h_direct_pixel; // 1 x N_u each
    std::vector<Eigen::RowVectorXcd> h_ris_pixel;    // 1 x M each
};

/// Node placement and array descriptions for one scenario.
struct ChannelGeometry {
    Position3D ue, ap, ris;
    std::vector<Position3D> pixels;
    ArraySpec ue_array, ap_array, ris_array;
};

namespace detail {

inline std::complex<double> cn01(std::mt19937_64& rng) {
    // circularly-symmetric complex Gaussian, unit variance
    static constexpr double inv_sqrt2 = 0.70710678118654752440;
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    const double im = n(rng);
    return {re * inv_sqrt2, im * inv_sqrt2};
}

struct RicianWeights {
    double los, nlos;
};

inline RicianWeights rician_weights(double k) {
    if (std::isinf(k)) return {1.0, 0.0};
    return {std::sqrt(k / (k + 1.0)), std::sqrt(1.0 / (k + 1.0))};
}

/// Array-to-array Rician block: sqrt(PL) * (w_los * g_r*g_t*a_r*a_t^H + w_nlos * G),
/// G with i.i.d. CN(0,1) entries. Element gains weight only the LOS component.
inline Eigen::MatrixXcd rician_block(const ArraySpec& rx, const Position3D& rx_pos,
                                     const ArraySpec& tx, const Position3D& tx_pos,
                                     const RicianParams& params, std::mt19937_64& rng) {
    const double lambda = params.wavelength();
    const double d = distance(rx_pos, tx_pos);
    if (d == 0.0) throw std::invalid_argument("rician_block: coincident nodes");
    const double aoa = azimuth_between(rx_pos, tx_pos, rx.boresight_azimuth);
    const double aod = azimuth_between(tx_pos, rx_pos, tx.boresight_azimuth);
    const Eigen::VectorXcd a_r = steering_vector(rx, lambda, aoa);
    const Eigen::VectorXcd a_t = steering_vector(tx, lambda, aod);
    const double g = element_gain(rx, aoa) * element_gain(tx, aod);
    const auto w = rician_weights(params.k_factor);
    Eigen::MatrixXcd h = (w.los * g) * (a_r * a_t.adjoint());
    for (int c = 0; c < h.cols(); ++c)
        for (int r = 0; r < h.rows(); ++r)
            h(r, c) += w.nlos * cn01(rng);
    return std::sqrt(path_loss(params, d)) * h;
}

/// Array-to-point Rician row (the point receiver is isotropic).
inline Eigen::RowVectorXcd rician_row(const Position3D& rx_pos,
                                      const ArraySpec& tx, const Position3D& tx_pos,
                                      const RicianParams& params, std::mt19937_64& rng) {
    const double lambda = params.wavelength();
    const double d = distance(rx_pos, tx_pos);
    if (d == 0.0) throw std::invalid_argument("rician_row: coincident nodes");
    const double aod = azimuth_between(tx_pos, rx_pos, tx.boresight_azimuth);
    const Eigen::VectorXcd a_t = steering_vector(tx, lambda, aod);
    const double g = element_gain(tx, aod);
    const auto w = rician_weights(params.k_factor);
    Eigen::RowVectorXcd h = (w.los * g) * a_t.adjoint();
    for (int c = 0; c < h.cols(); ++c)
        h(c) += w.nlos * cn01(rng);
    return std::sqrt(path_loss(params, d)) * h;
}

} // namespace detail

/// Draw one slot's realization of all five channel blocks. Deterministic for a
/// fixed rng state; blocks are drawn in a fixed order.
inline SlotChannels generate_slot_channels(const ChannelGeometry& geo, const ChannelModel& model,
                                           std::mt19937_64& rng) {
    SlotChannels ch;
    ch.H_direct = detail::rician_block(geo.ap_array, geo.ap, geo.ue_array, geo.ue, model.direct, rng);
    ch.H_ue_ris = detail::rician_block(geo.ris_array, geo.ris, geo.ue_array, geo.ue, model.ue_ris, rng);
    ch.H_ris_ap = detail::rician_block(geo.ap_array, geo.ap, geo.ris_array, geo.ris, model.ris_ap, rng);
    ch.h_direct_pixel.reserve(geo.pixels.size());
    ch.h_ris_pixel.reserve(geo.pixels.size());
    for (const auto& px : geo.pixels) {
        ch.h_direct_pixel.push_back(detail::rician_row(px, geo.ue_array, geo.ue, model.ue_pixel, rng));
        ch.h_ris_pixel.push_back(detail::rician_row(px, geo.ris_array, geo.ris, model.ris_pixel, rng));
    }
    return ch;
}

inline Eigen::VectorXcd ris_diagonal(const RisProfile& ris) {
    Eigen::VectorXcd d(static_cast<Eigen::Index>(ris.phases.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i)
        d(i) = std::polar(1.0, ris.phases[static_cast<size_t>(i)]);
    return d;
}

/// H = H_d + H_ra * diag(e^{j theta}) * H_ur.
inline Eigen::MatrixXcd compose_e2e(const SlotChannels& ch, const RisProfile& ris) {
    if (static_cast<Eigen::Index>(ris.phases.size()) != ch.H_ue_ris.rows() ||
        ch.H_ris_ap.cols() != ch.H_ue_ris.rows() || ch.H_ris_ap.rows() != ch.H_direct.rows() ||
        ch.H_ue_ris.cols() != ch.H_direct.cols())
        throw std::invalid_argument("compose_e2e: dimension mismatch");
    return ch.H_direct + ch.H_ris_ap * ris_diagonal(ris).asDiagonal() * ch.H_ue_ris;
}

/// h_p = h_dp + h_rp * diag(e^{j theta}) * H_ur.
inline Eigen::RowVectorXcd compose_pixel(const SlotChannels& ch, const RisProfile& ris, size_t p) {
    if (p >= ch.h_direct_pixel.size()) throw std::out_of_range("compose_pixel: pixel index out of range");
    if (static_cast<Eigen::Index>(ris.phases.size()) != ch.H_ue_ris.rows())
        throw std::invalid_argument("compose_pixel: dimension mismatch");
    return ch.h_direct_pixel[p] + ch.h_ris_pixel[p] * ris_diagonal(ris).asDiagonal() * ch.H_ue_ris;
}

} // namespace blue

#endif // BLUE_CHANNEL_HPP
