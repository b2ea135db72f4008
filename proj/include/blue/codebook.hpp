#ifndef BLUE_CODEBOOK_HPP
#define BLUE_CODEBOOK_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "blue/channel.hpp"
#include "blue/geometry.hpp"

namespace blue {

/// Finite search sets for the per-slot exhaustive optimization.
struct Codebooks {
    std::vector<Eigen::VectorXcd> precoders;  // unit power, N_u x 1
    std::vector<Eigen::VectorXcd> combiners;  // unit power, N_a x 1
    std::vector<RisProfile> ris_profiles;     // unit-modulus phase vectors
    std::vector<double> precoder_angles;      // grid angle behind each entry
    std::vector<double> combiner_angles;
    std::vector<double> ris_target_angles;
};

inline std::vector<double> angle_grid(double start_rad, double stop_rad, double step_rad) {
    std::vector<double> g;
    for (double a = start_rad; a <= stop_rad + 1e-12; a += step_rad) g.push_back(a);
    return g;
}

/// One element-gain-weighted, unit-power steered beam per grid angle.
inline std::vector<Eigen::VectorXcd> build_beam_codebook(const ArraySpec& spec, double wavelength,
                                                         const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("build_beam_codebook: empty angle grid");
    std::vector<Eigen::VectorXcd> book;
    book.reserve(grid.size());
    for (double a : grid) {
        Eigen::VectorXcd v = element_gain(spec, a) * steering_vector(spec, wavelength, a);
        const double n = v.norm();
        if (n <= 0.0) throw std::invalid_argument("build_beam_codebook: angle outside element pattern support");
        book.push_back(v / n);
    }
    return book;
}

/// Anomalous-reflection linear phase gradients: profile for target angle psi has
/// theta_i = -2pi(d/lambda) * i * (sin psi + sin incident) mod 2pi, so a wave
/// impinging from `incident_azimuth` is retargeted toward psi. `quant_bits` = 0
/// keeps phases continuous.
inline std::vector<RisProfile> build_ris_codebook(const ArraySpec& spec, double wavelength,
                                                  double incident_azimuth,
                                                  const std::vector<double>& reflection_grid,
                                                  int quant_bits = 0) {
    if (reflection_grid.empty()) throw std::invalid_argument("build_ris_codebook: empty angle grid");
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<RisProfile> book;
    book.reserve(reflection_grid.size());
    for (double psi : reflection_grid) {
        RisProfile prof;
        prof.phases.resize(static_cast<size_t>(spec.num_elements));
        const double grad = -two_pi * (spec.element_spacing / wavelength) * (std::sin(psi) + std::sin(incident_azimuth));
        for (int i = 0; i < spec.num_elements; ++i) {
            double th = std::fmod(grad * static_cast<double>(i), two_pi);
            if (th < 0.0) th += two_pi;
            if (quant_bits > 0) {
                const double levels = static_cast<double>(1 << quant_bits);
                th = std::round(th / two_pi * levels) / levels * two_pi;
                if (th >= two_pi) th -= two_pi;
            }
            prof.phases[static_cast<size_t>(i)] = th;
        }
        book.push_back(std::move(prof));
    }
    return book;
}

/// Far-field power of a RIS phase profile toward scan angle phi, for a wave
/// incident from `incident_azimuth`: |sum_i e^{j(theta_i + kd i (sin inc + sin phi))}|^2.
inline double ris_scan_power(const RisProfile& prof, const ArraySpec& spec, double wavelength,
                             double incident_azimuth, double phi) {
    const double kd = 2.0 * std::numbers::pi * spec.element_spacing / wavelength;
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < prof.phases.size(); ++i)
        acc += std::polar(1.0, prof.phases[i] + kd * static_cast<double>(i) * (std::sin(incident_azimuth) + std::sin(phi)));
    return std::norm(acc);
}

} // namespace blue

#endif // BLUE_CODEBOOK_HPP
