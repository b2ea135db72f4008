#ifndef BLUE_GEOMETRY_HPP
#define BLUE_GEOMETRY_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace blue {

inline constexpr double kSpeedOfLight = 299792458.0;

struct Position3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double distance(const Position3D& a, const Position3D& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Uniform linear array description. `element_exponent` is the q of the
/// cos^q(theta) analytic element amplitude pattern.
struct ArraySpec {
    int num_elements = 1;
    double element_spacing = 0.0;     // meters; 0 means "set to lambda/2 at build time"
    double boresight_azimuth = 0.0;   // radians, direction of the array normal
    double element_exponent = 1.0;    // q >= 0

    void validate() const {
        if (num_elements < 1) throw std::invalid_argument("ArraySpec: num_elements must be >= 1");
        if (element_spacing <= 0.0) throw std::invalid_argument("ArraySpec: element_spacing must be > 0");
        if (element_exponent < 0.0) throw std::invalid_argument("ArraySpec: element_exponent must be >= 0");
    }
};

inline double wrap_angle(double a) {
    // wrap to (-pi, pi]
    const double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    else if (a > std::numbers::pi) a -= two_pi;
    return a;
}

/// Azimuth of the from->to direction measured from `boresight`, in (-pi, pi].
/// Elevation is ignored; the deployment is planar.
inline double azimuth_between(const Position3D& from, const Position3D& to, double boresight) {
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    if (dx == 0.0 && dy == 0.0 && to.z == from.z)
        throw std::invalid_argument("azimuth_between: coincident positions");
    return wrap_angle(std::atan2(dy, dx) - boresight);
}

/// ULA steering vector: entry i = exp(j*2*pi*(d/lambda)*i*sin(angle)).
inline Eigen::VectorXcd steering_vector(const ArraySpec& spec, double wavelength, double angle) {
    if (wavelength <= 0.0) throw std::invalid_argument("steering_vector: wavelength must be > 0");
    Eigen::VectorXcd v(spec.num_elements);
    const double phase_step = 2.0 * std::numbers::pi * (spec.element_spacing / wavelength) * std::sin(angle);
    for (int i = 0; i < spec.num_elements; ++i)
        v(i) = std::polar(1.0, phase_step * static_cast<double>(i));
    return v;
}

/// Analytic element amplitude pattern cos(angle)^q; zero outside |angle| < pi/2.
inline double element_gain(const ArraySpec& spec, double angle) {
    const double a = std::abs(wrap_angle(angle));
    if (a >= std::numbers::pi / 2.0) return 0.0;
    return std::pow(std::cos(a), spec.element_exponent);
}

} // namespace blue

#endif // BLUE_GEOMETRY_HPP
