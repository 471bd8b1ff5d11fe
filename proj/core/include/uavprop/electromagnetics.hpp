// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <string>
#include <string_view>

#include "uavprop/vec3.hpp"

namespace uavprop {

inline constexpr double kSpeedOfLight = 299792458.0;      // m/s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12; // F/m
inline constexpr double kPi = 3.14159265358979323846;

/// Peak directivity of a half-wave dipole (2.156 dBi).
inline constexpr double kDipolePeakGain = 1.643;

inline double wavelength(double frequency_hz) { return kSpeedOfLight / frequency_hz; }

/// Surface material. Lossy permittivity is folded into one complex value;
/// magnetic materials are not modeled (mu_r = 1).
struct Material {
    std::string name;
    double eps_real = 1.0;      // relative permittivity
    double sigma = 0.0;         // conductivity, S/m
    bool is_pec = false;
    double scattering_s = 0.0;  // fraction of field amplitude diverted to diffuse scattering

    /// eta = eps_real - j*sigma/(2*pi*f*eps0).
    std::complex<double> complex_permittivity(double frequency_hz) const;

    /// Throws ConfigError when the invariants do not hold.
    void validate() const;

    bool operator==(const Material&) const = default;
};

inline constexpr double kDefaultConcreteScattering = 0.4;
inline constexpr double kDefaultMetalScattering = 0.2;

/// ITU-R P.2040 style material model. "concrete" is valid for 1-100 GHz and
/// yields eps_real 5.31, sigma = 0.0326 * f_GHz^0.8095; "metal" is a perfect conductor.
Material itu_material(std::string_view name, double frequency_hz);
Material itu_material(std::string_view name, double frequency_hz, double scattering_s);

/// Fresnel reflection coefficients, air to lossy half-space.
/// Convention: the TM basis vector is s x k on both sides of the interface,
/// which makes a perfect conductor return (te, tm) = (-1, +1).
struct FresnelCoefficients {
    std::complex<double> te;
    std::complex<double> tm;
};

FresnelCoefficients fresnel(const Material& material, double cos_theta_i, double frequency_hz);

/// Polarization-averaged power reflectivity (|te|^2 + |tm|^2) / 2.
double mean_power_reflectivity(const FresnelCoefficients& gamma);

enum class AntennaKind { HalfWaveDipole, Isotropic };

struct AntennaPattern {
    AntennaKind kind = AntennaKind::HalfWaveDipole;
    Vec3 axis{0.0, 0.0, 1.0};

    static AntennaPattern vertical_dipole() { return {}; }
    static AntennaPattern isotropic() { return {AntennaKind::Isotropic, {0.0, 0.0, 1.0}}; }
};

/// Linear power gain toward `dir`: 1.643 [cos(pi/2 cos t)/sin t]^2 for a dipole, 1 when isotropic.
double dipole_gain(const AntennaPattern& pattern, const Vec3& dir);

/// Largest value dipole_gain can take for this pattern.
double peak_gain(const AntennaPattern& pattern);

/// Unit polarization vector radiated (or accepted) along `dir`: the antenna
/// axis projected onto the plane transverse to `dir`. Isotropic patterns use
/// the same rule; when `dir` is parallel to the axis a fixed transverse vector is chosen.
Vec3 polarization_vector(const AntennaPattern& pattern, const Vec3& dir);

/// Upper bound over incidence angles of S^2 * mean|Gamma(theta)|^2 * cos(theta),
/// the material part of the Lambertian scattered power.
double max_scatter_factor(const Material& material, double frequency_hz);

/// Knife-edge diffraction loss J(nu) in dB; 0 for nu <= -0.78.
double knife_edge_loss(double nu);

/// Fresnel-Kirchhoff parameter nu = h sqrt(2 (d1 + d2) / (lambda d1 d2)).
double knife_edge_parameter(double clearance_h, double d1, double d2, double wavelength_m);

} // namespace uavprop
