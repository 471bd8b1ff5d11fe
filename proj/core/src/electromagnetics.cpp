// SPDX-License-Identifier: Apache-2.0
#include "uavprop/electromagnetics.hpp"

#include <algorithm>
#include <cmath>

#include "uavprop/error.hpp"

namespace uavprop {

std::complex<double> Material::complex_permittivity(double frequency_hz) const
{
    return {eps_real, -sigma / (2.0 * kPi * frequency_hz * kVacuumPermittivity)};
}

void Material::validate() const
{
    if (!is_pec && !(eps_real >= 1.0)) {
        throw ConfigError("material '" + name + "': eps_real must be >= 1 for a dielectric");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ConfigError("material '" + name + "': sigma must be finite and >= 0");
    }
    if (!(scattering_s >= 0.0 && scattering_s < 1.0)) {
        throw ConfigError("material '" + name + "': scattering_s must be in [0, 1)");
    }
}

Material itu_material(std::string_view name, double frequency_hz)
{
    if (name == "concrete") {
        return itu_material(name, frequency_hz, kDefaultConcreteScattering);
    }
    return itu_material(name, frequency_hz, kDefaultMetalScattering);
}

Material itu_material(std::string_view name, double frequency_hz, double scattering_s)
{
    Material m;
    m.name = std::string(name);
    m.scattering_s = scattering_s;
    if (name == "concrete") {
        const double f_ghz = frequency_hz / 1e9;
        if (!(f_ghz >= 1.0 && f_ghz <= 100.0)) {
            throw ConfigError("concrete model is valid from 1 to 100 GHz");
        }
        m.eps_real = 5.31;
        m.sigma = 0.0326 * std::pow(f_ghz, 0.8095);
    } else if (name == "metal") {
        if (!(frequency_hz > 0.0)) {
            throw ConfigError("frequency must be positive");
        }
        m.is_pec = true;
        m.eps_real = 1.0;
        m.sigma = 0.0;
    } else {
        throw ConfigError("unknown ITU material: " + std::string(name));
    }
    m.validate();
    return m;
}

FresnelCoefficients fresnel(const Material& material, double cos_theta_i, double frequency_hz)
{
    if (material.is_pec) {
        return {{-1.0, 0.0}, {1.0, 0.0}};
    }
    const double c = std::clamp(cos_theta_i, 0.0, 1.0);
    const std::complex<double> eta = material.complex_permittivity(frequency_hz);
    const std::complex<double> root = std::sqrt(eta - (1.0 - c * c));
    FresnelCoefficients g;
    g.te = (c - root) / (c + root);
    g.tm = (eta * c - root) / (eta * c + root);
    return g;
}

double mean_power_reflectivity(const FresnelCoefficients& gamma)
{
    return 0.5 * (std::norm(gamma.te) + std::norm(gamma.tm));
}

double dipole_gain(const AntennaPattern& pattern, const Vec3& dir)
{
    if (pattern.kind == AntennaKind::Isotropic) {
        return 1.0;
    }
    const double c = std::clamp(dot(normalized(dir), normalized(pattern.axis)), -1.0, 1.0);
    const double s2 = 1.0 - c * c;
    if (s2 < 1e-18) {
        return 0.0;
    }
    const double lobe = std::cos(0.5 * kPi * c);
    return kDipolePeakGain * lobe * lobe / s2;
}

double peak_gain(const AntennaPattern& pattern)
{
    return pattern.kind == AntennaKind::Isotropic ? 1.0 : kDipolePeakGain;
}

Vec3 polarization_vector(const AntennaPattern& pattern, const Vec3& dir)
{
    const Vec3 d = normalized(dir);
    const Vec3 axis = normalized(pattern.axis);
    const Vec3 p = axis - d * dot(axis, d);
    if (norm(p) > 1e-12) {
        return normalized(p);
    }
    const Vec3 helper = std::fabs(d.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    return normalized(cross(d, helper));
}

double knife_edge_loss(double nu)
{
    if (!(nu > -0.78)) {
        return 0.0;
    }
    const double v = nu - 0.1;
    return 6.9 + 20.0 * std::log10(std::sqrt(v * v + 1.0) + v);
}

double knife_edge_parameter(double clearance_h, double d1, double d2, double wavelength_m)
{
    return clearance_h * std::sqrt(2.0 * (d1 + d2) / (wavelength_m * d1 * d2));
}

double max_scatter_factor(const Material& material, double frequency_hz)
{
    const double s2 = material.scattering_s * material.scattering_s;
    if (s2 == 0.0) {
        return 0.0;
    }
    // |Gamma|^2 cos is smooth in cos; a fine grid plus a small margin bounds it.
    constexpr int kSteps = 2000;
    double best = 0.0;
    for (int k = 0; k <= kSteps; ++k) {
        const double c = static_cast<double>(k) / kSteps;
        best = std::max(best, mean_power_reflectivity(fresnel(material, c, frequency_hz)) * c);
    }
    return s2 * std::min(1.0, best * 1.01);
}

} // namespace uavprop
