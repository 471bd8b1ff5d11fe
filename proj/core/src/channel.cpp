// SPDX-License-Identifier: Apache-2.0
#include "uavprop/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "uavprop/error.hpp"

namespace uavprop {

namespace {

using Complex = std::complex<double>;
using Field = std::array<Complex, 3>;

Field to_field(const Vec3& v) { return {Complex{v.x}, Complex{v.y}, Complex{v.z}}; }

Complex project(const Field& e, const Vec3& v) { return e[0] * v.x + e[1] * v.y + e[2] * v.z; }

Field combine(const Vec3& a, Complex ca, const Vec3& b, Complex cb)
{
    return {a.x * ca + b.x * cb, a.y * ca + b.y * cb, a.z * ca + b.z * cb};
}

Vec3 any_perpendicular(const Vec3& d)
{
    const Vec3 helper = std::fabs(d.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    return normalized(cross(d, helper));
}

/// Cosine of the angle between a propagation direction and a surface normal.
double incidence_cosine(const Vec3& k, const Vec3& n) { return std::min(1.0, std::fabs(dot(k, n))); }

double reflection_power_factor(const Material& m, double cos_i, double f)
{
    const double s = m.scattering_s;
    return mean_power_reflectivity(fresnel(m, cos_i, f)) * (1.0 - s * s);
}

} // namespace

double diffuse_power_ratio(const RayPath& path, const Scene& scene, const TraceConfig& cfg)
{
    const auto pts = path.points();
    const double f = cfg.frequency_hz;
    const double lambda = cfg.wavelength_m();
    double r_in = 0.0;
    double r_out = 0.0;
    bool after = false;
    double factor = 1.0;
    double scatter = 0.0;
    for (std::size_t i = 0; i < path.interactions.size(); ++i) {
        const Interaction& it = path.interactions[i];
        const Vec3& here = pts[i + 1];
        const Vec3 k_in = normalized(here - pts[i]);
        const Vec3 k_out = normalized(pts[i + 2] - here);
        (after ? r_out : r_in) += distance(pts[i], here);
        const Face& face = scene.face(it.face_id);
        const Material& m = scene.material_of(face);
        const Vec3 n = face.normal();
        if (it.kind == InteractionKind::Scattering) {
            const double cos_i = incidence_cosine(k_in, n);
            const double cos_s = incidence_cosine(k_out, n);
            const double gamma2 = mean_power_reflectivity(fresnel(m, cos_i, f));
            const double s = m.scattering_s;
            scatter = s * s * gamma2 * it.tile_area * cos_i * cos_s;
            after = true;
        } else if (it.kind == InteractionKind::Reflection) {
            factor *= reflection_power_factor(m, incidence_cosine(k_in, n), f);
        } else {
            factor *= std::pow(10.0, -knife_edge_loss(it.nu) / 10.0);
        }
    }
    r_out += distance(pts[pts.size() - 2], pts.back());
    const double gt = dipole_gain(cfg.tx_antenna, path.departure_dir);
    const double gr = dipole_gain(cfg.rx_antenna, path.arrival_dir);
    return gt * gr * lambda * lambda * scatter * factor /
           (16.0 * kPi * kPi * kPi * r_in * r_in * r_out * r_out);
}

std::complex<double> path_amplitude(const RayPath& path, const Scene& scene, const TraceConfig& cfg)
{
    if (!(path.length > 0.0)) {
        throw std::invalid_argument("zero-length path");
    }
    const double lambda = cfg.wavelength_m();
    const double wavenumber = 2.0 * kPi / lambda;
    const Complex phase = std::polar(1.0, -wavenumber * path.length);

    if (path.has_kind(InteractionKind::Scattering)) {
        return std::sqrt(diffuse_power_ratio(path, scene, cfg)) * phase;
    }

    const auto pts = path.points();
    Vec3 k_in = normalized(pts[1] - pts[0]);
    Field e = to_field(polarization_vector(cfg.tx_antenna, k_in));
    for (std::size_t i = 0; i < path.interactions.size(); ++i) {
        const Interaction& it = path.interactions[i];
        const Vec3 k_out = normalized(pts[i + 2] - pts[i + 1]);
        if (it.kind == InteractionKind::Reflection) {
            const Face& face = scene.face(it.face_id);
            const Material& m = scene.material_of(face);
            const Vec3 n = face.normal();
            const auto gamma = fresnel(m, incidence_cosine(k_in, n), cfg.frequency_hz);
            const double keep = std::sqrt(1.0 - m.scattering_s * m.scattering_s);
            Vec3 s = cross(k_in, n);
            s = norm(s) > 1e-12 ? normalized(s) : any_perpendicular(k_in);
            const Vec3 p_in = cross(s, k_in);
            const Vec3 p_out = cross(s, k_out);
            const Complex es = project(e, s);
            const Complex ep = project(e, p_in);
            e = combine(s, gamma.te * keep * es, p_out, gamma.tm * keep * ep);
        } else if (it.kind == InteractionKind::Diffraction) {
            const double loss = std::pow(10.0, -knife_edge_loss(it.nu) / 20.0);
            const Complex along = project(e, k_out);
            for (int c = 0; c < 3; ++c) {
                e[static_cast<std::size_t>(c)] = (e[static_cast<std::size_t>(c)] - along * k_out[c]) * loss;
            }
        }
        k_in = k_out;
    }
    const Complex coupling = project(e, polarization_vector(cfg.rx_antenna, k_in));
    const double gt = dipole_gain(cfg.tx_antenna, path.departure_dir);
    const double gr = dipole_gain(cfg.rx_antenna, k_in);
    return std::sqrt(gt * gr) * coupling * (lambda / (4.0 * kPi * path.length)) * phase;
}

double path_delay_ns(const RayPath& path)
{
    if (!(path.length > 0.0)) {
        throw std::invalid_argument("degenerate path: non-positive length");
    }
    return path.length / kSpeedOfLight * 1e9;
}

void direction_angles(const Vec3& dir, double& azimuth_deg, double& elevation_deg)
{
    const Vec3 d = normalized(dir);
    double az = std::atan2(d.y, d.x) * 180.0 / kPi;
    if (az < 0.0) {
        az += 360.0;
    }
    if (az >= 360.0) {
        az = 0.0;
    }
    azimuth_deg = az;
    elevation_deg = std::asin(std::clamp(d.z, -1.0, 1.0)) * 180.0 / kPi;
}

PathAngles path_angles(const RayPath& path)
{
    PathAngles a;
    direction_angles(path.departure_dir, a.aod_az, a.aod_el);
    direction_angles(path.arrival_dir, a.aoa_az, a.aoa_el);
    return a;
}

PathMetrics compute_metrics(const RayPath& path, const Scene& scene, const TraceConfig& cfg)
{
    PathMetrics m;
    m.amplitude = path_amplitude(path, scene, cfg);
    m.power_dbm = 20.0 * std::log10(std::abs(m.amplitude)) + cfg.tx_power_dbm;
    m.delay_ns = path_delay_ns(path);
    m.angles = path_angles(path);
    m.los = path.is_los();
    return m;
}

double total_power_dbm(std::span<const std::complex<double>> amplitudes, CombineMode mode, double tx_power_dbm)
{
    if (amplitudes.empty()) {
        throw std::invalid_argument("total power of an empty path set");
    }
    double power = 0.0;
    if (mode == CombineMode::Coherent) {
        Complex sum{};
        for (const auto& a : amplitudes) {
            sum += a;
        }
        power = std::norm(sum);
    } else {
        for (const auto& a : amplitudes) {
            power += std::norm(a);
        }
    }
    return 10.0 * std::log10(power) + tx_power_dbm;
}

ArrayDescriptor ArrayDescriptor::from_json(const nlohmann::json& doc)
{
    ArrayDescriptor array;
    try {
        for (const auto& e : doc.at("elements")) {
            if (!e.is_array() || e.size() != 3) {
                throw ConfigError("array elements are [x, y, z] in wavelengths");
            }
            array.elements.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("array descriptor: ") + e.what());
    }
    if (array.elements.empty()) {
        throw ConfigError("array descriptor: no elements");
    }
    return array;
}

ArrayDescriptor ArrayDescriptor::uniform_linear(int count, double spacing_wavelengths, const Vec3& axis)
{
    ArrayDescriptor array;
    const Vec3 a = normalized(axis);
    for (int i = 0; i < count; ++i) {
        array.elements.push_back(a * (spacing_wavelengths * i));
    }
    return array;
}

nlohmann::json ArrayDescriptor::to_json() const
{
    nlohmann::json elems = nlohmann::json::array();
    for (const auto& e : elements) {
        elems.push_back({e.x, e.y, e.z});
    }
    return {{"elements", elems}};
}

Eigen::VectorXcd steering_vector(const ArrayDescriptor& array, const Vec3& dir)
{
    const Vec3 u = normalized(dir);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(array.elements.size()));
    for (std::size_t n = 0; n < array.elements.size(); ++n) {
        v(static_cast<Eigen::Index>(n)) = std::polar(1.0, 2.0 * kPi * dot(array.elements[n], u));
    }
    return v;
}

MimoChannel synthesize_mimo(std::span<const MimoPath> paths, const ArrayDescriptor& tx_array,
                            const ArrayDescriptor& rx_array, double frequency_hz)
{
    if (paths.empty()) {
        throw std::invalid_argument("MIMO synthesis needs at least one path");
    }
    MimoChannel h;
    h.frequency_hz = frequency_hz;
    h.tx_array = tx_array;
    h.rx_array = rx_array;
    h.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rx_array.elements.size()),
                                      static_cast<Eigen::Index>(tx_array.elements.size()));
    for (const auto& p : paths) {
        h.matrix += p.amplitude * steering_vector(rx_array, p.arrival_dir) *
                    steering_vector(tx_array, p.departure_dir).adjoint();
    }
    return h;
}

void EnergyCheck::merge(const EnergyCheck& other)
{
    interactions += other.interactions;
    violations += other.violations;
    max_sum = std::max(max_sum, other.max_sum);
}

void check_energy(const RayPath& path, const Scene& scene, const TraceConfig& cfg, EnergyCheck& tally)
{
    const auto pts = path.points();
    for (std::size_t i = 0; i < path.interactions.size(); ++i) {
        const Interaction& it = path.interactions[i];
        if (it.kind == InteractionKind::Diffraction) {
            continue;
        }
        const Face& face = scene.face(it.face_id);
        const Material& m = scene.material_of(face);
        const Vec3 k_in = normalized(pts[i + 1] - pts[i]);
        const auto gamma = fresnel(m, incidence_cosine(k_in, face.normal()), cfg.frequency_hz);
        const double s2 = m.scattering_s * m.scattering_s;
        for (const Complex g : {gamma.te, gamma.tm}) {
            const double g2 = std::norm(g);
            const double sum = g2 * (1.0 - s2) + s2 * g2;
            tally.max_sum = std::max(tally.max_sum, sum);
            if (sum > 1.0 + 1e-12) {
                ++tally.violations;
            }
        }
        ++tally.interactions;
    }
}

} // namespace uavprop
