// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "uavprop/paths.hpp"
#include "uavprop/scene.hpp"
#include "uavprop/trace_config.hpp"

namespace uavprop {

struct PathAngles {
    double aod_az = 0.0;  // degrees, CCW from +x, [0, 360)
    double aod_el = 0.0;  // degrees above horizontal, [-90, 90]
    double aoa_az = 0.0;
    double aoa_el = 0.0;
};

struct PathMetrics {
    double power_dbm = 0.0;
    std::complex<double> amplitude;  // received field relative to the transmitted one
    double delay_ns = 0.0;
    PathAngles angles;
    bool los = false;
};

/// Complex baseband gain of one path: antenna gains, free-space spreading,
/// phase e^{-j 2 pi d / lambda} and the product of interaction coefficients.
/// Reflections use Gamma * sqrt(1 - S^2) with TE/TM polarization tracking,
/// diffractions 10^(-J(nu)/20). Paths containing an S interaction use the
/// bistatic Lambertian power with the phase of their geometric length.
std::complex<double> path_amplitude(const RayPath& path, const Scene& scene, const TraceConfig& cfg);

/// Lambertian received power relative to the transmitted power (linear),
/// for a path holding exactly one S interaction.
double diffuse_power_ratio(const RayPath& path, const Scene& scene, const TraceConfig& cfg);

double path_delay_ns(const RayPath& path);

/// Azimuth/elevation of a unit direction in degrees.
void direction_angles(const Vec3& dir, double& azimuth_deg, double& elevation_deg);

PathAngles path_angles(const RayPath& path);

PathMetrics compute_metrics(const RayPath& path, const Scene& scene, const TraceConfig& cfg);

enum class CombineMode { Coherent, Noncoherent };

/// Aggregate received power in dBm. Throws std::invalid_argument on an empty set.
double total_power_dbm(std::span<const std::complex<double>> amplitudes, CombineMode mode,
                       double tx_power_dbm);

/// Element positions in wavelengths.
struct ArrayDescriptor {
    std::vector<Vec3> elements;

    static ArrayDescriptor from_json(const nlohmann::json& doc);
    static ArrayDescriptor uniform_linear(int count, double spacing_wavelengths, const Vec3& axis);
    nlohmann::json to_json() const;
};

struct MimoPath {
    std::complex<double> amplitude;
    Vec3 departure_dir;
    Vec3 arrival_dir;
};

struct MimoChannel {
    Eigen::MatrixXcd matrix;  // rows: rx elements, cols: tx elements
    double frequency_hz = 0.0;
    ArrayDescriptor tx_array;
    ArrayDescriptor rx_array;
};

/// Planar-wavefront steering vector v_n = exp(j 2 pi <p_n, u>).
Eigen::VectorXcd steering_vector(const ArrayDescriptor& array, const Vec3& dir);

/// H = sum_k a_k v_rx(arrival_k) v_tx(departure_k)^H. Throws std::invalid_argument on no paths.
MimoChannel synthesize_mimo(std::span<const MimoPath> paths, const ArrayDescriptor& tx_array,
                            const ArrayDescriptor& rx_array, double frequency_hz);

/// Running tally of |Gamma_eff|^2 + S^2 |Gamma|^2 over reflection and scattering interactions.
struct EnergyCheck {
    long long interactions = 0;
    long long violations = 0;
    double max_sum = 0.0;

    void merge(const EnergyCheck& other);
};

void check_energy(const RayPath& path, const Scene& scene, const TraceConfig& cfg, EnergyCheck& tally);

} // namespace uavprop
