// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "uavprop/electromagnetics.hpp"

namespace uavprop {

inline constexpr int kMaxReflectionDepth = 8;

struct TraceConfig {
    double ray_spacing_deg = 1.0;
    int max_reflections = 3;
    int l_max = 25;
    int ds_max_interactions = 2;  // surface interactions allowed on a diffuse path, the S included
    double tile_area = 1.0;       // m^2
    double frequency_hz = 60e9;
    double tx_power_dbm = 0.0;

    /// Specular face sequences up to this depth are enumerated exhaustively;
    /// deeper ones come from launch-grid (SBR) discovery.
    int exhaustive_reflections = 2;
    /// Diffraction paths whose knife-edge loss exceeds this are dropped.
    double diffraction_max_loss_db = 50.0;
    bool enable_diffraction = true;
    bool enable_diffuse = true;

    AntennaPattern tx_antenna = AntennaPattern::vertical_dipole();
    AntennaPattern rx_antenna = AntennaPattern::vertical_dipole();

    double wavelength_m() const { return wavelength(frequency_hz); }

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

nlohmann::json antenna_to_json(const AntennaPattern& antenna);
nlohmann::json trace_config_to_json(const TraceConfig& cfg);

} // namespace uavprop
