// SPDX-License-Identifier: Apache-2.0
#include "uavprop/trace_config.hpp"

#include <cmath>

#include "uavprop/error.hpp"

namespace uavprop {

void TraceConfig::validate() const
{
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("trace." + field + ": " + why);
    };
    if (!(ray_spacing_deg > 0.0)) {
        fail("ray_spacing_deg", "must be positive");
    }
    const double k = 90.0 / ray_spacing_deg;
    if (std::fabs(k - std::round(k)) > 1e-9) {
        fail("ray_spacing_deg", "must divide 90 evenly");
    }
    if (max_reflections < 0 || max_reflections > kMaxReflectionDepth) {
        fail("max_reflections", "must be in [0, " + std::to_string(kMaxReflectionDepth) + "]");
    }
    if (l_max < 1) {
        fail("l_max", "must be >= 1");
    }
    if (ds_max_interactions < 1) {
        fail("ds_max_interactions", "must be >= 1");
    }
    if (!(tile_area > 0.0)) {
        fail("tile_area", "must be positive");
    }
    if (!(frequency_hz > 0.0)) {
        fail("frequency_hz", "must be positive");
    }
    if (!std::isfinite(tx_power_dbm)) {
        fail("tx_power_dbm", "must be finite");
    }
    if (exhaustive_reflections < 0) {
        fail("exhaustive_reflections", "must be >= 0");
    }
    if (!(diffraction_max_loss_db > 0.0)) {
        fail("diffraction_max_loss_db", "must be positive");
    }
}

nlohmann::json antenna_to_json(const AntennaPattern& antenna)
{
    return {{"kind", antenna.kind == AntennaKind::Isotropic ? "isotropic" : "dipole"},
            {"axis", {antenna.axis.x, antenna.axis.y, antenna.axis.z}}};
}

nlohmann::json trace_config_to_json(const TraceConfig& cfg)
{
    return {
        {"tx_antenna", antenna_to_json(cfg.tx_antenna)},
        {"rx_antenna", antenna_to_json(cfg.rx_antenna)},
        {"ray_spacing_deg", cfg.ray_spacing_deg},
        {"max_reflections", cfg.max_reflections},
        {"l_max", cfg.l_max},
        {"ds_max_interactions", cfg.ds_max_interactions},
        {"tile_area", cfg.tile_area},
        {"exhaustive_reflections", cfg.exhaustive_reflections},
        {"diffraction_max_loss_db", cfg.diffraction_max_loss_db},
        {"enable_diffraction", cfg.enable_diffraction},
        {"enable_diffuse", cfg.enable_diffuse},
    };
}

} // namespace uavprop
