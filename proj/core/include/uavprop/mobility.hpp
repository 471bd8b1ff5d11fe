// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavprop/vec3.hpp"

namespace uavprop {

/// Airframe described by its bounding box (millimeters) and top speed.
struct VehicleModel {
    std::string name;
    double length_mm = 0.0;
    double width_mm = 0.0;
    double height_mm = 0.0;
    double v_max = 0.0;  // m/s
    std::string material_id = "metal";

    bool operator==(const VehicleModel&) const = default;
};

/// The three airframes: entregas (delivery), domestico, rural.
std::vector<VehicleModel> default_vehicle_models();

/// Planar route; z of every waypoint is 0.
struct Route {
    std::string route_id;
    std::vector<Vec3> waypoints;
    double speed = 0.0;  // m/s

    double length() const;
    double duration() const { return length() / speed; }
    Route reversed() const;
};

struct PoseSample {
    double time = 0.0;
    Vec3 position;
    Vec3 heading{1.0, 0.0, 0.0};  // planar unit vector
};

struct Placement {
    int uav_id = 0;
    std::array<Vec3, 8> body_corners;  // index x + 2y + 4z over the body's local axes
    Vec3 body_center;
    Vec3 rx_position;
};

inline constexpr double kDefaultRxOffset = 0.05;  // antenna gap below the airframe, m

/// Parses `{ "routes": [{id, speed_mps, waypoints: [[x,y],...]}] }`.
std::vector<Route> parse_routes(const nlohmann::json& doc);
std::vector<Route> ingest_routes(const std::filesystem::path& path);
nlohmann::json routes_to_json(const std::vector<Route>& routes);

/// Throws ConfigError if the route breaks an invariant.
void validate_route(const Route& route);

/// Constant-speed piecewise-linear motion sampled at k * t_sam for
/// k = 0 .. floor(duration / t_sam). Position holds at the last waypoint.
std::vector<PoseSample> sample_trajectory(const Route& route, double t_sam, double duration);

/// Pose at an arbitrary time along the route.
PoseSample pose_at(const Route& route, double time);

/// Heading-aligned body box centered at (pose.xy, altitude); antenna `rx_offset` below its underside.
Placement place_uav(const PoseSample& pose, const VehicleModel& model, double altitude,
                    double rx_offset = kDefaultRxOffset, int uav_id = 0);

/// Seeded assignment of one model per UAV (mt19937_64, index = draw mod model count).
std::vector<VehicleModel> assign_models(int n_uavs, const std::vector<VehicleModel>& models,
                                        std::uint64_t seed);

} // namespace uavprop
