// SPDX-License-Identifier: Apache-2.0
#include "uavprop/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "uavprop/canonical.hpp"
#include "uavprop/error.hpp"

namespace uavprop {

using nlohmann::json;

std::vector<VehicleModel> default_vehicle_models()
{
    return {
        {"entregas", 914.0, 914.0, 336.0, 24.5, "metal"},
        {"domestico", 289.5, 289.5, 196.0, 20.0, "metal"},
        {"rural", 716.0, 220.0, 236.0, 23.0, "metal"},
    };
}

double Route::length() const
{
    double total = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        total += distance(waypoints[i - 1], waypoints[i]);
    }
    return total;
}

Route Route::reversed() const
{
    Route r = *this;
    std::reverse(r.waypoints.begin(), r.waypoints.end());
    r.route_id += "-rev";
    return r;
}

void validate_route(const Route& route)
{
    const std::string where = "route '" + route.route_id + "'";
    if (route.waypoints.size() < 2) {
        throw ConfigError(where + ": needs at least 2 waypoints");
    }
    if (!(route.speed > 0.0) || !std::isfinite(route.speed)) {
        throw ConfigError(where + ": speed_mps must be positive");
    }
    for (std::size_t i = 0; i < route.waypoints.size(); ++i) {
        if (!is_finite(route.waypoints[i])) {
            throw ConfigError(where + ": non-finite waypoint");
        }
        if (i > 0 && route.waypoints[i] == route.waypoints[i - 1]) {
            throw ConfigError(where + ": consecutive waypoints must differ");
        }
    }
}

std::vector<Route> parse_routes(const json& doc)
{
    if (!doc.is_object() || !doc.contains("routes") || !doc.at("routes").is_array()) {
        throw ConfigError("routes: expected {\"routes\": [...]}");
    }
    std::vector<Route> routes;
    for (const auto& r : doc.at("routes")) {
        Route route;
        try {
            const auto& id = r.at("id");
            route.route_id = id.is_string() ? id.get<std::string>() : id.dump();
            route.speed = r.at("speed_mps").get<double>();
            for (const auto& w : r.at("waypoints")) {
                if (!w.is_array() || w.size() != 2) {
                    throw ConfigError("route '" + route.route_id + "': waypoints are [x, y] pairs");
                }
                route.waypoints.push_back({w[0].get<double>(), w[1].get<double>(), 0.0});
            }
        } catch (const json::exception& e) {
            throw ConfigError(std::string("routes: ") + e.what());
        }
        validate_route(route);
        routes.push_back(std::move(route));
    }
    return routes;
}

std::vector<Route> ingest_routes(const std::filesystem::path& path)
{
    return parse_routes(parse_json(read_text_file(path), path.string()));
}

json routes_to_json(const std::vector<Route>& routes)
{
    json arr = json::array();
    for (const auto& r : routes) {
        json wps = json::array();
        for (const auto& w : r.waypoints) {
            wps.push_back(json::array({w.x, w.y}));
        }
        arr.push_back({{"id", r.route_id}, {"speed_mps", r.speed}, {"waypoints", wps}});
    }
    return {{"routes", arr}};
}

PoseSample pose_at(const Route& route, double time)
{
    PoseSample pose;
    pose.time = time;
    double remaining = route.speed * time;
    const auto& w = route.waypoints;
    for (std::size_t i = 1; i < w.size(); ++i) {
        const Vec3 seg = w[i] - w[i - 1];
        const double len = norm(seg);
        pose.heading = seg / len;
        if (remaining <= len) {
            pose.position = w[i - 1] + pose.heading * remaining;
            return pose;
        }
        remaining -= len;
    }
    pose.position = w.back();
    return pose;
}

std::vector<PoseSample> sample_trajectory(const Route& route, double t_sam, double duration)
{
    if (!(t_sam > 0.0)) {
        throw ConfigError("t_sam must be positive");
    }
    validate_route(route);
    const auto steps = static_cast<long long>(std::floor(duration / t_sam + 1e-9));
    std::vector<PoseSample> samples;
    samples.reserve(static_cast<std::size_t>(std::max(0LL, steps) + 1));
    for (long long k = 0; k <= steps; ++k) {
        samples.push_back(pose_at(route, static_cast<double>(k) * t_sam));
    }
    return samples;
}

Placement place_uav(const PoseSample& pose, const VehicleModel& model, double altitude, double rx_offset,
                    int uav_id)
{
    const double length = model.length_mm / 1000.0;
    const double width = model.width_mm / 1000.0;
    const double height = model.height_mm / 1000.0;
    if (!(length > 0.0 && width > 0.0 && height > 0.0)) {
        throw ConfigError("vehicle model '" + model.name + "': dimensions must be positive");
    }
    const double rx_z = altitude - 0.5 * height - rx_offset;
    if (!(altitude > height) || !(rx_z > 0.0)) {
        throw ConfigError("altitude below ground clearance for model '" + model.name + "'");
    }
    Vec3 forward{pose.heading.x, pose.heading.y, 0.0};
    forward = norm(forward) > 0.0 ? normalized(forward) : Vec3{1.0, 0.0, 0.0};
    const Vec3 up{0.0, 0.0, 1.0};
    const Vec3 left = cross(up, forward);

    Placement p;
    p.uav_id = uav_id;
    p.body_center = {pose.position.x, pose.position.y, altitude};
    for (int i = 0; i < 8; ++i) {
        const double sx = (i & 1) ? 0.5 : -0.5;
        const double sy = (i & 2) ? 0.5 : -0.5;
        const double sz = (i & 4) ? 0.5 : -0.5;
        p.body_corners[static_cast<std::size_t>(i)] =
            p.body_center + forward * (sx * length) + left * (sy * width) + up * (sz * height);
    }
    p.rx_position = {pose.position.x, pose.position.y, rx_z};
    return p;
}

std::vector<VehicleModel> assign_models(int n_uavs, const std::vector<VehicleModel>& models, std::uint64_t seed)
{
    if (n_uavs < 1) {
        throw ConfigError("uav count must be at least 1");
    }
    if (models.empty()) {
        throw ConfigError("vehicle model list is empty");
    }
    std::mt19937_64 rng(seed);
    std::vector<VehicleModel> out;
    out.reserve(static_cast<std::size_t>(n_uavs));
    for (int i = 0; i < n_uavs; ++i) {
        out.push_back(models[static_cast<std::size_t>(rng() % models.size())]);
    }
    return out;
}

} // namespace uavprop
