// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <cmath>
#include <random>

#include "uavprop/canonical.hpp"
#include "uavprop/electromagnetics.hpp"
#include "uavprop/error.hpp"
#include "uavprop/orchestrator.hpp"
#include "uavprop/scene.hpp"

namespace uavprop {

namespace {

using nlohmann::json;

constexpr double kLotCenters[5][2] = {{32.5, 32.5}, {72.5, 32.5}, {112.5, 32.5}, {32.5, 72.5}, {32.5, 112.5}};
constexpr double kFootprint = 30.0;
constexpr int kQuadrantSigns[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};

/// Uniform [0, 1) from the top 53 bits; identical on every platform.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

json route_json(const std::string& id, double speed, std::initializer_list<std::array<double, 2>> points)
{
    json waypoints = json::array();
    for (const auto& p : points) {
        waypoints.push_back({p[0], p[1]});
    }
    return {{"id", id}, {"speed_mps", speed}, {"waypoints", waypoints}};
}

} // namespace

Scenario generate_scenario(const ScenarioParams& params)
{
    const int per_quadrant = 5;
    if (params.building_count < 0 || params.building_count > 4 * per_quadrant) {
        throw ConfigError("building_count: must be in [0, 20]");
    }
    if (!(params.min_height > 0.0 && params.max_height >= params.min_height)) {
        throw ConfigError("building heights: need 0 < min_height <= max_height");
    }
    if (!(params.half_extent > 130.0)) {
        throw ConfigError("half_extent: must exceed 130 m to hold the building lots");
    }
    std::mt19937_64 rng(params.seed);

    const Material concrete = itu_material("concrete", 60e9, kDefaultConcreteScattering);
    const Material metal = itu_material("metal", 60e9, kDefaultMetalScattering);
    json scene;
    scene["materials"] = {{"itu_concrete_60ghz", material_to_json(concrete)}, {"metal", material_to_json(metal)}};

    json boxes = json::array();
    for (int b = 0; b < params.building_count; ++b) {
        const int q = b / per_quadrant;
        const auto& lot = kLotCenters[b % per_quadrant];
        const double cx = kQuadrantSigns[q][0] * lot[0];
        const double cy = kQuadrantSigns[q][1] * lot[1];
        const double height = params.min_height + (params.max_height - params.min_height) * unit_draw(rng);
        const double h = 0.5 * kFootprint;
        boxes.push_back({{"min", {cx - h, cy - h, 0.0}}, {"max", {cx + h, cy + h, height}},
                         {"material", "itu_concrete_60ghz"}});
    }
    scene["boxes"] = boxes;

    const double e = params.half_extent;
    scene["meshes"] = json::array({{{"material", "itu_concrete_60ghz"},
                                    {"vertices", {{-e, -e, 0.0}, {e, -e, 0.0}, {e, e, 0.0}, {-e, e, 0.0}}},
                                    {"triangles", {{0, 1, 2}, {0, 2, 3}}}}});

    // Slowest default airframe tops out at 20 m/s.
    std::array<double, 6> speed{};
    for (auto& s : speed) {
        s = 10.0 + 10.0 * unit_draw(rng);
    }
    json routes = json::array();
    routes.push_back(route_json("r0", speed[0], {{-10.0, 4.0}, {-140.0, 4.0}}));
    routes.push_back(route_json("r1", speed[1], {{10.0, -4.0}, {140.0, -4.0}}));
    routes.push_back(route_json("r2", speed[2], {{4.0, -20.0}, {4.0, 140.0}}));
    routes.push_back(route_json("r3", speed[3], {{-4.0, 20.0}, {-4.0, -140.0}}));
    routes.push_back(route_json("r4", speed[4], {{-30.0, -4.0}, {-4.0, -4.0}, {-4.0, 140.0}}));
    routes.push_back(route_json("r5", speed[5], {{30.0, 4.0}, {4.0, 4.0}, {4.0, -140.0}}));

    RunConfig cfg;
    cfg.seed = params.seed;
    cfg.uav_count = params.uav_count;
    cfg.scene_path = "scene.json";
    cfg.routes_path = "routes.json";

    Scenario out;
    out.scene = canonicalize(scene);
    out.routes = canonicalize(json{{"routes", routes}});
    out.config = cfg.to_json();
    return out;
}

void write_scenario(const Scenario& scenario, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir / "scene.json", canonical_dump(scenario.scene, 1) + "\n");
    write_text_file(out_dir / "routes.json", canonical_dump(scenario.routes, 1) + "\n");
    write_text_file(out_dir / "config.json", canonical_dump(scenario.config, 1) + "\n");
}

} // namespace uavprop
