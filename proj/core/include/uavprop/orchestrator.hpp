// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavprop/dataset.hpp"
#include "uavprop/mobility.hpp"
#include "uavprop/trace_config.hpp"
#include "uavprop/vec3.hpp"

namespace uavprop {

struct RunConfig {
    double frequency_hz = 60e9;
    double tx_power_dbm = 0.0;
    Vec3 tx_position{40.0, 11.5, 5.0};
    std::vector<double> altitudes{50.0, 100.0, 150.0};
    double t_sam = 0.1;
    double duration = 5.0;
    std::uint64_t seed = 42;
    std::filesystem::path scene_path = "scene.json";
    std::filesystem::path routes_path = "routes.json";
    std::filesystem::path output_dir = "dataset";
    int uav_count = 10;
    double rx_offset = kDefaultRxOffset;
    TraceConfig trace;
    std::map<std::string, double> scattering{{"itu_concrete_60ghz", kDefaultConcreteScattering},
                                             {"metal", kDefaultMetalScattering}};
    std::vector<VehicleModel> vehicle_models = default_vehicle_models();

    int scene_count() const;
    /// Canonical JSON; paths are written as given.
    nlohmann::json to_json() const;
    /// Throws ConfigError naming the field.
    void validate() const;
};

/// Strict parse: unknown keys and invalid values raise ConfigError with the field name.
/// Relative scene/routes paths resolve against `base_dir`.
RunConfig parse_config_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

struct ScenarioParams {
    std::uint64_t seed = 42;
    int building_count = 20;
    double min_height = 10.0;
    double max_height = 90.0;
    int uav_count = 10;
    double half_extent = 150.0;  // ground plane spans [-half_extent, half_extent]^2
};

struct Scenario {
    nlohmann::json scene;
    nlohmann::json routes;
    nlohmann::json config;  // RunConfig referencing scene.json / routes.json
};

/// Two orthogonal streets crossing at the origin, seeded building heights,
/// six routes along the streets, Tx on the sidewalk at 5 m.
Scenario generate_scenario(const ScenarioParams& params);

/// Writes scene.json, routes.json and config.json into `out_dir`.
void write_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

struct RunOptions {
    int parallel = 1;
    bool resume = false;
    /// Stop after this many newly traced scenes, leaving checkpoints behind (testing aid).
    std::optional<int> max_scenes;
    std::function<void(const std::string&)> log;
};

struct RunResult {
    Manifest manifest;
    bool complete = false;
    int scenes_traced = 0;
    int scenes_resumed = 0;
};

/// Full pipeline: per altitude an episode, per sample time a scene; sample
/// trajectories, place airframes, trace every receiver, rank the paths and
/// write the dataset. Per-scene checkpoints live in <out>/.partial until done.
RunResult run_simulation(const RunConfig& cfg, const RunOptions& opts = {});

} // namespace uavprop
