// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavprop/vec3.hpp"

namespace uavprop {

struct EpisodeRecord {
    std::int64_t episode_id = 0;
    double altitude = 0.0;
    nlohmann::json config;  // run configuration snapshot
    int scene_count = 0;

    bool operator==(const EpisodeRecord&) const = default;
};

struct PoseRecord {
    int uav_id = 0;
    Vec3 position;
    Vec3 heading;

    bool operator==(const PoseRecord&) const = default;
};

struct SceneRecord {
    std::int64_t scene_id = 0;
    std::int64_t episode_id = 0;
    double time = 0.0;
    std::vector<PoseRecord> poses;

    bool operator==(const SceneRecord&) const = default;
};

struct ReceiverRecord {
    std::int64_t receiver_id = 0;
    std::int64_t scene_id = 0;
    int uav_id = 0;
    Vec3 rx_position;
    std::optional<double> total_power_coherent;     // dBm, empty on outage
    std::optional<double> total_power_noncoherent;  // dBm, empty on outage
    bool los = false;
    int ray_count = 0;

    bool operator==(const ReceiverRecord&) const = default;
};

struct InteractionRecord {
    char kind = 'R';
    Vec3 point;
    int face_id = -1;
    int edge_id = -1;

    bool operator==(const InteractionRecord&) const = default;
};

struct RayRecord {
    std::int64_t ray_id = 0;
    std::int64_t receiver_id = 0;
    double power = 0.0;  // dBm
    double delay = 0.0;  // ns
    double aod_az = 0.0;
    double aod_el = 0.0;
    double aoa_az = 0.0;
    double aoa_el = 0.0;
    bool los = false;
    std::complex<double> amplitude;
    std::string signature;
    std::vector<InteractionRecord> interactions;

    bool operator==(const RayRecord&) const = default;
};

/// Episodes -> scenes -> receivers -> rays, each table in id order.
struct Dataset {
    std::vector<EpisodeRecord> episodes;
    std::vector<SceneRecord> scenes;
    std::vector<ReceiverRecord> receivers;
    std::vector<RayRecord> rays;
    nlohmann::json run_config = nlohmann::json::object();  // hashed into the manifest
    nlohmann::json metadata = nlohmann::json::object();    // copied into the manifest verbatim

    bool operator==(const Dataset&) const = default;
};

inline constexpr const char* kEpisodesFile = "episodes.jsonl";
inline constexpr const char* kScenesFile = "scenes.jsonl";
inline constexpr const char* kReceiversFile = "receivers.jsonl";
inline constexpr const char* kRaysFile = "rays.jsonl";
inline constexpr const char* kManifestFile = "manifest.json";

struct Manifest {
    std::size_t episodes = 0;
    std::size_t scenes = 0;
    std::size_t receivers = 0;
    std::size_t rays = 0;
    std::string config_hash;
    std::string dataset_hash;  // sha256 over the four table files in fixed order
    nlohmann::json json;
};

/// Throws IntegrityError on dangling references, duplicate ids, unsorted rays
/// or ray_count mismatches.
void validate_integrity(const Dataset& dataset);

nlohmann::json to_json(const EpisodeRecord& r);
nlohmann::json to_json(const SceneRecord& r);
nlohmann::json to_json(const ReceiverRecord& r);
nlohmann::json to_json(const RayRecord& r);
EpisodeRecord episode_from_json(const nlohmann::json& j);
SceneRecord scene_from_json(const nlohmann::json& j);
ReceiverRecord receiver_from_json(const nlohmann::json& j);
RayRecord ray_from_json(const nlohmann::json& j);

/// Writes one JSONL file per table plus manifest.json.
Manifest write_dataset(const Dataset& dataset, const std::filesystem::path& out_dir);
Dataset read_dataset(const std::filesystem::path& dir);
Manifest read_manifest(const std::filesystem::path& dir);

/// CREATE TABLE statements for episodes, scenes, receivers and rays.
std::string export_sql_ddl();
/// INSERT statements in parent-before-child order.
std::string export_sql_inserts(const Dataset& dataset);
/// DDL followed by the inserts, wrapped in a transaction.
std::string export_sql(const Dataset& dataset);

enum class PlotMetric { Power, Delay };

/// CSV `time_s,strongest,aggregate`. Power: strongest-ray dBm and noncoherent
/// total; delay: strongest-ray delay and power-weighted mean delay (ns).
/// Outage scenes have empty values; a UAV with no rays at all yields the header only.
std::string emit_plot_data(const Dataset& dataset, int uav_id, std::int64_t episode_id,
                           PlotMetric metric);

struct RayFilter {
    std::optional<std::int64_t> episode_id;
    std::optional<std::int64_t> scene_id;
    std::optional<std::int64_t> receiver_id;
};

std::vector<RayRecord> query_rays(const Dataset& dataset, const RayFilter& filter);

} // namespace uavprop
