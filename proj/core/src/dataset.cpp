// SPDX-License-Identifier: Apache-2.0
#include "uavprop/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "uavprop/canonical.hpp"
#include "uavprop/error.hpp"

namespace uavprop {

namespace {

using nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j)
{
    if (!j.is_array() || j.size() != 3) {
        throw Error("expected [x, y, z]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j)
{
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<double>();
}

template <typename Record>
std::string to_jsonl(const std::vector<Record>& records)
{
    std::string out;
    for (const auto& r : records) {
        out += canonical_dump(to_json(r));
        out.push_back('\n');
    }
    return out;
}

template <typename Record, typename Parse>
std::vector<Record> from_jsonl(const std::filesystem::path& path, Parse parse)
{
    std::vector<Record> records;
    std::istringstream in(read_text_file(path));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            records.push_back(parse(json::parse(line)));
        } catch (const json::exception& e) {
            throw Error(path.filename().string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(path.filename().string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

void require_finite(double v, const std::string& what)
{
    if (!std::isfinite(v)) {
        throw IntegrityError(what + " is not finite");
    }
}

void require_finite(const Vec3& v, const std::string& what)
{
    if (!is_finite(v)) {
        throw IntegrityError(what + " is not finite");
    }
}

template <typename Record, typename Id>
std::set<std::int64_t> unique_ids(const std::vector<Record>& records, Id id, const std::string& table)
{
    std::set<std::int64_t> ids;
    for (const auto& r : records) {
        if (!ids.insert(id(r)).second) {
            throw IntegrityError(table + ": duplicate id " + std::to_string(id(r)));
        }
    }
    return ids;
}

std::string table_bytes(const Dataset& ds, const char* file)
{
    const std::string name = file;
    if (name == kEpisodesFile) {
        return to_jsonl(ds.episodes);
    }
    if (name == kScenesFile) {
        return to_jsonl(ds.scenes);
    }
    if (name == kReceiversFile) {
        return to_jsonl(ds.receivers);
    }
    return to_jsonl(ds.rays);
}

Manifest manifest_from_json(const json& doc)
{
    Manifest m;
    try {
        const json& counts = doc.at("counts");
        m.episodes = counts.at("episodes").get<std::size_t>();
        m.scenes = counts.at("scenes").get<std::size_t>();
        m.receivers = counts.at("receivers").get<std::size_t>();
        m.rays = counts.at("rays").get<std::size_t>();
        m.config_hash = doc.at("config_hash").get<std::string>();
        m.dataset_hash = doc.at("dataset_hash").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(std::string("manifest: ") + e.what());
    }
    m.json = doc;
    return m;
}

} // namespace

void validate_integrity(const Dataset& ds)
{
    const auto episodes = unique_ids(ds.episodes, [](const EpisodeRecord& r) { return r.episode_id; }, "episodes");
    const auto scenes = unique_ids(ds.scenes, [](const SceneRecord& r) { return r.scene_id; }, "scenes");
    unique_ids(ds.receivers, [](const ReceiverRecord& r) { return r.receiver_id; }, "receivers");
    unique_ids(ds.rays, [](const RayRecord& r) { return r.ray_id; }, "rays");

    for (const auto& e : ds.episodes) {
        require_finite(e.altitude, "episode altitude");
    }
    for (const auto& s : ds.scenes) {
        if (!episodes.contains(s.episode_id)) {
            throw IntegrityError("scene " + std::to_string(s.scene_id) + " references missing episode " +
                                 std::to_string(s.episode_id));
        }
        require_finite(s.time, "scene time");
        for (const auto& p : s.poses) {
            require_finite(p.position, "pose position");
            require_finite(p.heading, "pose heading");
        }
    }
    std::map<std::int64_t, const ReceiverRecord*> receivers;
    for (const auto& r : ds.receivers) {
        if (!scenes.contains(r.scene_id)) {
            throw IntegrityError("receiver " + std::to_string(r.receiver_id) + " references missing scene " +
                                 std::to_string(r.scene_id));
        }
        require_finite(r.rx_position, "receiver position");
        if (r.ray_count < 0) {
            throw IntegrityError("receiver " + std::to_string(r.receiver_id) + ": negative ray_count");
        }
        const bool has_totals = r.total_power_coherent.has_value() && r.total_power_noncoherent.has_value();
        if (has_totals != (r.ray_count > 0)) {
            throw IntegrityError("receiver " + std::to_string(r.receiver_id) +
                                 ": totals must be present exactly when rays exist");
        }
        receivers.emplace(r.receiver_id, &r);
    }
    std::map<std::int64_t, int> ray_counts;
    std::map<std::int64_t, double> last_power;
    for (const auto& ray : ds.rays) {
        if (!receivers.contains(ray.receiver_id)) {
            throw IntegrityError("ray " + std::to_string(ray.ray_id) + " references missing receiver " +
                                 std::to_string(ray.receiver_id));
        }
        for (double v : {ray.power, ray.delay, ray.aod_az, ray.aod_el, ray.aoa_az, ray.aoa_el, ray.amplitude.real(),
                         ray.amplitude.imag()}) {
            require_finite(v, "ray " + std::to_string(ray.ray_id) + " field");
        }
        const auto prev = last_power.find(ray.receiver_id);
        if (prev != last_power.end() && ray.power > prev->second) {
            throw IntegrityError("rays of receiver " + std::to_string(ray.receiver_id) +
                                 " are not sorted by power");
        }
        last_power[ray.receiver_id] = ray.power;
        ++ray_counts[ray.receiver_id];
    }
    for (const auto& [id, r] : receivers) {
        const auto it = ray_counts.find(id);
        const int stored = it == ray_counts.end() ? 0 : it->second;
        if (stored != r->ray_count) {
            throw IntegrityError("receiver " + std::to_string(id) + ": ray_count " + std::to_string(r->ray_count) +
                                 " but " + std::to_string(stored) + " rays stored");
        }
    }
}

json to_json(const EpisodeRecord& r)
{
    return {{"episode_id", r.episode_id}, {"altitude", r.altitude}, {"config", r.config},
            {"scene_count", r.scene_count}};
}

json to_json(const SceneRecord& r)
{
    json poses = json::array();
    for (const auto& p : r.poses) {
        poses.push_back({{"uav_id", p.uav_id}, {"position", vec_json(p.position)}, {"heading", vec_json(p.heading)}});
    }
    return {{"scene_id", r.scene_id}, {"episode_id", r.episode_id}, {"time", r.time}, {"poses", poses}};
}

json to_json(const ReceiverRecord& r)
{
    return {{"receiver_id", r.receiver_id},
            {"scene_id", r.scene_id},
            {"uav_id", r.uav_id},
            {"rx_position", vec_json(r.rx_position)},
            {"total_power_coherent", optional_json(r.total_power_coherent)},
            {"total_power_noncoherent", optional_json(r.total_power_noncoherent)},
            {"los", r.los},
            {"ray_count", r.ray_count}};
}

json to_json(const RayRecord& r)
{
    json interactions = json::array();
    for (const auto& it : r.interactions) {
        interactions.push_back({{"kind", std::string(1, it.kind)},
                                {"point", vec_json(it.point)},
                                {"face_id", it.face_id},
                                {"edge_id", it.edge_id}});
    }
    return {{"ray_id", r.ray_id},
            {"receiver_id", r.receiver_id},
            {"power", r.power},
            {"delay", r.delay},
            {"aod_az", r.aod_az},
            {"aod_el", r.aod_el},
            {"aoa_az", r.aoa_az},
            {"aoa_el", r.aoa_el},
            {"los", r.los},
            {"amplitude_re", r.amplitude.real()},
            {"amplitude_im", r.amplitude.imag()},
            {"signature", r.signature},
            {"interactions", interactions}};
}

EpisodeRecord episode_from_json(const json& j)
{
    EpisodeRecord r;
    r.episode_id = j.at("episode_id").get<std::int64_t>();
    r.altitude = j.at("altitude").get<double>();
    r.config = j.at("config");
    r.scene_count = j.at("scene_count").get<int>();
    return r;
}

SceneRecord scene_from_json(const json& j)
{
    SceneRecord r;
    r.scene_id = j.at("scene_id").get<std::int64_t>();
    r.episode_id = j.at("episode_id").get<std::int64_t>();
    r.time = j.at("time").get<double>();
    for (const auto& p : j.at("poses")) {
        r.poses.push_back({p.at("uav_id").get<int>(), vec_from(p.at("position")), vec_from(p.at("heading"))});
    }
    return r;
}

ReceiverRecord receiver_from_json(const json& j)
{
    ReceiverRecord r;
    r.receiver_id = j.at("receiver_id").get<std::int64_t>();
    r.scene_id = j.at("scene_id").get<std::int64_t>();
    r.uav_id = j.at("uav_id").get<int>();
    r.rx_position = vec_from(j.at("rx_position"));
    r.total_power_coherent = optional_from(j.at("total_power_coherent"));
    r.total_power_noncoherent = optional_from(j.at("total_power_noncoherent"));
    r.los = j.at("los").get<bool>();
    r.ray_count = j.at("ray_count").get<int>();
    return r;
}

RayRecord ray_from_json(const json& j)
{
    RayRecord r;
    r.ray_id = j.at("ray_id").get<std::int64_t>();
    r.receiver_id = j.at("receiver_id").get<std::int64_t>();
    r.power = j.at("power").get<double>();
    r.delay = j.at("delay").get<double>();
    r.aod_az = j.at("aod_az").get<double>();
    r.aod_el = j.at("aod_el").get<double>();
    r.aoa_az = j.at("aoa_az").get<double>();
    r.aoa_el = j.at("aoa_el").get<double>();
    r.los = j.at("los").get<bool>();
    r.amplitude = {j.at("amplitude_re").get<double>(), j.at("amplitude_im").get<double>()};
    r.signature = j.at("signature").get<std::string>();
    for (const auto& it : j.at("interactions")) {
        const auto kind = it.at("kind").get<std::string>();
        if (kind.size() != 1 || std::string("RDS").find(kind[0]) == std::string::npos) {
            throw Error("unknown interaction kind '" + kind + "'");
        }
        r.interactions.push_back(
            {kind[0], vec_from(it.at("point")), it.at("face_id").get<int>(), it.at("edge_id").get<int>()});
    }
    return r;
}

Manifest write_dataset(const Dataset& ds, const std::filesystem::path& out_dir)
{
    validate_integrity(ds);
    std::filesystem::create_directories(out_dir);

    Manifest m;
    m.episodes = ds.episodes.size();
    m.scenes = ds.scenes.size();
    m.receivers = ds.receivers.size();
    m.rays = ds.rays.size();
    m.config_hash = sha256_hex(canonical_dump(ds.run_config));

    std::string all;
    json files = json::object();
    for (const char* file : {kEpisodesFile, kScenesFile, kReceiversFile, kRaysFile}) {
        const std::string bytes = table_bytes(ds, file);
        files[file] = sha256_hex(bytes);
        write_text_file(out_dir / file, bytes);
        all += bytes;
    }
    m.dataset_hash = sha256_hex(all);
    m.json = {{"counts", {{"episodes", m.episodes}, {"scenes", m.scenes}, {"receivers", m.receivers}, {"rays", m.rays}}},
              {"config", ds.run_config},
              {"config_hash", m.config_hash},
              {"dataset_hash", m.dataset_hash},
              {"files", files},
              {"metadata", ds.metadata}};
    m.json = canonicalize(m.json);
    write_text_file(out_dir / kManifestFile, canonical_dump(m.json, 1) + "\n");
    return m;
}

Manifest read_manifest(const std::filesystem::path& dir)
{
    const auto path = dir / kManifestFile;
    if (!std::filesystem::exists(path)) {
        throw Error("no dataset manifest in " + dir.string());
    }
    return manifest_from_json(parse_json(read_text_file(path), path.string()));
}

Dataset read_dataset(const std::filesystem::path& dir)
{
    const Manifest m = read_manifest(dir);
    Dataset ds;
    ds.episodes = from_jsonl<EpisodeRecord>(dir / kEpisodesFile, episode_from_json);
    ds.scenes = from_jsonl<SceneRecord>(dir / kScenesFile, scene_from_json);
    ds.receivers = from_jsonl<ReceiverRecord>(dir / kReceiversFile, receiver_from_json);
    ds.rays = from_jsonl<RayRecord>(dir / kRaysFile, ray_from_json);
    ds.run_config = m.json.value("config", json::object());
    ds.metadata = m.json.value("metadata", json::object());
    if (ds.episodes.size() != m.episodes || ds.scenes.size() != m.scenes || ds.receivers.size() != m.receivers ||
        ds.rays.size() != m.rays) {
        throw IntegrityError("row counts disagree with the manifest in " + dir.string());
    }
    validate_integrity(ds);
    return ds;
}

std::string emit_plot_data(const Dataset& ds, int uav_id, std::int64_t episode_id, PlotMetric metric)
{
    const bool known_episode = std::any_of(ds.episodes.begin(), ds.episodes.end(),
                                           [&](const EpisodeRecord& e) { return e.episode_id == episode_id; });
    if (!known_episode) {
        throw Error("unknown episode " + std::to_string(episode_id));
    }
    std::map<std::int64_t, double> scene_time;
    for (const auto& s : ds.scenes) {
        if (s.episode_id == episode_id) {
            scene_time.emplace(s.scene_id, s.time);
        }
    }
    std::vector<const ReceiverRecord*> rows;
    for (const auto& r : ds.receivers) {
        if (r.uav_id == uav_id && scene_time.contains(r.scene_id)) {
            rows.push_back(&r);
        }
    }
    if (rows.empty()) {
        throw Error("unknown uav " + std::to_string(uav_id) + " in episode " + std::to_string(episode_id));
    }
    std::sort(rows.begin(), rows.end(), [&](const ReceiverRecord* a, const ReceiverRecord* b) {
        return std::pair(scene_time.at(a->scene_id), a->receiver_id) <
               std::pair(scene_time.at(b->scene_id), b->receiver_id);
    });

    std::map<std::int64_t, std::vector<const RayRecord*>> rays;
    for (const auto& ray : ds.rays) {
        rays[ray.receiver_id].push_back(&ray);
    }

    std::string out = "time_s,strongest,aggregate\n";
    const bool any_rays = std::any_of(rows.begin(), rows.end(), [](const ReceiverRecord* r) { return r->ray_count > 0; });
    if (!any_rays) {
        return out;
    }
    for (const ReceiverRecord* r : rows) {
        out += format_double(scene_time.at(r->scene_id));
        const auto it = rays.find(r->receiver_id);
        if (r->ray_count == 0 || it == rays.end()) {
            out += ",,\n";
            continue;
        }
        const auto& list = it->second;
        const RayRecord* best = *std::max_element(list.begin(), list.end(), [](const RayRecord* a, const RayRecord* b) {
            return a->power < b->power;
        });
        double strongest = 0.0;
        double aggregate = 0.0;
        if (metric == PlotMetric::Power) {
            strongest = best->power;
            aggregate = *r->total_power_noncoherent;
        } else {
            strongest = best->delay;
            double weight = 0.0;
            double weighted = 0.0;
            for (const RayRecord* ray : list) {
                const double p = std::pow(10.0, ray->power / 10.0);
                weight += p;
                weighted += p * ray->delay;
            }
            aggregate = weighted / weight;
        }
        out += "," + format_double(strongest) + "," + format_double(aggregate) + "\n";
    }
    return out;
}

std::vector<RayRecord> query_rays(const Dataset& ds, const RayFilter& filter)
{
    std::map<std::int64_t, std::int64_t> scene_episode;
    for (const auto& s : ds.scenes) {
        scene_episode.emplace(s.scene_id, s.episode_id);
    }
    std::map<std::int64_t, std::int64_t> receiver_scene;
    for (const auto& r : ds.receivers) {
        receiver_scene.emplace(r.receiver_id, r.scene_id);
    }
    std::vector<RayRecord> out;
    for (const auto& ray : ds.rays) {
        if (filter.receiver_id && ray.receiver_id != *filter.receiver_id) {
            continue;
        }
        const auto rs = receiver_scene.find(ray.receiver_id);
        const std::int64_t scene = rs == receiver_scene.end() ? -1 : rs->second;
        if (filter.scene_id && scene != *filter.scene_id) {
            continue;
        }
        if (filter.episode_id) {
            const auto se = scene_episode.find(scene);
            if (se == scene_episode.end() || se->second != *filter.episode_id) {
                continue;
            }
        }
        out.push_back(ray);
    }
    std::stable_sort(out.begin(), out.end(), [](const RayRecord& a, const RayRecord& b) {
        if (a.receiver_id != b.receiver_id) {
            return a.receiver_id < b.receiver_id;
        }
        if (a.power != b.power) {
            return a.power > b.power;
        }
        return a.ray_id < b.ray_id;
    });
    return out;
}

} // namespace uavprop
