// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "uavprop/canonical.hpp"
#include "uavprop/channel.hpp"
#include "uavprop/error.hpp"
#include "uavprop/orchestrator.hpp"
#include "uavprop/raytracer.hpp"

namespace uavprop {

namespace {

using nlohmann::json;

constexpr const char* kPartialDir = ".partial";

struct Uav {
    int uav_id = 0;
    VehicleModel model;
    Route route;
    bool reversed = false;
    std::vector<PoseSample> samples;
};

struct Job {
    int episode = 0;
    int step = 0;
    std::int64_t scene_id = 0;
};

/// Everything fixed before tracing starts.
struct Plan {
    Scene base;
    std::vector<Uav> uavs;
    std::vector<Job> jobs;
    json snapshot;
    std::string snapshot_hash;
    int scene_count = 0;
};

Plan make_plan(const RunConfig& cfg)
{
    cfg.validate();
    Plan plan;
    plan.base = load_scene(cfg.scene_path);
    const std::vector<Route> routes = ingest_routes(cfg.routes_path);
    if (routes.empty()) {
        throw ConfigError("routes: no routes in " + cfg.routes_path.string());
    }

    for (const auto& m : plan.base.materials()) {
        const auto it = cfg.scattering.find(m.name);
        if (it != cfg.scattering.end()) {
            plan.base.mutable_material(m.name).scattering_s = it->second;
        }
    }
    for (const auto& model : cfg.vehicle_models) {
        if (plan.base.has_material(model.material_id)) {
            continue;
        }
        if (model.material_id != "metal") {
            throw ConfigError("vehicle_models." + model.name + ": unknown material '" + model.material_id + "'");
        }
        const auto it = cfg.scattering.find("metal");
        plan.base.add_material(itu_material("metal", cfg.frequency_hz,
                                            it == cfg.scattering.end() ? kDefaultMetalScattering : it->second));
    }

    plan.scene_count = cfg.scene_count();
    const auto models = assign_models(cfg.uav_count, cfg.vehicle_models, cfg.seed);
    const int route_count = static_cast<int>(routes.size());
    for (int i = 0; i < cfg.uav_count; ++i) {
        Uav u;
        u.uav_id = i;
        u.model = models[static_cast<std::size_t>(i)];
        const Route& base_route = routes[static_cast<std::size_t>(i % route_count)];
        u.reversed = (i / route_count) % 2 == 1;
        u.route = u.reversed ? base_route.reversed() : base_route;
        if (u.route.speed > u.model.v_max + 1e-12) {
            throw ConfigError("routes." + u.route.route_id + ": speed exceeds v_max of '" + u.model.name +
                              "' assigned to uav " + std::to_string(i));
        }
        u.samples = sample_trajectory(u.route, cfg.t_sam, cfg.duration);
        if (static_cast<int>(u.samples.size()) != plan.scene_count) {
            throw Error("trajectory sample count disagrees with the scene count");
        }
        for (double altitude : cfg.altitudes) {
            try {
                place_uav(u.samples.front(), u.model, altitude, cfg.rx_offset, i);
            } catch (const Error& e) {
                throw ConfigError("altitudes: " + std::string(e.what()) + " for uav " + std::to_string(i));
            }
        }
        plan.uavs.push_back(std::move(u));
    }

    json snapshot = cfg.to_json();
    snapshot.erase("output_dir");
    snapshot.erase("scene");
    snapshot.erase("routes");
    snapshot["scene_sha256"] = sha256_hex(read_text_file(cfg.scene_path));
    snapshot["routes_sha256"] = sha256_hex(read_text_file(cfg.routes_path));
    plan.snapshot = canonicalize(snapshot);
    plan.snapshot_hash = sha256_hex(canonical_dump(plan.snapshot));

    for (int e = 0; e < static_cast<int>(cfg.altitudes.size()); ++e) {
        for (int s = 0; s < plan.scene_count; ++s) {
            plan.jobs.push_back({e, s, static_cast<std::int64_t>(e) * plan.scene_count + s + 1});
        }
    }
    return plan;
}

std::filesystem::path chunk_path(const std::filesystem::path& partial, std::int64_t scene_id)
{
    return partial / ("scene-" + std::to_string(scene_id) + ".json");
}

json energy_json(const EnergyCheck& e)
{
    return {{"interactions", e.interactions}, {"violations", e.violations}, {"max_sum", e.max_sum}};
}

/// Traces one scene and returns its checkpoint document.
json trace_scene(const RunConfig& cfg, const Plan& plan, const Job& job)
{
    const double altitude = cfg.altitudes[static_cast<std::size_t>(job.episode)];
    Scene scene = plan.base;
    std::vector<Placement> placements;
    std::vector<FaceRange> bodies;
    SceneRecord scene_record;
    scene_record.scene_id = job.scene_id;
    scene_record.episode_id = job.episode + 1;
    scene_record.time = job.step * cfg.t_sam;
    for (const auto& u : plan.uavs) {
        const PoseSample& pose = u.samples[static_cast<std::size_t>(job.step)];
        Placement p = place_uav(pose, u.model, altitude, cfg.rx_offset, u.uav_id);
        const int begin = static_cast<int>(scene.face_count());
        scene.add_oriented_box(p.body_corners, u.model.material_id);
        bodies.push_back({begin, static_cast<int>(scene.face_count())});
        scene_record.poses.push_back({u.uav_id, p.body_center, pose.heading});
        placements.push_back(p);
    }

    const TraceConfig& tc = cfg.trace;
    const SceneIndex index(std::move(scene), tc.enable_diffuse ? tc.tile_area : 0.0, tc.frequency_hz);
    const bool sbr = tc.max_reflections > tc.exhaustive_reflections;
    const std::vector<FaceSequence> tx_sequences =
        sbr ? discover_sequences(index, cfg.tx_position, tc) : std::vector<FaceSequence>{};

    EnergyCheck energy;
    json receivers = json::array();
    json rays = json::array();
    const auto uav_total = static_cast<std::int64_t>(plan.uavs.size());
    for (std::size_t i = 0; i < plan.uavs.size(); ++i) {
        const Vec3& rx = placements[i].rx_position;
        const std::vector<FaceSequence> rx_sequences =
            sbr ? discover_sequences(index, rx, tc) : std::vector<FaceSequence>{};
        TraceOptions opts;
        opts.rx_body = bodies[i];
        opts.tx_sequences = &tx_sequences;
        opts.rx_sequences = &rx_sequences;
        opts.diffuse_limit = static_cast<std::size_t>(tc.l_max);

        std::vector<RayPath> paths = trace_all(index, cfg.tx_position, rx, tc, opts);
        const bool los = std::any_of(paths.begin(), paths.end(), [](const RayPath& p) { return p.is_los(); });
        for (const auto& p : paths) {
            check_energy(p, index.scene(), tc, energy);
        }
        const auto top = select_top_l(score_paths(std::move(paths), index.scene(), tc), tc.l_max);

        ReceiverRecord rec;
        rec.receiver_id = (job.scene_id - 1) * uav_total + static_cast<std::int64_t>(i) + 1;
        rec.scene_id = job.scene_id;
        rec.uav_id = plan.uavs[i].uav_id;
        rec.rx_position = rx;
        rec.los = los;
        rec.ray_count = static_cast<int>(top.size());
        if (!top.empty()) {
            std::vector<std::complex<double>> amplitudes;
            for (const auto& s : top) {
                amplitudes.push_back(s.metrics.amplitude);
            }
            rec.total_power_coherent = total_power_dbm(amplitudes, CombineMode::Coherent, tc.tx_power_dbm);
            rec.total_power_noncoherent = total_power_dbm(amplitudes, CombineMode::Noncoherent, tc.tx_power_dbm);
        }
        receivers.push_back(to_json(rec));

        for (std::size_t k = 0; k < top.size(); ++k) {
            const ScoredPath& s = top[k];
            RayRecord ray;
            ray.ray_id = (rec.receiver_id - 1) * tc.l_max + static_cast<std::int64_t>(k) + 1;
            ray.receiver_id = rec.receiver_id;
            ray.power = s.metrics.power_dbm;
            ray.delay = s.metrics.delay_ns;
            ray.aod_az = s.metrics.angles.aod_az;
            ray.aod_el = s.metrics.angles.aod_el;
            ray.aoa_az = s.metrics.angles.aoa_az;
            ray.aoa_el = s.metrics.angles.aoa_el;
            ray.los = s.metrics.los;
            ray.amplitude = s.metrics.amplitude;
            ray.signature = s.path.signature();
            for (const auto& it : s.path.interactions) {
                ray.interactions.push_back({static_cast<char>(it.kind), it.point, it.face_id, it.edge_id});
            }
            rays.push_back(to_json(ray));
        }
    }
    return canonicalize(json{{"config_hash", plan.snapshot_hash},
                             {"scene", to_json(scene_record)},
                             {"receivers", receivers},
                             {"rays", rays},
                             {"energy", energy_json(energy)}});
}

bool load_checkpoint(const std::filesystem::path& path, const Plan& plan, json& doc)
{
    if (!std::filesystem::exists(path)) {
        return false;
    }
    doc = parse_json(read_text_file(path), path.string());
    if (doc.value("config_hash", std::string()) != plan.snapshot_hash) {
        throw ConfigError("checkpoint " + path.string() + " was written with a different configuration");
    }
    return true;
}

} // namespace

RunResult run_simulation(const RunConfig& cfg, const RunOptions& opts)
{
    const Plan plan = make_plan(cfg);
    const auto& out_dir = cfg.output_dir;
    const auto partial = out_dir / kPartialDir;
    if (!opts.resume && std::filesystem::exists(partial)) {
        std::filesystem::remove_all(partial);
    }
    std::filesystem::create_directories(partial);

    RunResult result;
    std::vector<const Job*> pending;
    for (const auto& job : plan.jobs) {
        json doc;
        if (opts.resume && load_checkpoint(chunk_path(partial, job.scene_id), plan, doc)) {
            ++result.scenes_resumed;
        } else {
            pending.push_back(&job);
        }
    }
    const std::size_t budget =
        opts.max_scenes ? std::min(pending.size(), static_cast<std::size_t>(std::max(0, *opts.max_scenes)))
                        : pending.size();

    std::atomic<std::size_t> next{0};
    std::atomic<int> traced{0};
    std::exception_ptr failure;
    std::mutex mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= budget) {
                return;
            }
            {
                std::lock_guard lock(mutex);
                if (failure) {
                    return;
                }
            }
            try {
                const Job& job = *pending[i];
                const json doc = trace_scene(cfg, plan, job);
                write_text_file(chunk_path(partial, job.scene_id), canonical_dump(doc) + "\n");
                ++traced;
                if (opts.log) {
                    std::lock_guard lock(mutex);
                    opts.log("episode " + std::to_string(job.episode + 1) + " scene " +
                             std::to_string(job.scene_id) + ": " + std::to_string(doc.at("rays").size()) + " rays");
                }
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                return;
            }
        }
    };
    const int workers = std::max(1, std::min<int>(opts.parallel, static_cast<int>(std::max<std::size_t>(budget, 1))));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) {
            threads.emplace_back(worker);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    result.scenes_traced = traced.load();
    if (budget < pending.size()) {
        return result;
    }

    Dataset ds;
    ds.run_config = plan.snapshot;
    for (std::size_t e = 0; e < cfg.altitudes.size(); ++e) {
        ds.episodes.push_back({static_cast<std::int64_t>(e) + 1, canonical_double(cfg.altitudes[e]), plan.snapshot,
                               plan.scene_count});
    }
    EnergyCheck energy;
    for (const auto& job : plan.jobs) {
        json doc;
        if (!load_checkpoint(chunk_path(partial, job.scene_id), plan, doc)) {
            throw Error("missing checkpoint for scene " + std::to_string(job.scene_id));
        }
        ds.scenes.push_back(scene_from_json(doc.at("scene")));
        for (const auto& r : doc.at("receivers")) {
            ds.receivers.push_back(receiver_from_json(r));
        }
        for (const auto& r : doc.at("rays")) {
            ds.rays.push_back(ray_from_json(r));
        }
        const json& en = doc.at("energy");
        energy.merge({en.at("interactions").get<long long>(), en.at("violations").get<long long>(),
                      en.at("max_sum").get<double>()});
    }
    json assignment = json::array();
    for (const auto& u : plan.uavs) {
        assignment.push_back({{"uav_id", u.uav_id},
                              {"model", u.model.name},
                              {"route", u.route.route_id},
                              {"reversed", u.reversed}});
    }
    ds.metadata = {{"energy_check", energy_json(energy)}, {"uavs", assignment}};
    result.manifest = write_dataset(ds, out_dir);
    std::filesystem::remove_all(partial);
    result.complete = true;
    return result;
}

} // namespace uavprop
