// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: runs the ten release criteria and prints one PASS/FAIL line each.
// The canonical scenario is simulated twice in a scratch directory (a few minutes).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <Eigen/SVD>

#include "image_oracle.hpp"
#include "test_support.hpp"
#include "uavprop/canonical.hpp"
#include "uavprop/channel.hpp"
#include "uavprop/dataset.hpp"
#include "uavprop/electromagnetics.hpp"
#include "uavprop/orchestrator.hpp"
#include "uavprop/raytracer.hpp"
#include "uavprop/scene.hpp"

namespace {

using namespace uavprop;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

Outcome fspl_check()
{
    const auto start = Clock::now();
    TraceConfig cfg;
    cfg.tx_antenna = AntennaPattern::isotropic();
    cfg.rx_antenna = AntennaPattern::isotropic();
    const SceneIndex index{Scene{}, 0.0};
    const auto paths = trace_all(index, {0, 0, 10}, {100, 0, 10}, cfg);
    if (paths.size() != 1 || !paths[0].is_los()) {
        return {false, "expected a single LOS path"};
    }
    const double got = compute_metrics(paths[0], index.scene(), cfg).power_dbm;
    const double friis = 20.0 * std::log10(wavelength(60e9) / (4.0 * kPi * 100.0));
    const double elapsed = seconds_since(start);
    const bool ok = std::abs(got + 108.0) <= 0.1 && std::abs(got - friis) <= 1e-9 && elapsed < 1.0;
    return {ok, "P = " + fmt(got, 6) + " dBm, Friis " + fmt(friis, 6) + " dBm, " + fmt(elapsed * 1e3, 3) + " ms"};
}

Outcome dipole_check()
{
    const AntennaPattern d = AntennaPattern::vertical_dipole();
    const double broadside_dbi = 10.0 * std::log10(dipole_gain(d, {1, 0, 0}));
    const double axial = dipole_gain(d, {0, 0, 1});
    const double step = kPi / 180.0;
    double integral = 0.0;
    for (int i = 0; i < 180; ++i) {
        const double t = (i + 0.5) * step;
        for (int j = 0; j < 360; ++j) {
            const double p = (j + 0.5) * step;
            integral += dipole_gain(d, {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)}) *
                        std::sin(t) * step * step;
        }
    }
    const double ratio = integral / (4.0 * kPi);
    const bool ok = std::abs(broadside_dbi - 2.15) <= 0.01 && axial == 0.0 && std::abs(ratio - 1.0) <= 0.005;
    return {ok, "broadside " + fmt(broadside_dbi) + " dBi, axial " + fmt(axial) + ", sphere/4pi " + fmt(ratio, 6)};
}

Outcome image_oracle_check()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> xy(-12.0, 12.0);
    std::uniform_real_distribution<double> z(1.0, 15.0);
    TraceConfig cfg;
    cfg.max_reflections = 2;
    cfg.exhaustive_reflections = 2;
    cfg.enable_diffraction = false;
    cfg.enable_diffuse = false;
    int agreed = 0;
    int compared = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const Scene scene = testing::random_small_scene(rng);
        const SceneIndex index{scene, 0.0};
        const Vec3 tx{xy(rng), xy(rng), z(rng)};
        const Vec3 rx{xy(rng), xy(rng), z(rng)};
        std::map<std::vector<int>, std::vector<Vec3>> oracle;
        for (auto& p : testing::enumerate_images(scene, tx, rx)) {
            oracle[p.faces] = p.points;
        }
        std::map<std::vector<int>, const RayPath*> traced;
        const auto paths = trace_specular(index, tx, rx, cfg);
        for (const auto& p : paths) {
            if (p.is_los()) {
                continue;
            }
            std::vector<int> faces;
            for (const auto& it : p.interactions) {
                faces.push_back(it.face_id);
            }
            traced[faces] = &p;
        }
        bool same = traced.size() == oracle.size() && scene.face_count() <= 8;
        for (const auto& [faces, points] : oracle) {
            const auto it = traced.find(faces);
            if (it == traced.end()) {
                same = false;
                continue;
            }
            const std::string sig = faces.size() == 1 ? "Tx-R-Rx" : "Tx-R-R-Rx";
            same = same && it->second->signature() == sig;
            for (std::size_t i = 0; i < faces.size(); ++i) {
                same = same && distance(it->second->interactions[i].point, points[i]) <= 1e-6;
            }
        }
        compared += static_cast<int>(oracle.size());
        agreed += same ? 1 : 0;
    }
    const double elapsed = seconds_since(start);
    return {agreed == 10 && compared > 0 && elapsed < 30.0,
            std::to_string(agreed) + "/10 scenes agree over " + std::to_string(compared) + " oracle paths, " +
                fmt(elapsed, 3) + " s"};
}

Outcome fresnel_check()
{
    const auto g = fresnel(itu_material("concrete", 60e9), 1.0, 60e9);
    const double te_db = 10.0 * std::log10(std::norm(g.te));
    const double tm_db = 10.0 * std::log10(std::norm(g.tm));
    const std::complex<double> root = std::sqrt(std::complex<double>(5.31, -0.269));
    const double hand_db = 10.0 * std::log10(std::norm((1.0 - root) / (1.0 + root)));
    bool pec_unit = true;
    const Material pec = itu_material("metal", 60e9);
    for (int i = 0; i <= 90; ++i) {
        const auto p = fresnel(pec, std::cos(i * kPi / 180.0), 60e9);
        pec_unit = pec_unit && std::abs(p.te) == 1.0 && std::abs(p.tm) == 1.0;
    }
    const bool ok = std::abs(te_db + 8.1) <= 0.1 && std::abs(tm_db + 8.1) <= 0.1 && std::abs(te_db - hand_db) <= 0.01 &&
                    pec_unit;
    return {ok, "|G|^2 = " + fmt(te_db) + " dB (hand " + fmt(hand_db) + " dB), PEC unit magnitude " +
                    (pec_unit ? "yes" : "no")};
}

Outcome knife_edge_check()
{
    const double j0 = knife_edge_loss(0.0);
    bool monotone = true;
    double prev = knife_edge_loss(-0.78);
    for (int i = 1; i <= 378; ++i) {
        const double j = knife_edge_loss(-0.78 + 0.01 * i);
        monotone = monotone && j >= prev;
        prev = j;
    }
    return {std::abs(j0 - 6.0) <= 0.1 && monotone,
            "J(0) = " + fmt(j0) + " dB, monotone on [-0.78, 3]: " + (monotone ? "yes" : "no")};
}

Outcome mimo_check()
{
    const auto ula = ArrayDescriptor::uniform_linear(2, 0.5, {0, 1, 0});
    const std::complex<double> a = std::polar(2.5e-6, 1.1);
    const std::vector<MimoPath> paths{{a, {1, 0, 0}, {-1, 0, 0}}};
    const MimoChannel h = synthesize_mimo(paths, ula, ula, 60e9);
    double worst = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            worst = std::max(worst, std::abs(std::abs(h.matrix(r, c)) - std::abs(a)) / std::abs(a));
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h.matrix);
    const auto sv = svd.singularValues();
    const double ratio = sv(1) / sv(0);
    return {worst <= 1e-9 && ratio <= 1e-9,
            "max relative magnitude spread " + fmt(worst) + ", sigma2/sigma1 " + fmt(ratio)};
}

struct CanonicalRun {
    bool ok = false;
    std::string error;
    double seconds = 0.0;
    Manifest manifest;
    std::filesystem::path dir;
};

CanonicalRun run_canonical(const std::filesystem::path& scenario_dir, const std::string& out)
{
    CanonicalRun r;
    const auto start = Clock::now();
    try {
        RunConfig cfg = parse_config(scenario_dir / "config.json");
        cfg.output_dir = scenario_dir / out;
        const RunResult res = run_simulation(cfg);
        r.ok = res.complete;
        r.manifest = res.manifest;
        r.dir = cfg.output_dir;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.seconds = seconds_since(start);
    return r;
}

Outcome defaults_check(const Dataset* ds, const std::filesystem::path& scenario_dir)
{
    const RunConfig cfg = parse_config(scenario_dir / "config.json");
    const bool table = cfg.frequency_hz == 60e9 && cfg.tx_power_dbm == 0.0 && cfg.trace.ray_spacing_deg == 1.0 &&
                       cfg.trace.l_max == 25 && cfg.scattering.count("itu_concrete_60ghz") && cfg.scattering.at("itu_concrete_60ghz") == 0.4 &&
                       cfg.scattering.count("metal") && cfg.scattering.at("metal") == 0.2 && cfg.t_sam == 0.1 && cfg.tx_position.z == 5.0 &&
                       cfg.trace.tx_antenna.kind == AntennaKind::HalfWaveDipole &&
                       cfg.trace.rx_antenna.kind == AntennaKind::HalfWaveDipole;
    if (!ds) {
        return {false, "canonical run failed"};
    }
    int worst = 0;
    for (const auto& r : ds->receivers) {
        worst = std::max(worst, r.ray_count);
    }
    return {table && worst <= 25 && !ds->receivers.empty(),
            std::string("defaults ") + (table ? "match" : "differ") + ", max ray_count " + std::to_string(worst) +
                " over " + std::to_string(ds->receivers.size()) + " receivers"};
}

Outcome shape_check(const CanonicalRun& run, const Dataset* ds, const std::filesystem::path& csv_dir)
{
    if (!ds) {
        return {false, "canonical run failed: " + run.error};
    }
    std::int64_t episode = -1;
    for (const auto& e : ds->episodes) {
        if (e.altitude == 100.0) {
            episode = e.episode_id;
        }
    }
    const Scene scene = load_scene(run.dir.parent_path() / "scene.json");
    const bool layout = scene.object_count() == 21 && ds->episodes.size() == 3 &&
                        ds->metadata.at("uavs").size() == 10;
    if (episode < 0) {
        return {false, "no 100 m episode"};
    }
    int best_uav = -1;
    double best_swing = 0.0;
    bool delay_ok = false;
    std::set<int> uavs;
    for (const auto& r : ds->receivers) {
        uavs.insert(r.uav_id);
    }
    for (int uav : uavs) {
        const std::string power = emit_plot_data(*ds, uav, episode, PlotMetric::Power);
        const std::string delay = emit_plot_data(*ds, uav, episode, PlotMetric::Delay);
        write_text_file(csv_dir / ("uav" + std::to_string(uav) + "_power.csv"), power);
        write_text_file(csv_dir / ("uav" + std::to_string(uav) + "_delay.csv"), delay);
        std::istringstream in(power);
        std::string line;
        std::getline(in, line);
        double lo = 1e300;
        double hi = -1e300;
        int rows = 0;
        while (std::getline(in, line)) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            const std::string strongest = line.substr(c1 + 1, c2 - c1 - 1);
            if (!strongest.empty()) {
                const double v = std::stod(strongest);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                ++rows;
            }
        }
        const int delay_rows = static_cast<int>(std::count(delay.begin(), delay.end(), '\n')) - 1;
        if (rows > 0 && hi - lo > best_swing) {
            best_swing = hi - lo;
            best_uav = uav;
            delay_ok = delay_rows > 0;
        }
    }
    const bool ok = layout && best_swing >= 20.0 && delay_ok && run.seconds < 600.0;
    return {ok, "UAV " + std::to_string(best_uav) + " at 100 m swings " + fmt(best_swing) + " dB; run took " +
                    fmt(run.seconds, 4) + " s; CSVs in " + csv_dir.string()};
}

Outcome determinism_check(const CanonicalRun& a, const CanonicalRun& b)
{
    if (!a.ok || !b.ok) {
        return {false, "a canonical run failed: " + a.error + b.error};
    }
    bool identical = true;
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(a.dir)) {
        const auto other = b.dir / entry.path().filename();
        identical = identical && std::filesystem::exists(other) &&
                    sha256_hex(read_text_file(entry.path())) == sha256_hex(read_text_file(other));
        ++files;
    }
    for (const auto& entry : std::filesystem::directory_iterator(b.dir)) {
        identical = identical && std::filesystem::exists(a.dir / entry.path().filename());
    }
    return {identical && a.manifest.dataset_hash == b.manifest.dataset_hash,
            std::to_string(files) + " files compared, dataset_hash " + a.manifest.dataset_hash.substr(0, 16) + "..."};
}

Outcome energy_check(const Dataset* ds)
{
    if (!ds) {
        return {false, "canonical run failed"};
    }
    const auto& e = ds->metadata.at("energy_check");
    const long long checked = e.at("interactions").get<long long>();
    const long long violations = e.at("violations").get<long long>();
    return {checked > 0 && violations == 0,
            std::to_string(checked) + " interactions checked, " + std::to_string(violations) + " violations, max " +
                fmt(e.at("max_sum").get<double>(), 6)};
}

} // namespace

int main()
{
    std::map<int, Outcome> results;
    auto report = [&](int id, const char* name, const Outcome& o) {
        results[id] = o;
        std::printf("%s criterion %2d %-22s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
    };
    auto guarded = [](const std::function<Outcome()>& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            return Outcome{false, std::string("exception: ") + e.what()};
        }
    };

    report(1, "fspl", guarded(fspl_check));
    report(2, "dipole", guarded(dipole_check));
    report(3, "image-method oracle", guarded(image_oracle_check));
    report(4, "fresnel", guarded(fresnel_check));
    report(5, "knife-edge", guarded(knife_edge_check));

    uavprop::testing::TempDir scratch("acceptance");
    write_scenario(generate_scenario(ScenarioParams{}), scratch.path());
    const CanonicalRun first = run_canonical(scratch.path(), "run-a");
    const CanonicalRun second = run_canonical(scratch.path(), "run-b");
    std::optional<Dataset> dataset;
    if (first.ok) {
        dataset = read_dataset(first.dir);
    }
    const Dataset* ds = dataset ? &*dataset : nullptr;
    const auto csv_dir = std::filesystem::temp_directory_path() / "uavprop-acceptance-plots";
    std::filesystem::create_directories(csv_dir);

    report(6, "table conformance", guarded([&] { return defaults_check(ds, scratch.path()); }));
    report(7, "canonical shape", guarded([&] { return shape_check(first, ds, csv_dir); }));
    report(8, "determinism", guarded([&] { return determinism_check(first, second); }));
    report(9, "energy bound", guarded([&] { return energy_check(ds); }));
    report(10, "mimo", guarded(mimo_check));

    const auto passed = std::count_if(results.begin(), results.end(), [](const auto& kv) { return kv.second.pass; });
    std::printf("%ld/%zu criteria passed\n", static_cast<long>(passed), results.size());
    return passed == static_cast<long>(results.size()) ? 0 : 1;
}
