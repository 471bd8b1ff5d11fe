// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <set>

#include "uavprop/canonical.hpp"
#include "uavprop/error.hpp"
#include "uavprop/orchestrator.hpp"

namespace uavprop {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why)
{
    throw ConfigError(field + ": " + why);
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix)
{
    if (!obj.is_object()) {
        fail(prefix.empty() ? "config" : prefix, "expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) {
            fail(prefix + key, "unknown key");
        }
    }
}

double get_number(const json& obj, const std::string& key, const std::string& field)
{
    const json& v = obj.at(key);
    if (!v.is_number()) {
        fail(field, "expected a number");
    }
    return v.get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& field)
{
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        fail(field, "expected an integer");
    }
    return v.get<int>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& field)
{
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
        fail(field, "expected true or false");
    }
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& field)
{
    const json& v = obj.at(key);
    if (!v.is_string()) {
        fail(field, "expected a string");
    }
    return v.get<std::string>();
}

Vec3 get_vec3(const json& v, const std::string& field)
{
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
        fail(field, "expected [x, y, z]");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

AntennaPattern parse_antenna(const json& obj, const std::string& field)
{
    reject_unknown(obj, {"kind", "axis"}, field + ".");
    AntennaPattern a;
    if (obj.contains("kind")) {
        const std::string kind = get_string(obj, "kind", field + ".kind");
        if (kind == "dipole") {
            a.kind = AntennaKind::HalfWaveDipole;
        } else if (kind == "isotropic") {
            a.kind = AntennaKind::Isotropic;
        } else {
            fail(field + ".kind", "expected \"dipole\" or \"isotropic\"");
        }
    }
    if (obj.contains("axis")) {
        const Vec3 axis = get_vec3(obj.at("axis"), field + ".axis");
        if (!(norm(axis) > 0.0)) {
            fail(field + ".axis", "must be non-zero");
        }
        a.axis = normalized(axis);
    }
    return a;
}

void parse_trace(const json& obj, TraceConfig& t)
{
    reject_unknown(obj,
                   {"ray_spacing_deg", "max_reflections", "l_max", "ds_max_interactions", "tile_area",
                    "exhaustive_reflections", "diffraction_max_loss_db", "enable_diffraction", "enable_diffuse",
                    "tx_antenna", "rx_antenna"},
                   "trace.");
    if (obj.contains("ray_spacing_deg")) t.ray_spacing_deg = get_number(obj, "ray_spacing_deg", "trace.ray_spacing_deg");
    if (obj.contains("max_reflections")) t.max_reflections = get_int(obj, "max_reflections", "trace.max_reflections");
    if (obj.contains("l_max")) t.l_max = get_int(obj, "l_max", "trace.l_max");
    if (obj.contains("ds_max_interactions")) {
        t.ds_max_interactions = get_int(obj, "ds_max_interactions", "trace.ds_max_interactions");
    }
    if (obj.contains("tile_area")) t.tile_area = get_number(obj, "tile_area", "trace.tile_area");
    if (obj.contains("exhaustive_reflections")) {
        t.exhaustive_reflections = get_int(obj, "exhaustive_reflections", "trace.exhaustive_reflections");
    }
    if (obj.contains("diffraction_max_loss_db")) {
        t.diffraction_max_loss_db = get_number(obj, "diffraction_max_loss_db", "trace.diffraction_max_loss_db");
    }
    if (obj.contains("enable_diffraction")) {
        t.enable_diffraction = get_bool(obj, "enable_diffraction", "trace.enable_diffraction");
    }
    if (obj.contains("enable_diffuse")) t.enable_diffuse = get_bool(obj, "enable_diffuse", "trace.enable_diffuse");
    if (obj.contains("tx_antenna")) t.tx_antenna = parse_antenna(obj.at("tx_antenna"), "trace.tx_antenna");
    if (obj.contains("rx_antenna")) t.rx_antenna = parse_antenna(obj.at("rx_antenna"), "trace.rx_antenna");
}

VehicleModel parse_vehicle(const json& obj, const std::string& field)
{
    reject_unknown(obj, {"name", "length_mm", "width_mm", "height_mm", "v_max", "material"}, field + ".");
    VehicleModel m;
    try {
        m.name = get_string(obj, "name", field + ".name");
        m.length_mm = get_number(obj, "length_mm", field + ".length_mm");
        m.width_mm = get_number(obj, "width_mm", field + ".width_mm");
        m.height_mm = get_number(obj, "height_mm", field + ".height_mm");
        m.v_max = get_number(obj, "v_max", field + ".v_max");
    } catch (const json::out_of_range&) {
        fail(field, "needs name, length_mm, width_mm, height_mm and v_max");
    }
    if (obj.contains("material")) {
        m.material_id = get_string(obj, "material", field + ".material");
    }
    return m;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value)
{
    const std::filesystem::path p(value);
    return p.is_absolute() || base.empty() ? p : base / p;
}

} // namespace

int RunConfig::scene_count() const
{
    return static_cast<int>(std::floor(duration / t_sam + 1e-9)) + 1;
}

json RunConfig::to_json() const
{
    json models = json::array();
    for (const auto& m : vehicle_models) {
        models.push_back({{"name", m.name},
                          {"length_mm", m.length_mm},
                          {"width_mm", m.width_mm},
                          {"height_mm", m.height_mm},
                          {"v_max", m.v_max},
                          {"material", m.material_id}});
    }
    json scatter = json::object();
    for (const auto& [name, s] : scattering) {
        scatter[name] = s;
    }
    return canonicalize({{"frequency_hz", frequency_hz},
                         {"tx_power_dbm", tx_power_dbm},
                         {"tx_position", {tx_position.x, tx_position.y, tx_position.z}},
                         {"altitudes", altitudes},
                         {"t_sam", t_sam},
                         {"duration", duration},
                         {"seed", seed},
                         {"scene", scene_path.generic_string()},
                         {"routes", routes_path.generic_string()},
                         {"output_dir", output_dir.generic_string()},
                         {"uav_count", uav_count},
                         {"rx_offset", rx_offset},
                         {"trace", trace_config_to_json(trace)},
                         {"scattering", scatter},
                         {"vehicle_models", models}});
}

void RunConfig::validate() const
{
    if (!(frequency_hz > 0.0)) {
        fail("frequency_hz", "must be positive");
    }
    if (!std::isfinite(tx_power_dbm)) {
        fail("tx_power_dbm", "must be finite");
    }
    if (!is_finite(tx_position)) {
        fail("tx_position", "must be finite");
    }
    if (altitudes.empty()) {
        fail("altitudes", "must not be empty");
    }
    for (double a : altitudes) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            fail("altitudes", "every altitude must be positive");
        }
    }
    if (!(t_sam > 0.0) || !std::isfinite(t_sam)) {
        fail("t_sam", "must be positive");
    }
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        fail("duration", "must be non-negative");
    }
    if (uav_count < 1) {
        fail("uav_count", "must be >= 1");
    }
    if (!(rx_offset > 0.0)) {
        fail("rx_offset", "must be positive");
    }
    for (const auto& [name, s] : scattering) {
        if (!(s >= 0.0 && s < 1.0)) {
            fail("scattering." + name, "must be in [0, 1)");
        }
    }
    if (vehicle_models.empty()) {
        fail("vehicle_models", "must not be empty");
    }
    for (const auto& m : vehicle_models) {
        if (!(m.length_mm > 0.0 && m.width_mm > 0.0 && m.height_mm > 0.0)) {
            fail("vehicle_models." + m.name, "dimensions must be positive");
        }
        if (!(m.v_max > 0.0)) {
            fail("vehicle_models." + m.name, "v_max must be positive");
        }
    }
    TraceConfig t = trace;
    t.frequency_hz = frequency_hz;
    t.tx_power_dbm = tx_power_dbm;
    t.validate();
}

RunConfig parse_config_json(const json& doc, const std::filesystem::path& base_dir)
{
    reject_unknown(doc,
                   {"frequency_hz", "tx_power_dbm", "tx_position", "altitudes", "t_sam", "duration", "seed", "scene",
                    "routes", "output_dir", "uav_count", "rx_offset", "trace", "scattering", "vehicle_models"},
                   "");
    RunConfig cfg;
    if (doc.contains("frequency_hz")) cfg.frequency_hz = get_number(doc, "frequency_hz", "frequency_hz");
    if (doc.contains("tx_power_dbm")) cfg.tx_power_dbm = get_number(doc, "tx_power_dbm", "tx_power_dbm");
    if (doc.contains("tx_position")) cfg.tx_position = get_vec3(doc.at("tx_position"), "tx_position");
    if (doc.contains("altitudes")) {
        const json& a = doc.at("altitudes");
        if (!a.is_array()) {
            fail("altitudes", "expected a list of numbers");
        }
        cfg.altitudes.clear();
        for (const auto& v : a) {
            if (!v.is_number()) {
                fail("altitudes", "expected a list of numbers");
            }
            cfg.altitudes.push_back(v.get<double>());
        }
    }
    if (doc.contains("t_sam")) cfg.t_sam = get_number(doc, "t_sam", "t_sam");
    if (doc.contains("duration")) cfg.duration = get_number(doc, "duration", "duration");
    if (doc.contains("seed")) {
        const json& s = doc.at("seed");
        if (!s.is_number_unsigned()) {
            fail("seed", "expected a non-negative integer");
        }
        cfg.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("scene")) cfg.scene_path = resolve(base_dir, get_string(doc, "scene", "scene"));
    else cfg.scene_path = resolve(base_dir, cfg.scene_path.string());
    if (doc.contains("routes")) cfg.routes_path = resolve(base_dir, get_string(doc, "routes", "routes"));
    else cfg.routes_path = resolve(base_dir, cfg.routes_path.string());
    if (doc.contains("output_dir")) cfg.output_dir = get_string(doc, "output_dir", "output_dir");
    if (doc.contains("uav_count")) cfg.uav_count = get_int(doc, "uav_count", "uav_count");
    if (doc.contains("rx_offset")) cfg.rx_offset = get_number(doc, "rx_offset", "rx_offset");
    if (doc.contains("trace")) parse_trace(doc.at("trace"), cfg.trace);
    if (doc.contains("scattering")) {
        const json& s = doc.at("scattering");
        if (!s.is_object()) {
            fail("scattering", "expected {material: S}");
        }
        for (const auto& [name, value] : s.items()) {
            if (!value.is_number()) {
                fail("scattering." + name, "expected a number");
            }
            cfg.scattering[name] = value.get<double>();
        }
    }
    if (doc.contains("vehicle_models")) {
        const json& list = doc.at("vehicle_models");
        if (!list.is_array()) {
            fail("vehicle_models", "expected a list");
        }
        cfg.vehicle_models.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
            cfg.vehicle_models.push_back(parse_vehicle(list[i], "vehicle_models[" + std::to_string(i) + "]"));
        }
    }
    cfg.trace.frequency_hz = cfg.frequency_hz;
    cfg.trace.tx_power_dbm = cfg.tx_power_dbm;
    cfg.validate();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) {
        throw ConfigError("config file not found: " + path.string());
    }
    return parse_config_json(parse_json(read_text_file(path), path.string()), path.parent_path());
}

} // namespace uavprop
