// SPDX-License-Identifier: Apache-2.0
#include <string>

#include "uavprop/canonical.hpp"
#include "uavprop/dataset.hpp"

namespace uavprop {

namespace {

std::string quote(const std::string& text)
{
    std::string out = "'";
    for (char c : text) {
        if (c == '\'') {
            out += "''";
        } else {
            out.push_back(c);
        }
    }
    out += "'";
    return out;
}

std::string number(double v) { return format_double(v); }

std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : "NULL"; }

std::string boolean(bool v) { return v ? "1" : "0"; }

} // namespace

std::string export_sql_ddl()
{
    return "CREATE TABLE episodes (\n"
           "  episode_id INTEGER PRIMARY KEY,\n"
           "  altitude REAL NOT NULL,\n"
           "  config TEXT NOT NULL,\n"
           "  scene_count INTEGER NOT NULL\n"
           ");\n"
           "CREATE TABLE scenes (\n"
           "  scene_id INTEGER PRIMARY KEY,\n"
           "  episode_id INTEGER NOT NULL REFERENCES episodes(episode_id),\n"
           "  time REAL NOT NULL,\n"
           "  poses TEXT NOT NULL\n"
           ");\n"
           "CREATE TABLE receivers (\n"
           "  receiver_id INTEGER PRIMARY KEY,\n"
           "  scene_id INTEGER NOT NULL REFERENCES scenes(scene_id),\n"
           "  uav_id INTEGER NOT NULL,\n"
           "  rx_x REAL NOT NULL,\n"
           "  rx_y REAL NOT NULL,\n"
           "  rx_z REAL NOT NULL,\n"
           "  total_power_coherent REAL,\n"
           "  total_power_noncoherent REAL,\n"
           "  los INTEGER NOT NULL,\n"
           "  ray_count INTEGER NOT NULL\n"
           ");\n"
           "CREATE TABLE rays (\n"
           "  ray_id INTEGER PRIMARY KEY,\n"
           "  receiver_id INTEGER NOT NULL REFERENCES receivers(receiver_id),\n"
           "  power REAL NOT NULL,\n"
           "  delay REAL NOT NULL,\n"
           "  aod_az REAL NOT NULL,\n"
           "  aod_el REAL NOT NULL,\n"
           "  aoa_az REAL NOT NULL,\n"
           "  aoa_el REAL NOT NULL,\n"
           "  los INTEGER NOT NULL,\n"
           "  amplitude_re REAL NOT NULL,\n"
           "  amplitude_im REAL NOT NULL,\n"
           "  signature TEXT NOT NULL,\n"
           "  interactions TEXT NOT NULL\n"
           ");\n";
}

std::string export_sql_inserts(const Dataset& ds)
{
    std::string out;
    for (const auto& e : ds.episodes) {
        out += "INSERT INTO episodes VALUES (" + std::to_string(e.episode_id) + ", " + number(e.altitude) + ", " +
               quote(canonical_dump(e.config)) + ", " + std::to_string(e.scene_count) + ");\n";
    }
    for (const auto& s : ds.scenes) {
        out += "INSERT INTO scenes VALUES (" + std::to_string(s.scene_id) + ", " + std::to_string(s.episode_id) +
               ", " + number(s.time) + ", " + quote(canonical_dump(to_json(s).at("poses"))) + ");\n";
    }
    for (const auto& r : ds.receivers) {
        out += "INSERT INTO receivers VALUES (" + std::to_string(r.receiver_id) + ", " + std::to_string(r.scene_id) +
               ", " + std::to_string(r.uav_id) + ", " + number(r.rx_position.x) + ", " + number(r.rx_position.y) +
               ", " + number(r.rx_position.z) + ", " + optional_number(r.total_power_coherent) + ", " +
               optional_number(r.total_power_noncoherent) + ", " + boolean(r.los) + ", " +
               std::to_string(r.ray_count) + ");\n";
    }
    for (const auto& ray : ds.rays) {
        out += "INSERT INTO rays VALUES (" + std::to_string(ray.ray_id) + ", " + std::to_string(ray.receiver_id) +
               ", " + number(ray.power) + ", " + number(ray.delay) + ", " + number(ray.aod_az) + ", " +
               number(ray.aod_el) + ", " + number(ray.aoa_az) + ", " + number(ray.aoa_el) + ", " +
               boolean(ray.los) + ", " + number(ray.amplitude.real()) + ", " + number(ray.amplitude.imag()) + ", " +
               quote(ray.signature) + ", " + quote(canonical_dump(to_json(ray).at("interactions"))) + ");\n";
    }
    return out;
}

std::string export_sql(const Dataset& ds)
{
    return "BEGIN TRANSACTION;\n" + export_sql_ddl() + export_sql_inserts(ds) + "COMMIT;\n";
}

} // namespace uavprop
