// SPDX-License-Identifier: Apache-2.0
#include "uavprop/scene.hpp"

#include <set>

#include "uavprop/canonical.hpp"
#include "uavprop/error.hpp"

namespace uavprop {

using nlohmann::json;

Vec3 Face::normal() const
{
    return normalized(cross(vertices[1] - vertices[0], vertices[2] - vertices[0]));
}

double Face::area() const
{
    return 0.5 * norm(cross(vertices[1] - vertices[0], vertices[2] - vertices[0]));
}

void Scene::add_material(const Material& material)
{
    material.validate();
    if (auto it = material_lookup_.find(material.name); it != material_lookup_.end()) {
        materials_[static_cast<std::size_t>(it->second)] = material;
        return;
    }
    material_lookup_.emplace(material.name, static_cast<int>(materials_.size()));
    materials_.push_back(material);
}

const Material& Scene::material(const std::string& name) const
{
    return materials_[static_cast<std::size_t>(require_material(name))];
}

Material& Scene::mutable_material(const std::string& name)
{
    return materials_[static_cast<std::size_t>(require_material(name))];
}

int Scene::require_material(const std::string& name) const
{
    auto it = material_lookup_.find(name);
    if (it == material_lookup_.end()) {
        throw ConfigError("unknown material '" + name + "'");
    }
    return it->second;
}

void Scene::add_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const std::string& material,
                         int material_index, int object_id)
{
    Face f{{a, b, c}, material, material_index, static_cast<int>(faces_.size()), object_id};
    if (!is_finite(a) || !is_finite(b) || !is_finite(c)) {
        throw GeometryError("degenerate geometry: non-finite vertex");
    }
    if (!(f.area() > kMinFaceArea)) {
        throw GeometryError("degenerate geometry: triangle area below 1e-9 m^2");
    }
    bounds_.extend(a);
    bounds_.extend(b);
    bounds_.extend(c);
    faces_.push_back(std::move(f));
}

int Scene::add_box(const Vec3& min, const Vec3& max, const std::string& material)
{
    if (!(min.x < max.x && min.y < max.y && min.z < max.z)) {
        throw GeometryError("degenerate geometry: box min must be below max on every axis");
    }
    std::array<Vec3, 8> corners;
    for (int i = 0; i < 8; ++i) {
        corners[static_cast<std::size_t>(i)] = {(i & 1) ? max.x : min.x, (i & 2) ? max.y : min.y,
                                                (i & 4) ? max.z : min.z};
    }
    return add_oriented_box(corners, material);
}

int Scene::add_oriented_box(const std::array<Vec3, 8>& corners, const std::string& material)
{
    const int material_index = require_material(material);
    // Quads listed counter-clockwise as seen from outside.
    static constexpr int quads[6][4] = {
        {0, 2, 3, 1}, {4, 5, 7, 6},  // -z, +z
        {0, 1, 5, 4}, {2, 6, 7, 3},  // -y, +y
        {0, 4, 6, 2}, {1, 3, 7, 5},  // -x, +x
    };
    const int object_id = object_count_++;
    for (const auto& q : quads) {
        const auto& a = corners[static_cast<std::size_t>(q[0])];
        const auto& b = corners[static_cast<std::size_t>(q[1])];
        const auto& c = corners[static_cast<std::size_t>(q[2])];
        const auto& d = corners[static_cast<std::size_t>(q[3])];
        add_triangle(a, b, c, material, material_index, object_id);
        add_triangle(a, c, d, material, material_index, object_id);
    }
    return object_id;
}

int Scene::add_mesh(std::span<const Vec3> vertices, std::span<const std::array<int, 3>> triangles,
                    const std::string& material)
{
    const int material_index = require_material(material);
    const int object_id = object_count_++;
    const int n = static_cast<int>(vertices.size());
    for (const auto& tri : triangles) {
        for (int idx : tri) {
            if (idx < 0 || idx >= n) {
                throw GeometryError("mesh triangle index out of range");
            }
        }
        add_triangle(vertices[static_cast<std::size_t>(tri[0])],
                     vertices[static_cast<std::size_t>(tri[1])],
                     vertices[static_cast<std::size_t>(tri[2])], material, material_index, object_id);
    }
    return object_id;
}

void Scene::append(const Scene& other)
{
    for (const auto& m : other.materials()) {
        if (!has_material(m.name)) {
            add_material(m);
        }
    }
    const int object_base = object_count_;
    for (const auto& f : other.faces()) {
        add_triangle(f.vertices[0], f.vertices[1], f.vertices[2], f.material_id,
                     require_material(f.material_id), object_base + f.object_id);
    }
    object_count_ += other.object_count();
}

Vec3 mirror_point(const Vec3& p, const Face& face)
{
    const Vec3 n = face.normal();
    return p - n * (2.0 * dot(p - face.vertices[0], n));
}

namespace {

Vec3 vec3_from_json(const json& j, const char* what)
{
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError(std::string(what) + ": expected [x, y, z]");
    }
    for (const auto& c : j) {
        if (!c.is_number()) {
            throw ConfigError(std::string(what) + ": coordinates must be numbers");
        }
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            ok = ok || key == a;
        }
        if (!ok) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

} // namespace

Material material_from_json(const std::string& name, const json& doc)
{
    if (!doc.is_object()) {
        throw ConfigError("material '" + name + "': expected an object");
    }
    reject_unknown_keys(doc, {"eps_real", "sigma", "is_pec", "scattering_s"}, "material '" + name + "'");
    Material m;
    m.name = name;
    try {
        m.eps_real = doc.value("eps_real", 1.0);
        m.sigma = doc.value("sigma", 0.0);
        m.is_pec = doc.value("is_pec", false);
        m.scattering_s = doc.value("scattering_s", 0.0);
    } catch (const json::exception& e) {
        throw ConfigError("material '" + name + "': " + e.what());
    }
    m.validate();
    return m;
}

json material_to_json(const Material& m)
{
    return {{"eps_real", m.eps_real}, {"sigma", m.sigma}, {"is_pec", m.is_pec},
            {"scattering_s", m.scattering_s}};
}

Scene parse_scene(const json& doc)
{
    if (!doc.is_object()) {
        throw ConfigError("scene: expected a JSON object");
    }
    reject_unknown_keys(doc, {"materials", "boxes", "meshes"}, "scene");
    Scene scene;
    if (doc.contains("materials")) {
        for (const auto& [name, m] : doc.at("materials").items()) {
            scene.add_material(material_from_json(name, m));
        }
    }
    try {
        if (doc.contains("boxes")) {
            for (const auto& box : doc.at("boxes")) {
                reject_unknown_keys(box, {"min", "max", "material"}, "box");
                scene.add_box(vec3_from_json(box.at("min"), "box.min"),
                              vec3_from_json(box.at("max"), "box.max"),
                              box.at("material").get<std::string>());
            }
        }
        if (doc.contains("meshes")) {
            for (const auto& mesh : doc.at("meshes")) {
                reject_unknown_keys(mesh, {"vertices", "triangles", "material"}, "mesh");
                std::vector<Vec3> vertices;
                for (const auto& v : mesh.at("vertices")) {
                    vertices.push_back(vec3_from_json(v, "mesh.vertices"));
                }
                std::vector<std::array<int, 3>> triangles;
                for (const auto& t : mesh.at("triangles")) {
                    if (!t.is_array() || t.size() != 3) {
                        throw ConfigError("mesh.triangles: expected [i, j, k]");
                    }
                    triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
                }
                scene.add_mesh(vertices, triangles, mesh.at("material").get<std::string>());
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scene: ") + e.what());
    }
    return scene;
}

Scene load_scene(const std::filesystem::path& path)
{
    return parse_scene(parse_json(read_text_file(path), path.string()));
}

json scene_to_json(const Scene& scene)
{
    json materials = json::object();
    for (const auto& m : scene.materials()) {
        materials[m.name] = material_to_json(m);
    }
    json meshes = json::array();
    const auto faces = scene.faces();
    std::size_t i = 0;
    while (i < faces.size()) {
        const int object = faces[i].object_id;
        const std::string& material = faces[i].material_id;
        std::map<Vec3, int> index;
        json vertices = json::array();
        json triangles = json::array();
        for (; i < faces.size() && faces[i].object_id == object && faces[i].material_id == material; ++i) {
            json tri = json::array();
            for (const auto& v : faces[i].vertices) {
                const Vec3 r{canonical_double(v.x), canonical_double(v.y), canonical_double(v.z)};
                auto [it, inserted] = index.emplace(r, static_cast<int>(index.size()));
                if (inserted) {
                    vertices.push_back(vec3_to_json(r));
                }
                tri.push_back(it->second);
            }
            triangles.push_back(std::move(tri));
        }
        meshes.push_back({{"material", material}, {"triangles", triangles}, {"vertices", vertices}});
    }
    return {{"materials", materials}, {"meshes", meshes}};
}

std::string serialize_scene(const Scene& scene)
{
    return canonical_dump(scene_to_json(scene), 1) + "\n";
}

} // namespace uavprop
