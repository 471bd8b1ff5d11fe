// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavprop/electromagnetics.hpp"
#include "uavprop/vec3.hpp"

namespace uavprop {

/// Minimum hit distance along a ray; keeps interaction points from re-hitting their own face.
inline constexpr double kRayEpsilon = 1e-4;

/// Faces below this area are rejected as degenerate.
inline constexpr double kMinFaceArea = 1e-9;

struct Aabb {
    Vec3 min{1e300, 1e300, 1e300};
    Vec3 max{-1e300, -1e300, -1e300};

    bool empty() const { return min.x > max.x; }
    void extend(const Vec3& p)
    {
        min = min_components(min, p);
        max = max_components(max, p);
    }
    void extend(const Aabb& b)
    {
        if (!b.empty()) {
            extend(b.min);
            extend(b.max);
        }
    }
    Vec3 extent() const { return max - min; }
    Vec3 center() const { return (min + max) * 0.5; }
};

struct Face {
    std::array<Vec3, 3> vertices;
    std::string material_id;
    int material_index = 0;
    int face_id = 0;
    int object_id = 0;  // box or mesh the face was created from

    /// Unit normal from the vertex winding (right-hand rule).
    Vec3 normal() const;
    double area() const;
    Vec3 centroid() const { return (vertices[0] + vertices[1] + vertices[2]) / 3.0; }
};

/// Triangle soup with a material table. Boxes are tessellated into 12
/// outward-facing triangles on insertion. Face ids are contiguous from 0.
class Scene {
public:
    Scene() = default;

    /// Adds or replaces a material; the name is taken from `material.name`.
    void add_material(const Material& material);
    bool has_material(const std::string& name) const { return material_lookup_.contains(name); }
    const Material& material(const std::string& name) const;
    const Material& material_of(const Face& face) const { return materials_[face.material_index]; }
    std::span<const Material> materials() const { return materials_; }
    Material& mutable_material(const std::string& name);

    /// Axis-aligned box; returns the new object id.
    int add_box(const Vec3& min, const Vec3& max, const std::string& material);

    /// Box given by its 8 corners, ordered as bit pattern (x,y,z) -> index x + 2y + 4z.
    int add_oriented_box(const std::array<Vec3, 8>& corners, const std::string& material);

    /// Indexed triangle mesh; returns the new object id.
    int add_mesh(std::span<const Vec3> vertices, std::span<const std::array<int, 3>> triangles,
                 const std::string& material);

    /// Appends every face of `other` as new objects (materials must already exist or are copied).
    void append(const Scene& other);

    std::span<const Face> faces() const { return faces_; }
    const Face& face(int face_id) const { return faces_[static_cast<std::size_t>(face_id)]; }
    std::size_t face_count() const { return faces_.size(); }
    int object_count() const { return object_count_; }
    const Aabb& bounds() const { return bounds_; }

private:
    void add_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const std::string& material,
                      int material_index, int object_id);
    int require_material(const std::string& name) const;

    std::vector<Face> faces_;
    std::vector<Material> materials_;
    std::map<std::string, int> material_lookup_;
    Aabb bounds_;
    int object_count_ = 0;
};

/// Reflection of `p` across the face's supporting plane.
Vec3 mirror_point(const Vec3& p, const Face& face);

/// Parses the scene JSON schema:
/// { "materials": {name: {eps_real, sigma, is_pec, scattering_s}},
///   "boxes": [{min, max, material}], "meshes": [{vertices, triangles, material}] }
Scene parse_scene(const nlohmann::json& doc);
Scene load_scene(const std::filesystem::path& path);

/// Canonical form: materials plus one mesh per run of faces sharing an object,
/// keys sorted, 9 significant digits. Loading the output reproduces it exactly.
nlohmann::json scene_to_json(const Scene& scene);
std::string serialize_scene(const Scene& scene);

nlohmann::json material_to_json(const Material& material);
Material material_from_json(const std::string& name, const nlohmann::json& doc);

} // namespace uavprop
