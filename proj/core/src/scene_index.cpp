// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <map>

#include "uavprop/error.hpp"
#include "uavprop/raytracer.hpp"

namespace uavprop {

FaceGeometry::FaceGeometry(const Face& face)
    : v0(face.vertices[0]),
      e1(face.vertices[1] - face.vertices[0]),
      e2(face.vertices[2] - face.vertices[0]),
      normal(face.normal())
{
    d00 = dot(e1, e1);
    d01 = dot(e1, e2);
    d11 = dot(e2, e2);
    inv_denom = 1.0 / (d00 * d11 - d01 * d01);
}

bool FaceGeometry::contains(const Vec3& p, double tol) const
{
    const Vec3 w = p - v0;
    const double d20 = dot(w, e1);
    const double d21 = dot(w, e2);
    const double b1 = (d11 * d20 - d01 * d21) * inv_denom;
    const double b2 = (d00 * d21 - d01 * d20) * inv_denom;
    return b1 >= -tol && b2 >= -tol && b1 + b2 <= 1.0 + tol;
}

SceneIndex::SceneIndex(Scene scene, double tile_area, double frequency_hz)
    : scene_(std::move(scene)),
      bvh_(scene_),
      edges_(extract_diffraction_edges(scene_)),
      tile_area_(tile_area),
      frequency_hz_(frequency_hz)
{
    geometry_.reserve(scene_.face_count());
    for (const auto& f : scene_.faces()) {
        geometry_.emplace_back(f);
    }
    if (tile_area_ > 0.0) {
        tiles_ = tessellate_tiles(scene_, tile_area_);
        build_tile_tree();
    }
}

void SceneIndex::build_tile_tree()
{
    if (tiles_.empty()) {
        return;
    }
    std::vector<double> per_material;
    for (const auto& m : scene_.materials()) {
        per_material.push_back(max_scatter_factor(m, frequency_hz_));
    }
    scatter_factor_.reserve(scene_.face_count());
    for (const auto& f : scene_.faces()) {
        scatter_factor_.push_back(per_material[static_cast<std::size_t>(f.material_index)]);
    }
    tile_nodes_.reserve(2 * tiles_.size() / kTileLeafSize + 1);
    build_tile_node(0, static_cast<int>(tiles_.size()));
}

int SceneIndex::build_tile_node(int begin, int end)
{
    const int index = static_cast<int>(tile_nodes_.size());
    tile_nodes_.emplace_back();
    TileNode node;
    for (int i = begin; i < end; ++i) {
        const ScatterTile& t = tiles_[static_cast<std::size_t>(i)];
        node.box.extend(t.center);
        node.max_weight = std::max(node.max_weight, t.area * scatter_factor(t.face_id));
    }
    if (end - begin <= kTileLeafSize) {
        node.first = begin;
        node.count = end - begin;
        tile_nodes_[static_cast<std::size_t>(index)] = node;
        return index;
    }
    const Vec3 extent = node.box.extent();
    const int axis = extent.x >= extent.y && extent.x >= extent.z ? 0 : (extent.y >= extent.z ? 1 : 2);
    const int mid = begin + (end - begin) / 2;
    auto first = tiles_.begin() + begin;
    std::nth_element(first, tiles_.begin() + mid, tiles_.begin() + end,
                     [axis](const ScatterTile& a, const ScatterTile& b) {
                         if (a.center[axis] != b.center[axis]) {
                             return a.center[axis] < b.center[axis];
                         }
                         if (a.face_id != b.face_id) {
                             return a.face_id < b.face_id;
                         }
                         return a.center < b.center;
                     });
    node.first = build_tile_node(begin, mid);
    node.second = build_tile_node(mid, end);
    tile_nodes_[static_cast<std::size_t>(index)] = node;
    return index;
}

std::vector<DiffractionEdge> extract_diffraction_edges(const Scene& scene)
{
    using Key = std::pair<Vec3, Vec3>;
    std::map<Key, std::vector<int>> adjacency;
    std::vector<Key> first_seen;
    for (const auto& f : scene.faces()) {
        for (int k = 0; k < 3; ++k) {
            Vec3 a = f.vertices[static_cast<std::size_t>(k)];
            Vec3 b = f.vertices[static_cast<std::size_t>((k + 1) % 3)];
            if (b < a) {
                std::swap(a, b);
            }
            auto [it, inserted] = adjacency.try_emplace(Key{a, b});
            if (inserted) {
                first_seen.push_back(it->first);
            }
            it->second.push_back(f.face_id);
        }
    }

    std::vector<DiffractionEdge> edges;
    for (const auto& key : first_seen) {
        const auto& faces = adjacency.at(key);
        const auto& [a, b] = key;
        const Vec3 d = b - a;
        const double len = norm(d);
        if (std::fabs(a.z) < 1e-6 && std::fabs(b.z) < 1e-6) {
            continue;  // lies on the ground
        }
        const bool vertical = std::hypot(d.x, d.y) <= 1e-6 * len;
        const bool horizontal = std::fabs(d.z) <= 1e-6 * len;
        if (!vertical && !horizontal) {
            continue;
        }
        bool crease = faces.size() == 1;
        const Vec3 n0 = scene.face(faces.front()).normal();
        for (std::size_t i = 1; i < faces.size() && !crease; ++i) {
            crease = std::fabs(dot(n0, scene.face(faces[i]).normal())) < 1.0 - 1e-9;
        }
        if (!crease) {
            continue;
        }
        edges.push_back({static_cast<int>(edges.size()), a, b, scene.face(faces.front()).object_id});
    }
    return edges;
}

std::vector<ScatterTile> tessellate_tiles(const Scene& scene, double tile_area)
{
    std::vector<ScatterTile> tiles;
    for (const auto& f : scene.faces()) {
        const double area = f.area();
        const int n = std::max(1, static_cast<int>(std::ceil(std::sqrt(area / tile_area) - 1e-12)));
        const double sub_area = area / (static_cast<double>(n) * n);
        const Vec3& v0 = f.vertices[0];
        const Vec3 e1 = (f.vertices[1] - v0) / n;
        const Vec3 e2 = (f.vertices[2] - v0) / n;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; i + j < n; ++j) {
                tiles.push_back({f.face_id, v0 + e1 * (i + 1.0 / 3.0) + e2 * (j + 1.0 / 3.0), sub_area});
                if (i + j < n - 1) {
                    tiles.push_back({f.face_id, v0 + e1 * (i + 2.0 / 3.0) + e2 * (j + 2.0 / 3.0), sub_area});
                }
            }
        }
    }
    return tiles;
}

std::vector<Vec3> launch_directions(double spacing_deg)
{
    if (!(spacing_deg > 0.0)) {
        throw ConfigError("ray spacing must be positive");
    }
    const double ratio = 90.0 / spacing_deg;
    const long k = std::lround(ratio);
    if (k < 1 || std::fabs(ratio - static_cast<double>(k)) > 1e-9) {
        throw ConfigError("ray spacing must divide 90 evenly");
    }
    const double step = kPi / 180.0 * spacing_deg;
    std::vector<Vec3> dirs;
    dirs.reserve(static_cast<std::size_t>((2 * k - 1) * 4 * k + 2));
    dirs.push_back({0.0, 0.0, -1.0});
    for (long ring = 1; ring < 2 * k; ++ring) {
        const double el = -0.5 * kPi + static_cast<double>(ring) * step;
        const double ce = std::cos(el);
        const double se = std::sin(el);
        for (long j = 0; j < 4 * k; ++j) {
            const double az = static_cast<double>(j) * step;
            dirs.push_back({ce * std::cos(az), ce * std::sin(az), se});
        }
    }
    dirs.push_back({0.0, 0.0, 1.0});
    return dirs;
}

} // namespace uavprop
