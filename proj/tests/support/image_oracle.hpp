// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force image-method enumeration used as the reference for the specular tracer.

#include <algorithm>
#include <random>
#include <vector>

#include "test_support.hpp"
#include "uavprop/bvh.hpp"
#include "uavprop/scene.hpp"

namespace uavprop::testing {

// `edge_margin` > 0 ignores crossings within that distance (m) of a triangle edge.
inline bool segment_hits_face(const Face& f, const Vec3& a, const Vec3& b, double edge_margin = 0.0)
{
    const Vec3 n = cross(f.vertices[1] - f.vertices[0], f.vertices[2] - f.vertices[0]);
    const Vec3 d = b - a;
    const double len = norm(d);
    const double denom = dot(n, d);
    if (std::abs(denom) < 1e-15) {
        return false;
    }
    const double s = dot(n, f.vertices[0] - a) / denom;
    if (!(s * len > kRayEpsilon && s * len < len - kRayEpsilon)) {
        return false;
    }
    const Vec3 p = a + d * s;
    for (int k = 0; k < 3; ++k) {
        const Vec3& u = f.vertices[static_cast<std::size_t>(k)];
        const Vec3& w = f.vertices[static_cast<std::size_t>((k + 1) % 3)];
        if (dot(cross(w - u, p - u), n) < edge_margin * norm(w - u) * norm(n)) {
            return false;
        }
    }
    return true;
}

inline bool oracle_occluded(const Scene& scene, const Vec3& a, const Vec3& b)
{
    return std::any_of(scene.faces().begin(), scene.faces().end(),
                       [&](const Face& f) { return segment_hits_face(f, a, b); });
}

inline Vec3 oracle_mirror(const Vec3& p, const Face& f)
{
    const Vec3 n = normalized(cross(f.vertices[1] - f.vertices[0], f.vertices[2] - f.vertices[0]));
    return p - n * (2.0 * dot(p - f.vertices[0], n));
}

inline bool oracle_inside(const Face& f, const Vec3& p)
{
    const Vec3 n = cross(f.vertices[1] - f.vertices[0], f.vertices[2] - f.vertices[0]);
    for (int k = 0; k < 3; ++k) {
        const Vec3& u = f.vertices[static_cast<std::size_t>(k)];
        const Vec3& w = f.vertices[static_cast<std::size_t>((k + 1) % 3)];
        if (dot(cross(w - u, p - u), n) < 0.0) {
            return false;
        }
    }
    return true;
}

struct OraclePath {
    std::vector<int> faces;
    std::vector<Vec3> points;
};

// Plain image-method enumeration over every face sequence of length 1 and 2.
inline std::vector<OraclePath> enumerate_images(const Scene& scene, const Vec3& tx, const Vec3& rx)
{
    std::vector<OraclePath> out;
    const int n = static_cast<int>(scene.face_count());
    auto emit = [&](std::vector<int> faces) {
        std::vector<Vec3> images{tx};
        for (int f : faces) {
            images.push_back(oracle_mirror(images.back(), scene.face(f)));
        }
        std::vector<Vec3> points(faces.size());
        Vec3 target = rx;
        for (std::size_t i = faces.size(); i-- > 0;) {
            const Face& f = scene.face(faces[i]);
            const Vec3 nrm = normalized(f.normal());
            const double dt = dot(target - f.vertices[0], nrm);
            const double di = dot(images[i + 1] - f.vertices[0], nrm);
            if (!(dt * di < 0.0)) {
                return;
            }
            const Vec3 p = target + (images[i + 1] - target) * (dt / (dt - di));
            if (!oracle_inside(f, p)) {
                return;
            }
            points[i] = p;
            target = p;
        }
        Vec3 prev = tx;
        for (const Vec3& p : points) {
            if (oracle_occluded(scene, prev, p)) {
                return;
            }
            prev = p;
        }
        if (oracle_occluded(scene, prev, rx)) {
            return;
        }
        out.push_back({std::move(faces), std::move(points)});
    };
    for (int a = 0; a < n; ++a) {
        emit({a});
        for (int b = 0; b < n; ++b) {
            if (b != a) {
                emit({a, b});
            }
        }
    }
    return out;
}

// Ground plus up to six random walls and panels: at most 8 faces.
inline Scene random_small_scene(std::mt19937_64& rng)
{
    Scene scene;
    scene.add_material(testing::concrete_material());
    scene.add_material(testing::pec_material());
    testing::add_ground(scene, 40.0, "concrete");
    std::uniform_real_distribution<double> u(-15.0, 15.0);
    std::uniform_real_distribution<double> h(2.0, 20.0);
    std::uniform_int_distribution<int> count(3, 6);
    const int extra = count(rng);
    for (int i = 0; i < extra; ++i) {
        const Vec3 a{u(rng), u(rng), 0.0};
        const Vec3 b{u(rng), u(rng), 0.0};
        const Vec3 top = (a + b) * 0.5 + Vec3{0.0, 0.0, h(rng)};
        if (distance(a, b) < 2.0) {
            --i;
            continue;
        }
        const std::vector<Vec3> v{a, b, top};
        const std::vector<std::array<int, 3>> t{{0, 1, 2}};
        scene.add_mesh(v, t, i % 2 == 0 ? "concrete" : "metal");
    }
    return scene;
}

} // namespace uavprop::testing
