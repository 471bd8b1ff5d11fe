// SPDX-License-Identifier: Apache-2.0
#pragma once

// Image-method solver shared by the specular and diffuse tracers.

#include <array>
#include <cstddef>

#include "uavprop/raytracer.hpp"

namespace uavprop {

/// Solves reflection points for `faces` between src and dst by mirroring src
/// across each plane and walking back from dst. Returns false if any point
/// misses its face or the geometry is degenerate. No occlusion testing.
inline bool solve_reflections(const SceneIndex& index, const Vec3& src, const Vec3& dst, const int* faces,
                       std::size_t depth, std::array<Vec3, kMaxReflectionDepth>& points)
{
    std::array<Vec3, kMaxReflectionDepth + 1> images;
    images[0] = src;
    for (std::size_t i = 0; i < depth; ++i) {
        if (i > 0 && faces[i] == faces[i - 1]) {
            return false;
        }
        images[i + 1] = index.geometry(faces[i]).mirror(images[i]);
    }
    Vec3 target = dst;
    for (std::size_t i = depth; i-- > 0;) {
        const FaceGeometry& g = index.geometry(faces[i]);
        const Vec3& image = images[i + 1];
        const double d_target = g.signed_distance(target);
        const double d_image = g.signed_distance(image);
        if (!(d_target * d_image < 0.0)) {
            return false;
        }
        const double s = d_target / (d_target - d_image);
        const Vec3 p = target + (image - target) * s;
        if (!g.contains(p)) {
            return false;
        }
        points[i] = p;
        target = p;
    }
    return true;
}

} // namespace uavprop
