// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>

#include "uavprop/raytracer.hpp"

namespace uavprop {

namespace {

/// Point on segment [a, b] minimizing |tx - p| + |p - rx|. Empty when the
/// optimum falls on an end point (corner diffraction is not modeled).
std::optional<Vec3> diffraction_point(const DiffractionEdge& edge, const Vec3& tx, const Vec3& rx)
{
    const Vec3 axis = edge.b - edge.a;
    const double length = norm(axis);
    const Vec3 e = axis / length;
    const double s1 = dot(tx - edge.a, e);
    const double s2 = dot(rx - edge.a, e);
    const double r1 = norm(tx - edge.a - e * s1);
    const double r2 = norm(rx - edge.a - e * s2);
    if (r1 + r2 <= 0.0) {
        return std::nullopt;
    }
    // Equal angles with the edge on both sides (Keller cone).
    const double s = s1 + (s2 - s1) * r1 / (r1 + r2);
    const double margin = 1e-6 * length;
    if (s <= margin || s >= length - margin) {
        return std::nullopt;
    }
    return edge.a + e * s;
}

double distance_to_line(const Vec3& p, const Vec3& a, const Vec3& b)
{
    const Vec3 d = normalized(b - a);
    const Vec3 w = p - a;
    return norm(w - d * dot(w, d));
}

} // namespace

std::vector<RayPath> trace_diffraction(const SceneIndex& index, const Vec3& tx, const Vec3& rx,
                                       const TraceConfig& cfg, const TraceOptions& opts)
{
    std::vector<RayPath> paths;
    if (!cfg.enable_diffraction || index.edges().empty()) {
        return paths;
    }
    const Bvh& bvh = index.bvh();
    const std::vector<int> blockers = bvh.faces_crossing(tx, rx, opts.rx_body);
    if (blockers.empty()) {
        return paths;
    }
    std::set<int> blocking_objects;
    for (int f : blockers) {
        blocking_objects.insert(index.scene().face(f).object_id);
    }
    const double lambda = cfg.wavelength_m();
    for (const auto& edge : index.edges()) {
        if (!blocking_objects.contains(edge.object_id)) {
            continue;
        }
        const auto p = diffraction_point(edge, tx, rx);
        if (!p) {
            continue;
        }
        const double d1 = distance(tx, *p);
        const double d2 = distance(*p, rx);
        if (d1 <= 2.0 * kRayEpsilon || d2 <= 2.0 * kRayEpsilon) {
            continue;
        }
        // The edge belongs to an object that blocks the direct path, so the clearance is positive.
        const double h = distance_to_line(*p, tx, rx);
        const double nu = knife_edge_parameter(h, d1, d2, lambda);
        if (knife_edge_loss(nu) > cfg.diffraction_max_loss_db) {
            continue;
        }
        if (bvh.occluded(tx, *p) || bvh.occluded(*p, rx, opts.rx_body)) {
            continue;
        }
        Interaction it;
        it.kind = InteractionKind::Diffraction;
        it.point = *p;
        it.edge_id = edge.edge_id;
        it.nu = nu;
        paths.push_back(make_path(tx, rx, {it}));
    }
    std::sort(paths.begin(), paths.end(), canonical_less);
    return paths;
}

} // namespace uavprop
