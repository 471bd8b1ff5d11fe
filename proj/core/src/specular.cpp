// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "reflection_solver.hpp"
#include "uavprop/raytracer.hpp"

namespace uavprop {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

bool segments_clear(const SceneIndex& index, const Vec3& tx, const Vec3& rx,
                    const std::array<Vec3, kMaxReflectionDepth>& points, std::size_t depth, FaceRange rx_body)
{
    const Bvh& bvh = index.bvh();
    Vec3 prev = tx;
    for (std::size_t i = 0; i < depth; ++i) {
        if (distance(prev, points[i]) <= 2.0 * kRayEpsilon || bvh.occluded(prev, points[i])) {
            return false;
        }
        prev = points[i];
    }
    return distance(prev, rx) > 2.0 * kRayEpsilon && !bvh.occluded(prev, rx, rx_body);
}

RayPath build_path(const Vec3& tx, const Vec3& rx, const int* faces, std::size_t depth,
                   const std::array<Vec3, kMaxReflectionDepth>& points)
{
    std::vector<Interaction> interactions;
    interactions.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        Interaction it;
        it.kind = InteractionKind::Reflection;
        it.point = points[i];
        it.face_id = faces[i];
        interactions.push_back(it);
    }
    return make_path(tx, rx, std::move(interactions));
}

/// Tries one face sequence and appends the path when valid.
void try_sequence(const SceneIndex& index, const Vec3& tx, const Vec3& rx, const int* faces, std::size_t depth,
                  FaceRange rx_body, std::vector<RayPath>& out)
{
    std::array<Vec3, kMaxReflectionDepth> points;
    if (solve_reflections(index, tx, rx, faces, depth, points) &&
        segments_clear(index, tx, rx, points, depth, rx_body)) {
        out.push_back(build_path(tx, rx, faces, depth, points));
    }
}

void enumerate_all(const SceneIndex& index, const Vec3& tx, const Vec3& rx, std::size_t depth,
                   std::vector<int>& prefix, FaceRange rx_body, std::vector<RayPath>& out)
{
    const int n = static_cast<int>(index.scene().face_count());
    if (prefix.size() == depth) {
        try_sequence(index, tx, rx, prefix.data(), depth, rx_body, out);
        return;
    }
    for (int f = 0; f < n; ++f) {
        if (!prefix.empty() && prefix.back() == f) {
            continue;
        }
        prefix.push_back(f);
        enumerate_all(index, tx, rx, depth, prefix, rx_body, out);
        prefix.pop_back();
    }
}

/// Depth-1 and depth-2 enumeration with side-of-plane pruning.
void enumerate_shallow(const SceneIndex& index, const Vec3& tx, const Vec3& rx, int depth, FaceRange rx_body,
                       std::vector<RayPath>& out)
{
    const auto& geometry = index.geometry();
    const int n = static_cast<int>(geometry.size());
    std::vector<double> rx_side(static_cast<std::size_t>(n));
    for (int f = 0; f < n; ++f) {
        rx_side[static_cast<std::size_t>(f)] = geometry[static_cast<std::size_t>(f)].signed_distance(rx);
    }
    for (int f1 = 0; f1 < n; ++f1) {
        const FaceGeometry& g1 = geometry[static_cast<std::size_t>(f1)];
        const double tx_side = g1.signed_distance(tx);
        if (tx_side == 0.0) {
            continue;
        }
        if (tx_side * rx_side[static_cast<std::size_t>(f1)] > 0.0) {
            const int seq[1] = {f1};
            try_sequence(index, tx, rx, seq, 1, rx_body, out);
        }
        if (depth < 2) {
            continue;
        }
        const Vec3 image1 = g1.mirror(tx);
        for (int f2 = 0; f2 < n; ++f2) {
            if (f2 == f1) {
                continue;
            }
            // rx and the first image must lie on the same side of the second plane.
            const double side = geometry[static_cast<std::size_t>(f2)].signed_distance(image1);
            if (!(side * rx_side[static_cast<std::size_t>(f2)] > 0.0)) {
                continue;
            }
            const int seq[2] = {f1, f2};
            try_sequence(index, tx, rx, seq, 2, rx_body, out);
        }
    }
}

/// Drops paths that retrace an earlier path's geometry through a different
/// triangle of the same plane (reflection point on a shared edge).
std::vector<RayPath> remove_coincident(std::vector<RayPath> paths)
{
    std::vector<RayPath> kept;
    kept.reserve(paths.size());
    for (auto& p : paths) {
        const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const RayPath& k) {
            if (k.interactions.size() != p.interactions.size() || std::fabs(k.length - p.length) > 1e-9) {
                return false;
            }
            for (std::size_t i = 0; i < k.interactions.size(); ++i) {
                if (k.interactions[i].kind != p.interactions[i].kind ||
                    distance(k.interactions[i].point, p.interactions[i].point) > 1e-7) {
                    return false;
                }
            }
            return true;
        });
        if (!duplicate) {
            kept.push_back(std::move(p));
        }
    }
    return kept;
}

} // namespace

std::vector<FaceSequence> discover_sequences(const SceneIndex& index, const Vec3& source, const TraceConfig& cfg)
{
    std::vector<FaceSequence> found;
    const int min_depth = cfg.exhaustive_reflections + 1;
    if (cfg.max_reflections < min_depth || index.scene().face_count() == 0) {
        return found;
    }
    const Bvh& bvh = index.bvh();
    for (const Vec3& launch : launch_directions(cfg.ray_spacing_deg)) {
        Vec3 origin = source;
        Vec3 dir = launch;
        FaceSequence seq;
        for (int depth = 1; depth <= cfg.max_reflections; ++depth) {
            const auto hit = bvh.intersect(origin, dir, kInfinity);
            if (!hit) {
                break;
            }
            seq.push_back(hit->face_id);
            if (depth >= min_depth) {
                found.push_back(seq);
            }
            dir = normalized(reflect(dir, index.geometry(hit->face_id).normal));
            origin = hit->point;
        }
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

std::optional<RayPath> image_path(const SceneIndex& index, const Vec3& tx, const Vec3& rx, const FaceSequence& faces,
                                  FaceRange rx_body)
{
    if (faces.size() > static_cast<std::size_t>(kMaxReflectionDepth)) {
        return std::nullopt;
    }
    for (int f : faces) {
        if (f < 0 || static_cast<std::size_t>(f) >= index.scene().face_count()) {
            return std::nullopt;
        }
    }
    std::vector<RayPath> out;
    try_sequence(index, tx, rx, faces.data(), faces.size(), rx_body, out);
    if (out.empty()) {
        return std::nullopt;
    }
    return std::move(out.front());
}

std::vector<RayPath> trace_specular(const SceneIndex& index, const Vec3& tx, const Vec3& rx, const TraceConfig& cfg,
                                    const TraceOptions& opts)
{
    std::vector<RayPath> paths;
    if (!index.bvh().occluded(tx, rx, opts.rx_body)) {
        paths.push_back(make_path(tx, rx, {}));
    }
    if (index.scene().face_count() == 0 || cfg.max_reflections == 0) {
        return paths;
    }

    const int exhaustive = std::min(cfg.exhaustive_reflections, cfg.max_reflections);
    if (exhaustive >= 1) {
        enumerate_shallow(index, tx, rx, std::min(exhaustive, 2), opts.rx_body, paths);
    }
    for (int depth = 3; depth <= exhaustive; ++depth) {
        std::vector<int> prefix;
        enumerate_all(index, tx, rx, static_cast<std::size_t>(depth), prefix, opts.rx_body, paths);
    }

    if (cfg.max_reflections > exhaustive) {
        std::vector<FaceSequence> local_tx;
        std::vector<FaceSequence> local_rx;
        const auto* from_tx = opts.tx_sequences;
        const auto* from_rx = opts.rx_sequences;
        if (!from_tx) {
            local_tx = discover_sequences(index, tx, cfg);
            from_tx = &local_tx;
        }
        if (!from_rx) {
            local_rx = discover_sequences(index, rx, cfg);
            from_rx = &local_rx;
        }
        std::vector<FaceSequence> candidates = *from_tx;
        for (FaceSequence seq : *from_rx) {
            std::reverse(seq.begin(), seq.end());
            candidates.push_back(std::move(seq));
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        for (const auto& seq : candidates) {
            if (static_cast<int>(seq.size()) > exhaustive && static_cast<int>(seq.size()) <= cfg.max_reflections) {
                try_sequence(index, tx, rx, seq.data(), seq.size(), opts.rx_body, paths);
            }
        }
    }

    std::sort(paths.begin(), paths.end(), canonical_less);
    return remove_coincident(std::move(paths));
}

} // namespace uavprop
