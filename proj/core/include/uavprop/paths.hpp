// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "uavprop/vec3.hpp"

namespace uavprop {

enum class InteractionKind : char {
    Reflection = 'R',
    Diffraction = 'D',
    Scattering = 'S',
};

struct Interaction {
    InteractionKind kind = InteractionKind::Reflection;
    Vec3 point;
    int face_id = -1;  // R and S
    int edge_id = -1;  // D
    double nu = 0.0;          // knife-edge parameter, D only
    double tile_area = 0.0;   // scattering tile area in m^2, S only

    bool operator==(const Interaction&) const = default;
};

/// One propagation path from tx to rx.
/// `departure_dir` points from tx toward the first point; `arrival_dir`
/// points from rx back toward the last point (the direction the wave came from).
struct RayPath {
    Vec3 tx;
    Vec3 rx;
    std::vector<Interaction> interactions;
    double length = 0.0;
    Vec3 departure_dir;
    Vec3 arrival_dir;

    /// "Tx-R-S-Rx" style label.
    std::string signature() const;
    /// tx, interaction points..., rx.
    std::vector<Vec3> points() const;
    bool is_los() const { return interactions.empty(); }
    bool has_kind(InteractionKind kind) const;

    bool operator==(const RayPath&) const = default;
};

/// Builds a path through `interactions`, filling length and directions.
RayPath make_path(const Vec3& tx, const Vec3& rx, std::vector<Interaction> interactions);

/// Canonical order used for dedup and output: interaction count, then kinds, face/edge ids, points.
bool canonical_less(const RayPath& a, const RayPath& b);

} // namespace uavprop
