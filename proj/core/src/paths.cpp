// SPDX-License-Identifier: Apache-2.0
#include "uavprop/paths.hpp"

#include <algorithm>
#include <tuple>

namespace uavprop {

std::string RayPath::signature() const
{
    std::string s = "Tx";
    for (const auto& i : interactions) {
        s += '-';
        s += static_cast<char>(i.kind);
    }
    s += "-Rx";
    return s;
}

std::vector<Vec3> RayPath::points() const
{
    std::vector<Vec3> pts;
    pts.reserve(interactions.size() + 2);
    pts.push_back(tx);
    for (const auto& i : interactions) {
        pts.push_back(i.point);
    }
    pts.push_back(rx);
    return pts;
}

bool RayPath::has_kind(InteractionKind kind) const
{
    return std::any_of(interactions.begin(), interactions.end(),
                       [kind](const Interaction& i) { return i.kind == kind; });
}

RayPath make_path(const Vec3& tx, const Vec3& rx, std::vector<Interaction> interactions)
{
    RayPath path;
    path.tx = tx;
    path.rx = rx;
    path.interactions = std::move(interactions);
    const auto pts = path.points();
    for (std::size_t i = 1; i < pts.size(); ++i) {
        path.length += distance(pts[i - 1], pts[i]);
    }
    path.departure_dir = normalized(pts[1] - pts[0]);
    path.arrival_dir = normalized(pts[pts.size() - 2] - pts.back());
    return path;
}

bool canonical_less(const RayPath& a, const RayPath& b)
{
    if (a.interactions.size() != b.interactions.size()) {
        return a.interactions.size() < b.interactions.size();
    }
    for (std::size_t i = 0; i < a.interactions.size(); ++i) {
        const auto& x = a.interactions[i];
        const auto& y = b.interactions[i];
        const auto kx = std::tuple(static_cast<char>(x.kind), x.face_id, x.edge_id);
        const auto ky = std::tuple(static_cast<char>(y.kind), y.face_id, y.edge_id);
        if (kx != ky) {
            return kx < ky;
        }
    }
    for (std::size_t i = 0; i < a.interactions.size(); ++i) {
        if (a.interactions[i].point != b.interactions[i].point) {
            return a.interactions[i].point < b.interactions[i].point;
        }
    }
    return false;
}

} // namespace uavprop
