// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uavprop/scene.hpp"

namespace uavprop {

struct Hit {
    double t = 0.0;
    Vec3 point;
    int face_id = -1;
    double u = 0.0;  // barycentric weight of vertex 1
    double v = 0.0;  // barycentric weight of vertex 2
};

/// Half-open range of face ids ignored by a query (e.g. a receiver's own airframe).
struct FaceRange {
    int begin = 0;
    int end = 0;
    bool contains(int face_id) const { return face_id >= begin && face_id < end; }
};

/// Single-ray triangle test (Moller-Trumbore). Returns t, or nothing when the
/// ray misses or runs parallel to the triangle.
std::optional<Hit> intersect_triangle(const Face& face, const Vec3& origin, const Vec3& dir);

/// Binary bounding-volume hierarchy over the scene triangles.
/// Immutable after construction; queries are safe from many threads.
class Bvh {
public:
    Bvh() = default;
    explicit Bvh(const Scene& scene);

    /// Nearest hit with kRayEpsilon < t <= t_max. Equal t resolves to the lowest face id.
    std::optional<Hit> intersect(const Vec3& origin, const Vec3& dir, double t_max,
                                 FaceRange skip = {}) const;

    /// True iff some face crosses the open segment (a, b), excluding kRayEpsilon at each end.
    bool occluded(const Vec3& a, const Vec3& b, FaceRange skip = {}) const;

    /// Ids of every face crossed by the open segment (a, b), ascending.
    std::vector<int> faces_crossing(const Vec3& a, const Vec3& b, FaceRange skip = {}) const;

    bool empty() const { return nodes_.empty(); }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t leaf_count() const;
    /// Face ids in leaf order; every face appears exactly once.
    const std::vector<int>& leaf_faces() const { return order_; }

private:
    struct Node {
        Aabb box;
        std::uint32_t first = 0;   // left child (inner) or first primitive (leaf)
        std::uint32_t second = 0;  // right child (inner)
        std::uint32_t count = 0;   // primitive count; 0 for inner nodes
    };
    struct Triangle {
        Vec3 v0, e1, e2;
        int face_id = 0;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids,
                        const std::vector<Aabb>& boxes);
    template <typename Visitor>
    void traverse(const Vec3& origin, const Vec3& dir, double& t_max, Visitor&& visit) const;

    std::vector<Node> nodes_;
    std::vector<Triangle> triangles_;  // in leaf order
    std::vector<int> order_;
};

} // namespace uavprop
