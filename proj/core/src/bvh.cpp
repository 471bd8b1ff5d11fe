// SPDX-License-Identifier: Apache-2.0
#include "uavprop/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace uavprop {

namespace {

constexpr std::uint32_t kMaxLeafSize = 4;
constexpr int kBins = 16;

double surface_area(const Aabb& box)
{
    if (box.empty()) {
        return 0.0;
    }
    const Vec3 e = box.extent();
    return 2.0 * (e.x * e.y + e.y * e.z + e.z * e.x);
}

int bin_of(double value, double lo, double extent)
{
    const int b = static_cast<int>((value - lo) / extent * kBins);
    return std::clamp(b, 0, kBins - 1);
}

/// Moller-Trumbore on precomputed edges.
inline bool ray_triangle(const Vec3& v0, const Vec3& e1, const Vec3& e2, const Vec3& origin,
                         const Vec3& dir, double& t, double& u, double& v)
{
    const Vec3 pvec = cross(dir, e2);
    const double det = dot(e1, pvec);
    const double scale = norm_squared(e1) + norm_squared(e2);
    if (std::fabs(det) <= 1e-14 * scale) {
        return false;
    }
    const double inv = 1.0 / det;
    const Vec3 tvec = origin - v0;
    u = dot(tvec, pvec) * inv;
    if (u < 0.0 || u > 1.0) {
        return false;
    }
    const Vec3 qvec = cross(tvec, e1);
    v = dot(dir, qvec) * inv;
    if (v < 0.0 || u + v > 1.0) {
        return false;
    }
    t = dot(e2, qvec) * inv;
    return true;
}

inline bool ray_box(const Aabb& box, const Vec3& origin, const Vec3& inv_dir, double t_max, double& t_near)
{
    double t0 = 0.0;
    double t1 = t_max;
    for (int axis = 0; axis < 3; ++axis) {
        const double o = origin[axis];
        const double inv = inv_dir[axis];
        const double lo = box.min[axis];
        const double hi = box.max[axis];
        if (std::isinf(inv)) {
            if (o < lo || o > hi) {
                return false;
            }
            continue;
        }
        double ta = (lo - o) * inv;
        double tb = (hi - o) * inv;
        if (ta > tb) {
            std::swap(ta, tb);
        }
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) {
            return false;
        }
    }
    t_near = t0;
    return true;
}

} // namespace

std::optional<Hit> intersect_triangle(const Face& face, const Vec3& origin, const Vec3& dir)
{
    const Vec3& v0 = face.vertices[0];
    double t = 0.0;
    double u = 0.0;
    double v = 0.0;
    if (!ray_triangle(v0, face.vertices[1] - v0, face.vertices[2] - v0, origin, dir, t, u, v)) {
        return std::nullopt;
    }
    return Hit{t, origin + dir * t, face.face_id, u, v};
}

Bvh::Bvh(const Scene& scene)
{
    const auto faces = scene.faces();
    if (faces.empty()) {
        return;
    }
    const std::size_t n = faces.size();
    std::vector<Vec3> centroids(n);
    std::vector<Aabb> boxes(n);
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        centroids[i] = faces[i].centroid();
        for (const auto& v : faces[i].vertices) {
            boxes[i].extend(v);
        }
    }
    nodes_.reserve(2 * n);
    build(0, static_cast<std::uint32_t>(n), centroids, boxes);

    triangles_.reserve(n);
    for (int id : order_) {
        const Face& f = faces[static_cast<std::size_t>(id)];
        triangles_.push_back({f.vertices[0], f.vertices[1] - f.vertices[0], f.vertices[2] - f.vertices[0], id});
    }
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids,
                         const std::vector<Aabb>& boxes)
{
    const auto node_index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb box;
    Aabb centroid_box;
    for (std::uint32_t i = begin; i < end; ++i) {
        box.extend(boxes[static_cast<std::size_t>(order_[i])]);
        centroid_box.extend(centroids[static_cast<std::size_t>(order_[i])]);
    }
    nodes_[node_index].box = box;

    const Vec3 extent = centroid_box.extent();
    int axis = 0;
    if (extent.y > extent.x) {
        axis = 1;
    }
    if (extent.z > extent[axis]) {
        axis = 2;
    }
    const std::uint32_t count = end - begin;
    if (count <= kMaxLeafSize || extent[axis] <= 0.0) {
        nodes_[node_index].first = begin;
        nodes_[node_index].count = count;
        return node_index;
    }

    // Binned surface-area heuristic; falls back to a median split when every
    // centroid lands on one side. Ties are ordered by face id.
    std::uint32_t mid = begin;
    double best_cost = std::numeric_limits<double>::infinity();
    int best_axis = axis;
    int best_split = -1;
    for (int a = 0; a < 3; ++a) {
        if (extent[a] <= 0.0) {
            continue;
        }
        std::array<Aabb, kBins> bin_box;
        std::array<std::uint32_t, kBins> bin_count{};
        for (std::uint32_t i = begin; i < end; ++i) {
            const auto id = static_cast<std::size_t>(order_[i]);
            const int b = bin_of(centroids[id][a], centroid_box.min[a], extent[a]);
            bin_box[static_cast<std::size_t>(b)].extend(boxes[id]);
            ++bin_count[static_cast<std::size_t>(b)];
        }
        std::array<double, kBins> right_cost{};
        Aabb acc;
        std::uint32_t n_right = 0;
        for (int b = kBins - 1; b > 0; --b) {
            acc.extend(bin_box[static_cast<std::size_t>(b)]);
            n_right += bin_count[static_cast<std::size_t>(b)];
            right_cost[static_cast<std::size_t>(b)] = surface_area(acc) * n_right;
        }
        acc = Aabb{};
        std::uint32_t n_left = 0;
        for (int b = 0; b < kBins - 1; ++b) {
            acc.extend(bin_box[static_cast<std::size_t>(b)]);
            n_left += bin_count[static_cast<std::size_t>(b)];
            const double cost = surface_area(acc) * n_left + right_cost[static_cast<std::size_t>(b + 1)];
            if (n_left > 0 && n_left < count && cost < best_cost) {
                best_cost = cost;
                best_axis = a;
                best_split = b;
            }
        }
    }
    if (best_split >= 0) {
        const auto split_it = std::stable_partition(order_.begin() + begin, order_.begin() + end, [&](int id) {
            const auto i = static_cast<std::size_t>(id);
            return bin_of(centroids[i][best_axis], centroid_box.min[best_axis], extent[best_axis]) <= best_split;
        });
        mid = static_cast<std::uint32_t>(split_it - order_.begin());
    }
    if (mid == begin || mid == end) {
        mid = begin + count / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](int a, int b) {
                             const double ca = centroids[static_cast<std::size_t>(a)][axis];
                             const double cb = centroids[static_cast<std::size_t>(b)][axis];
                             return ca < cb || (ca == cb && a < b);
                         });
    }
    const std::uint32_t left = build(begin, mid, centroids, boxes);
    const std::uint32_t right = build(mid, end, centroids, boxes);
    nodes_[node_index].first = left;
    nodes_[node_index].second = right;
    nodes_[node_index].count = 0;
    return node_index;
}

template <typename Visitor>
void Bvh::traverse(const Vec3& origin, const Vec3& dir, double& t_max, Visitor&& visit) const
{
    if (nodes_.empty()) {
        return;
    }
    const Vec3 inv_dir{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    std::uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        double t_near = 0.0;
        if (!ray_box(node.box, origin, inv_dir, t_max, t_near)) {
            continue;
        }
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                if (visit(triangles_[i])) {
                    return;
                }
            }
            continue;
        }
        // Visit the nearer child first.
        double tl = 0.0;
        double tr = 0.0;
        const bool hit_l = ray_box(nodes_[node.first].box, origin, inv_dir, t_max, tl);
        const bool hit_r = ray_box(nodes_[node.second].box, origin, inv_dir, t_max, tr);
        if (hit_l && hit_r) {
            if (tl <= tr) {
                stack[top++] = node.second;
                stack[top++] = node.first;
            } else {
                stack[top++] = node.first;
                stack[top++] = node.second;
            }
        } else if (hit_l) {
            stack[top++] = node.first;
        } else if (hit_r) {
            stack[top++] = node.second;
        }
    }
}

std::optional<Hit> Bvh::intersect(const Vec3& origin, const Vec3& dir, double t_max, FaceRange skip) const
{
    std::optional<Hit> best;
    double limit = t_max;
    traverse(origin, dir, limit, [&](const Triangle& tri) {
        if (skip.contains(tri.face_id)) {
            return false;
        }
        double t = 0.0;
        double u = 0.0;
        double v = 0.0;
        if (!ray_triangle(tri.v0, tri.e1, tri.e2, origin, dir, t, u, v)) {
            return false;
        }
        if (t <= kRayEpsilon || t > limit) {
            return false;
        }
        if (!best || t < best->t || (t == best->t && tri.face_id < best->face_id)) {
            best = Hit{t, origin + dir * t, tri.face_id, u, v};
            limit = t;
        }
        return false;
    });
    return best;
}

bool Bvh::occluded(const Vec3& a, const Vec3& b, FaceRange skip) const
{
    const Vec3 delta = b - a;
    const double length = norm(delta);
    if (length <= 2.0 * kRayEpsilon) {
        return false;
    }
    const Vec3 dir = delta / length;
    double limit = length - kRayEpsilon;
    bool blocked = false;
    traverse(a, dir, limit, [&](const Triangle& tri) {
        if (skip.contains(tri.face_id)) {
            return false;
        }
        double t = 0.0;
        double u = 0.0;
        double v = 0.0;
        if (ray_triangle(tri.v0, tri.e1, tri.e2, a, dir, t, u, v) && t > kRayEpsilon && t < limit) {
            blocked = true;
            return true;
        }
        return false;
    });
    return blocked;
}

std::vector<int> Bvh::faces_crossing(const Vec3& a, const Vec3& b, FaceRange skip) const
{
    std::vector<int> out;
    const Vec3 delta = b - a;
    const double length = norm(delta);
    if (length <= 2.0 * kRayEpsilon) {
        return out;
    }
    const Vec3 dir = delta / length;
    double limit = length - kRayEpsilon;
    traverse(a, dir, limit, [&](const Triangle& tri) {
        double t = 0.0;
        double u = 0.0;
        double v = 0.0;
        if (!skip.contains(tri.face_id) && ray_triangle(tri.v0, tri.e1, tri.e2, a, dir, t, u, v) &&
            t > kRayEpsilon && t < limit) {
            out.push_back(tri.face_id);
        }
        return false;
    });
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t Bvh::leaf_count() const
{
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.count > 0; }));
}

} // namespace uavprop
