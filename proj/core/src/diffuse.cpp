// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "reflection_solver.hpp"
#include "uavprop/raytracer.hpp"

namespace uavprop {

namespace {

enum class Variant { Direct, ReflectFirst, ReflectAfter };

/// One way of reaching a tile: straight from tx, via a bounce on `face` before
/// the tile, or via a bounce on `face` between the tile and rx.
struct Route {
    Variant variant = Variant::Direct;
    int face = -1;
    Vec3 source;   // tx or its image
    Vec3 sink;     // rx or its image
    double scale = 1.0;  // upper bound of the bounce's power factor
    // Tiles reachable through the bounce face lie inside the pyramid spanned by
    // the image point and the face triangle: n . p >= offset for each side.
    std::array<Vec3, 3> side_normal{};
    std::array<double, 3> side_offset{};
};

struct Entry {
    double bound = 0.0;
    int route = 0;
    int node = 0;
    int tile = -1;
};

struct EntryOrder {
    bool operator()(const Entry& a, const Entry& b) const
    {
        if (a.bound != b.bound) {
            return a.bound < b.bound;
        }
        if (a.route != b.route) {
            return a.route > b.route;
        }
        if (a.node != b.node) {
            return a.node > b.node;
        }
        return a.tile > b.tile;
    }
};

double box_distance_squared(const Aabb& box, const Vec3& p)
{
    double d2 = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        const double v = p[axis];
        const double lo = box.min[axis];
        const double hi = box.max[axis];
        const double d = v < lo ? lo - v : (v > hi ? v - hi : 0.0);
        d2 += d * d;
    }
    return d2;
}

/// Signed-distance range of a box against a plane.
std::pair<double, double> box_plane_range(const Aabb& box, const FaceGeometry& g)
{
    const double center = g.signed_distance(box.center());
    const Vec3 half = box.extent() * 0.5;
    const double reach = std::fabs(g.normal.x) * half.x + std::fabs(g.normal.y) * half.y +
                         std::fabs(g.normal.z) * half.z;
    return {center - reach, center + reach};
}

class DiffuseSearch {
public:
    DiffuseSearch(const SceneIndex& index, const Vec3& tx, const Vec3& rx, const TraceConfig& cfg,
                  const TraceOptions& opts)
        : index_(index), tx_(tx), rx_(rx), cfg_(cfg), opts_(opts)
    {
        const double lambda = cfg.wavelength_m();
        gain_ = peak_gain(cfg.tx_antenna) * peak_gain(cfg.rx_antenna) * lambda * lambda /
                (16.0 * kPi * kPi * kPi);
        routes_.push_back({Variant::Direct, -1, tx, rx, 1.0, {}, {}});
        if (cfg.ds_max_interactions >= 2) {
            for (const auto& f : index.scene().faces()) {
                const FaceGeometry& g = index.geometry(f.face_id);
                const double s = index.scene().material_of(f).scattering_s;
                const double keep = 1.0 - s * s;
                if (g.signed_distance(tx) != 0.0) {
                    routes_.push_back(with_pyramid({Variant::ReflectFirst, f.face_id, g.mirror(tx), rx, keep, {}, {}}, f,
                                                   g.mirror(tx)));
                }
                if (g.signed_distance(rx) != 0.0) {
                    routes_.push_back(with_pyramid({Variant::ReflectAfter, f.face_id, tx, g.mirror(rx), keep, {}, {}}, f,
                                                   g.mirror(rx)));
                }
            }
        }
    }

    std::vector<RayPath> run()
    {
        const auto& nodes = index_.tile_nodes();
        if (nodes.empty()) {
            return {};
        }
        for (int r = 0; r < static_cast<int>(routes_.size()); ++r) {
            push_node(r, 0);
        }
        while (!queue_.empty()) {
            const Entry e = queue_.top();
            queue_.pop();
            if (full() && e.bound * (1.0 + 1e-9) < threshold()) {
                break;
            }
            if (e.tile >= 0) {
                evaluate(e.route, e.tile);
                continue;
            }
            const TileNode& node = nodes[static_cast<std::size_t>(e.node)];
            if (node.count > 0) {
                for (int t = node.first; t < node.first + node.count; ++t) {
                    push_tile(e.route, t);
                }
            } else {
                push_node(e.route, node.first);
                push_node(e.route, node.second);
            }
        }
        std::vector<RayPath> out;
        out.reserve(best_.size());
        for (auto& s : best_) {
            out.push_back(std::move(s.path));
        }
        std::sort(out.begin(), out.end(), canonical_less);
        return out;
    }

private:
    static Route with_pyramid(Route r, const Face& face, const Vec3& apex)
    {
        for (int i = 0; i < 3; ++i) {
            const Vec3& a = face.vertices[static_cast<std::size_t>(i)];
            const Vec3& b = face.vertices[static_cast<std::size_t>((i + 1) % 3)];
            const Vec3& c = face.vertices[static_cast<std::size_t>((i + 2) % 3)];
            Vec3 n = normalized(cross(a - apex, b - apex));
            if (dot(n, c - apex) < 0.0) {
                n = -n;
            }
            r.side_normal[static_cast<std::size_t>(i)] = n;
            r.side_offset[static_cast<std::size_t>(i)] = dot(n, apex);
        }
        return r;
    }

    /// False when the box lies entirely outside the route's pyramid (conservative).
    static bool box_in_pyramid(const Route& r, const Aabb& box)
    {
        const Vec3 center = box.center();
        const Vec3 half = box.extent() * 0.5;
        for (std::size_t i = 0; i < 3; ++i) {
            const Vec3& n = r.side_normal[i];
            const double reach = std::fabs(n.x) * half.x + std::fabs(n.y) * half.y + std::fabs(n.z) * half.z;
            if (dot(n, center) + reach < r.side_offset[i] - 1e-9) {
                return false;
            }
        }
        return true;
    }

    bool limited() const { return opts_.diffuse_limit > 0; }
    bool full() const { return limited() && best_.size() >= opts_.diffuse_limit; }

    /// Linear power ratio of the weakest kept path.
    double threshold() const
    {
        return std::pow(10.0, (best_.front().metrics.power_dbm - cfg_.tx_power_dbm) / 10.0);
    }

    double bound(const Route& r, double weight, double d_in2, double d_out2) const
    {
        if (d_in2 <= 0.0 || d_out2 <= 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        return gain_ * r.scale * weight / (d_in2 * d_out2);
    }

    void push_node(int route, int node_index)
    {
        const Route& r = routes_[static_cast<std::size_t>(route)];
        const TileNode& node = index_.tile_nodes()[static_cast<std::size_t>(node_index)];
        if (r.variant != Variant::Direct) {
            // Tiles must lie on the same side of the mirror as the real endpoint.
            const FaceGeometry& g = index_.geometry(r.face);
            const double side = g.signed_distance(r.variant == Variant::ReflectFirst ? tx_ : rx_);
            const auto [lo, hi] = box_plane_range(node.box, g);
            if ((side > 0.0 && hi <= 0.0) || (side < 0.0 && lo >= 0.0) || !box_in_pyramid(r, node.box)) {
                return;
            }
        }
        const double b = bound(r, node.max_weight, box_distance_squared(node.box, r.source),
                               box_distance_squared(node.box, r.sink));
        queue_.push({b, route, node_index, -1});
    }

    void push_tile(int route, int tile_index)
    {
        const Route& r = routes_[static_cast<std::size_t>(route)];
        const ScatterTile& tile = index_.tiles()[static_cast<std::size_t>(tile_index)];
        if (opts_.rx_body.contains(tile.face_id) || tile.face_id == r.face) {
            return;
        }
        if (r.variant != Variant::Direct && !box_in_pyramid(r, Aabb{tile.center, tile.center})) {
            return;
        }
        const double b = unfolded_power(r, tile) * (1.0 + 1e-6);
        if (b > 0.0 && !(full() && b * (1.0 + 1e-9) < threshold())) {
            queue_.push({b, route, 0, tile_index});
        }
    }

    /// Power ratio of the tile's path evaluated on the unfolded geometry. Equals
    /// diffuse_power_ratio of the solved path up to rounding; 0 when the tile
    /// scatters away from the side the wave arrives on.
    double unfolded_power(const Route& r, const ScatterTile& tile) const
    {
        const Scene& scene = index_.scene();
        const Vec3 n = index_.geometry(tile.face_id).normal;
        const Vec3 to_tile = tile.center - r.source;
        const Vec3 to_sink = r.sink - tile.center;
        const double r_in2 = norm_squared(to_tile);
        const double r_out2 = norm_squared(to_sink);
        if (r_in2 <= 0.0 || r_out2 <= 0.0) {
            return 0.0;
        }
        const Vec3 d_in = to_tile / std::sqrt(r_in2);
        const Vec3 d_out = to_sink / std::sqrt(r_out2);
        if (!(dot(d_in, n) * dot(d_out, n) < 0.0)) {
            return 0.0;
        }
        const double cos_i = std::min(1.0, std::fabs(dot(d_in, n)));
        const double cos_s = std::min(1.0, std::fabs(dot(d_out, n)));
        const Material& m = scene.material_of(scene.face(tile.face_id));
        const double f = cfg_.frequency_hz;
        double power = m.scattering_s * m.scattering_s * mean_power_reflectivity(fresnel(m, cos_i, f)) * cos_i * cos_s;
        Vec3 departure = d_in;
        Vec3 arrival = d_out;
        if (r.variant != Variant::Direct) {
            const Face& bounce = scene.face(r.face);
            const Vec3 nf = index_.geometry(r.face).normal;
            const Vec3& along = r.variant == Variant::ReflectFirst ? d_in : d_out;
            const Material& mf = scene.material_of(bounce);
            const double cos_f = std::min(1.0, std::fabs(dot(along, nf)));
            power *= mean_power_reflectivity(fresnel(mf, cos_f, f)) * (1.0 - mf.scattering_s * mf.scattering_s);
            if (r.variant == Variant::ReflectFirst) {
                departure = reflect(d_in, nf);
            } else {
                arrival = reflect(d_out, nf);
            }
        }
        const double lambda = cfg_.wavelength_m();
        return dipole_gain(cfg_.tx_antenna, departure) * dipole_gain(cfg_.rx_antenna, arrival) * lambda * lambda *
               power * tile.area / (16.0 * kPi * kPi * kPi * r_in2 * r_out2);
    }

    void evaluate(int route, int tile_index)
    {
        const Route& r = routes_[static_cast<std::size_t>(route)];
        const ScatterTile& tile = index_.tiles()[static_cast<std::size_t>(tile_index)];
        const FaceGeometry& g = index_.geometry(tile.face_id);
        const Vec3& t = tile.center;

        Interaction scatter;
        scatter.kind = InteractionKind::Scattering;
        scatter.point = t;
        scatter.face_id = tile.face_id;
        scatter.tile_area = tile.area;

        std::vector<Interaction> chain;
        Vec3 before = tx_;
        Vec3 after = rx_;
        if (r.variant == Variant::Direct) {
            chain = {scatter};
        } else {
            std::array<Vec3, kMaxReflectionDepth> points;
            const Vec3& a = r.variant == Variant::ReflectFirst ? tx_ : t;
            const Vec3& b = r.variant == Variant::ReflectFirst ? t : rx_;
            if (!solve_reflections(index_, a, b, &r.face, 1, points)) {
                return;
            }
            Interaction bounce;
            bounce.kind = InteractionKind::Reflection;
            bounce.point = points[0];
            bounce.face_id = r.face;
            if (r.variant == Variant::ReflectFirst) {
                before = points[0];
                chain = {bounce, scatter};
            } else {
                after = points[0];
                chain = {scatter, bounce};
            }
        }
        // Lambertian scattering only toward the side the wave came from.
        const double side_in = g.signed_distance(before);
        const double side_out = g.signed_distance(after);
        if (!(side_in * side_out > 0.0)) {
            return;
        }

        RayPath path = make_path(tx_, rx_, std::move(chain));
        ScoredPath scored{std::move(path), {}};
        scored.metrics = compute_metrics(scored.path, index_.scene(), cfg_);
        if (!std::isfinite(scored.metrics.power_dbm)) {
            return;
        }
        if (full() && !stronger(scored, best_.front())) {
            return;
        }
        if (!segments_clear(scored.path)) {
            return;
        }
        if (limited()) {
            best_.push_back(std::move(scored));
            std::push_heap(best_.begin(), best_.end(), stronger);
            if (best_.size() > opts_.diffuse_limit) {
                std::pop_heap(best_.begin(), best_.end(), stronger);
                best_.pop_back();
            }
        } else {
            best_.push_back(std::move(scored));
        }
    }

    bool segments_clear(const RayPath& path) const
    {
        const auto pts = path.points();
        const Bvh& bvh = index_.bvh();
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const bool last = i + 2 == pts.size();
            if (distance(pts[i], pts[i + 1]) <= 2.0 * kRayEpsilon ||
                bvh.occluded(pts[i], pts[i + 1], last ? opts_.rx_body : FaceRange{})) {
                return false;
            }
        }
        return true;
    }

    const SceneIndex& index_;
    Vec3 tx_;
    Vec3 rx_;
    const TraceConfig& cfg_;
    const TraceOptions& opts_;
    double gain_ = 0.0;
    std::vector<Route> routes_;
    std::priority_queue<Entry, std::vector<Entry>, EntryOrder> queue_;
    std::vector<ScoredPath> best_;  // heap with the weakest path in front when limited
};

} // namespace

std::vector<RayPath> trace_diffuse(const SceneIndex& index, const Vec3& tx, const Vec3& rx,
                                   const TraceConfig& cfg, const TraceOptions& opts)
{
    if (!cfg.enable_diffuse || index.tiles().empty()) {
        return {};
    }
    if (index.frequency_hz() != cfg.frequency_hz) {
        throw std::invalid_argument("scene index was built for a different carrier frequency");
    }
    return DiffuseSearch(index, tx, rx, cfg, opts).run();
}

} // namespace uavprop
