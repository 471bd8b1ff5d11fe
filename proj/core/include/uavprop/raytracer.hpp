// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "uavprop/bvh.hpp"
#include "uavprop/channel.hpp"
#include "uavprop/paths.hpp"
#include "uavprop/scene.hpp"
#include "uavprop/trace_config.hpp"

namespace uavprop {

/// Straight building edge usable for knife-edge diffraction: a mesh boundary
/// edge or a crease between non-coplanar faces, vertical or horizontal, not on the ground.
struct DiffractionEdge {
    int edge_id = 0;
    Vec3 a;
    Vec3 b;
    int object_id = 0;
};

/// Scattering patch on one face; the center stands for the whole patch.
struct ScatterTile {
    int face_id = 0;
    Vec3 center;
    double area = 0.0;
};

/// Node of the hierarchy over tile centers used to bound diffuse contributions.
struct TileNode {
    Aabb box;                 // bounds of the tile centers below
    double max_weight = 0.0;  // max of area * max_scatter_factor over the tiles below
    int first = 0;            // left child (inner) or first tile (leaf)
    int second = 0;           // right child (inner)
    int count = 0;            // tile count for leaves, 0 for inner nodes
};

/// Per-face plane and barycentric data used by the exact path solvers.
struct FaceGeometry {
    Vec3 v0;
    Vec3 e1;
    Vec3 e2;
    Vec3 normal;
    double d00 = 0.0;
    double d01 = 0.0;
    double d11 = 0.0;
    double inv_denom = 0.0;

    explicit FaceGeometry(const Face& face);
    double signed_distance(const Vec3& p) const { return dot(p - v0, normal); }
    Vec3 mirror(const Vec3& p) const { return p - normal * (2.0 * signed_distance(p)); }
    /// Point assumed on the plane; barycentric test with tolerance `tol`.
    bool contains(const Vec3& p, double tol = 1e-10) const;
};

/// Scene plus the derived structures every trace needs. Immutable once built.
class SceneIndex {
public:
    /// Tiles are built when tile_area > 0; their scattering bounds use `frequency_hz`.
    explicit SceneIndex(Scene scene, double tile_area = 1.0, double frequency_hz = 60e9);

    const Scene& scene() const { return scene_; }
    const Bvh& bvh() const { return bvh_; }
    const std::vector<DiffractionEdge>& edges() const { return edges_; }
    /// Tiles in hierarchy order; see tile_nodes().
    const std::vector<ScatterTile>& tiles() const { return tiles_; }
    /// Root at index 0 when there are tiles.
    const std::vector<TileNode>& tile_nodes() const { return tile_nodes_; }
    double tile_area() const { return tile_area_; }
    double frequency_hz() const { return frequency_hz_; }
    /// max_scatter_factor of the face's material.
    double scatter_factor(int face_id) const { return scatter_factor_[static_cast<std::size_t>(face_id)]; }
    const FaceGeometry& geometry(int face_id) const { return geometry_[static_cast<std::size_t>(face_id)]; }
    const std::vector<FaceGeometry>& geometry() const { return geometry_; }

private:
    static constexpr int kTileLeafSize = 8;

    void build_tile_tree();
    int build_tile_node(int begin, int end);

    Scene scene_;
    Bvh bvh_;
    std::vector<FaceGeometry> geometry_;
    std::vector<DiffractionEdge> edges_;
    std::vector<ScatterTile> tiles_;
    std::vector<TileNode> tile_nodes_;
    std::vector<double> scatter_factor_;
    double tile_area_ = 0.0;
    double frequency_hz_ = 0.0;
};

std::vector<DiffractionEdge> extract_diffraction_edges(const Scene& scene);

/// Splits each triangle into n^2 congruent sub-triangles, n = ceil(sqrt(area / tile_area)).
/// A face smaller than tile_area / 4 becomes a single tile.
std::vector<ScatterTile> tessellate_tiles(const Scene& scene, double tile_area);

/// Elevation rings from -90 to +90 deg in `spacing_deg` steps, azimuth 0..360 per ring,
/// poles once. Throws ConfigError unless spacing divides 90.
std::vector<Vec3> launch_directions(double spacing_deg);

using FaceSequence = std::vector<int>;

/// Face sequences of length exhaustive_reflections+1 .. max_reflections hit by
/// shooting-and-bouncing rays from `source` over the launch grid. Sorted, unique.
std::vector<FaceSequence> discover_sequences(const SceneIndex& index, const Vec3& source,
                                             const TraceConfig& cfg);

struct TraceOptions {
    FaceRange rx_body;  // ignored when occlusion-testing the last segment into rx
    const std::vector<FaceSequence>* tx_sequences = nullptr;  // precomputed discover_sequences(tx)
    const std::vector<FaceSequence>* rx_sequences = nullptr;  // precomputed discover_sequences(rx)
    std::size_t diffuse_limit = 0;  // keep only the strongest N diffuse paths (0 = all)
};

/// Exact specular path through `faces` by the image method, or nothing when a
/// reflection point falls off its face or a segment is blocked.
std::optional<RayPath> image_path(const SceneIndex& index, const Vec3& tx, const Vec3& rx,
                                  const FaceSequence& faces, FaceRange rx_body = {});

/// LOS plus specular paths up to max_reflections, canonically ordered.
std::vector<RayPath> trace_specular(const SceneIndex& index, const Vec3& tx, const Vec3& rx,
                                    const TraceConfig& cfg, const TraceOptions& opts = {});

/// Single knife-edge diffraction paths, only when LOS is blocked.
std::vector<RayPath> trace_diffraction(const SceneIndex& index, const Vec3& tx, const Vec3& rx,
                                       const TraceConfig& cfg, const TraceOptions& opts = {});

/// Paths with exactly one Lambertian scattering interaction at a tile center and
/// at most ds_max_interactions surface interactions in total.
std::vector<RayPath> trace_diffuse(const SceneIndex& index, const Vec3& tx, const Vec3& rx,
                                   const TraceConfig& cfg, const TraceOptions& opts = {});

std::vector<RayPath> trace_all(const SceneIndex& index, const Vec3& tx, const Vec3& rx,
                               const TraceConfig& cfg, const TraceOptions& opts = {});

struct ScoredPath {
    RayPath path;
    PathMetrics metrics;
};

std::vector<ScoredPath> score_paths(std::vector<RayPath> paths, const Scene& scene,
                                    const TraceConfig& cfg);

/// Total order for ranking: power desc, delay asc, signature asc, then canonical geometry.
bool stronger(const ScoredPath& a, const ScoredPath& b);

/// Strongest l_max paths, sorted by `stronger`.
std::vector<ScoredPath> select_top_l(std::vector<ScoredPath> paths, int l_max);

} // namespace uavprop
