// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "uavprop/raytracer.hpp"

namespace uavprop {

std::vector<RayPath> trace_all(const SceneIndex& index, const Vec3& tx, const Vec3& rx, const TraceConfig& cfg,
                               const TraceOptions& opts)
{
    std::vector<RayPath> paths = trace_specular(index, tx, rx, cfg, opts);
    for (auto* more : {&trace_diffraction, &trace_diffuse}) {
        auto extra = more(index, tx, rx, cfg, opts);
        paths.insert(paths.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
    }
    std::sort(paths.begin(), paths.end(), canonical_less);
    return paths;
}

std::vector<ScoredPath> score_paths(std::vector<RayPath> paths, const Scene& scene, const TraceConfig& cfg)
{
    std::vector<ScoredPath> scored;
    scored.reserve(paths.size());
    for (auto& p : paths) {
        PathMetrics m = compute_metrics(p, scene, cfg);
        // Paths through an antenna null carry no power.
        if (std::isfinite(m.power_dbm)) {
            scored.push_back({std::move(p), m});
        }
    }
    return scored;
}

bool stronger(const ScoredPath& a, const ScoredPath& b)
{
    if (a.metrics.power_dbm != b.metrics.power_dbm) {
        return a.metrics.power_dbm > b.metrics.power_dbm;
    }
    if (a.metrics.delay_ns != b.metrics.delay_ns) {
        return a.metrics.delay_ns < b.metrics.delay_ns;
    }
    const std::string sa = a.path.signature();
    const std::string sb = b.path.signature();
    if (sa != sb) {
        return sa < sb;
    }
    return canonical_less(a.path, b.path);
}

std::vector<ScoredPath> select_top_l(std::vector<ScoredPath> paths, int l_max)
{
    const auto keep = static_cast<std::size_t>(std::max(0, l_max));
    if (paths.size() > keep) {
        std::partial_sort(paths.begin(), paths.begin() + static_cast<std::ptrdiff_t>(keep), paths.end(), stronger);
        paths.resize(keep);
    } else {
        std::sort(paths.begin(), paths.end(), stronger);
    }
    return paths;
}

} // namespace uavprop
