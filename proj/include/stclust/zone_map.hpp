#pragma once

#include <cstdint>
#include <vector>

#include "stclust/grid.hpp"

namespace stclust {

/// Per-cell integer labels over a grid. Produced by watershed delineation,
/// K-means and the MiSTIC consensus step.
struct ZoneMap {
    static constexpr std::int32_t kUnlabeled = -1;

    GridGeometry geometry;
    std::vector<std::int32_t> labels;  // row-major, kUnlabeled where masked or unreached
    std::size_t zone_count = 0;
    /// Focus cell per label. Empty for labelings without seeds (K-means).
    std::vector<CellIndex> anchors;

    static ZoneMap unlabeled(const GridGeometry& geometry) {
        return {geometry, std::vector<std::int32_t>(geometry.cell_count(), kUnlabeled), 0, {}};
    }

    std::int32_t at(CellIndex c) const { return labels[geometry.index(c)]; }
    std::size_t labeled_count() const {
        std::size_t n = 0;
        for (auto l : labels) n += l != kUnlabeled ? 1 : 0;
        return n;
    }

    friend bool operator==(const ZoneMap&, const ZoneMap&) = default;
};

}  // namespace stclust
