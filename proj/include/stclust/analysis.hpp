#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stclust/grid.hpp"
#include "stclust/ingest.hpp"
#include "stclust/zone_map.hpp"

namespace stclust::analysis {

/// Cell counts per (label in A, label in B) over cells labeled in both maps.
struct ContingencyTable {
    std::vector<std::int32_t> labels_a;  // sorted
    std::vector<std::int32_t> labels_b;  // sorted
    std::vector<std::vector<std::uint64_t>> counts;  // [a][b]
    std::vector<std::uint64_t> row_totals;
    std::vector<std::uint64_t> col_totals;
    std::uint64_t total = 0;
    std::uint64_t only_a = 0;  // labeled in A only
    std::uint64_t only_b = 0;  // labeled in B only

    bool empty() const { return total == 0; }
};

/// Throws ShapeError if the geometries differ. Disjoint domains give an empty
/// table (total == 0) rather than an error.
ContingencyTable contingency(const ZoneMap& a, const ZoneMap& b);

/// Chance-corrected Rand index. 1 exactly for identical partitions (up to
/// relabeling), 0 when the maximum and expected index coincide otherwise.
/// Throws DomainError when fewer than two cells are shared.
double adjusted_rand(const ContingencyTable& table);

struct MatchedPair {
    std::optional<std::int32_t> label_a;
    std::optional<std::int32_t> label_b;
    double jaccard = 0.0;
};

/// One-to-one matching of A and B labels maximizing total Jaccard (Hungarian
/// method). Labels left without a partner, or paired with zero overlap, are
/// reported individually with score 0. Matched pairs come first, ordered by
/// label_a.
std::vector<MatchedPair> matched_jaccard(const ContingencyTable& table);

/// Minimum-cost perfect assignment on a rectangular cost matrix (rows <= cols
/// not required). Returns, per row, the assigned column or -1.
std::vector<std::int64_t> hungarian(const std::vector<std::vector<double>>& cost);

struct Stats {
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

struct ClusterSummary {
    std::int32_t label = 0;
    std::size_t cell_count = 0;
    std::optional<double> mean_elevation;
    std::optional<double> mean_slope;
    std::optional<Stats> values;  // over member cells and all years
};

inline constexpr double kLowElevationBand = 1500.0;
inline constexpr double kHighElevationBand = 2000.0;

struct SummaryReport {
    std::vector<ClusterSummary> clusters;
    std::size_t clusters_with_elevation = 0;
    /// Fractions over clusters with a defined mean elevation; absent when none has one.
    std::optional<double> fraction_below_low_band;
    std::optional<double> fraction_above_high_band;
    double low_band = kLowElevationBand;
    double high_band = kHighElevationBand;
};

/// Per-cluster size, terrain means and value statistics. Any of elevation,
/// slope or stack may be null; the corresponding fields are then absent.
SummaryReport cluster_summary(const ZoneMap& map, const ScalarField* elevation, const ScalarField* slope,
                              const AnnualMeanStack* stack);

}  // namespace stclust::analysis
