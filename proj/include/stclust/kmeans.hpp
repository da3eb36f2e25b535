#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stclust/grid.hpp"
#include "stclust/ingest.hpp"
#include "stclust/zone_map.hpp"

namespace stclust {

/// One feature vector per cell valid in the stack's combined mask. Component j
/// is the annual mean of year j, optionally z-scored across cells.
struct FeatureMatrix {
    GridGeometry geometry;
    std::vector<CellIndex> cells;
    std::size_t dim = 0;
    std::vector<double> data;  // cells.size() x dim, row-major
    std::vector<double> offset;
    std::vector<double> scale;  // strictly positive

    std::size_t size() const { return cells.size(); }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

FeatureMatrix build_features(const AnnualMeanStack& stack, bool standardize = true);

/// Builds a matrix from explicit vectors; cells are laid out row-major on a
/// 1 x n planar grid. Used for tests and ad-hoc data.
FeatureMatrix features_from_points(const std::vector<std::vector<double>>& points);

enum class StopReason : std::uint8_t { assignment_stable, tolerance, max_iterations };

struct KMeansParams {
    std::size_t k = 8;
    std::uint64_t seed = 0;
    std::size_t max_iter = 300;
    double tol = 0.0;
    std::size_t restarts = 10;
    unsigned threads = 1;
};

struct ClusterMap {
    ZoneMap labels;  // cluster id per cell, kUnlabeled where masked
    std::size_t k = 0;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    StopReason stop = StopReason::max_iterations;
    /// Inertia after each assignment step of the winning restart.
    std::vector<double> inertia_history;
    /// Cluster id per feature row, aligned with FeatureMatrix::cells.
    std::vector<std::int32_t> assignment;
};

/// One Lloyd run from k-means++ seeding driven by `seed`.
ClusterMap run_kmeans_once(const FeatureMatrix& features, std::size_t k, std::uint64_t seed, std::size_t max_iter,
                           double tol, unsigned threads = 1);

/// Best of `params.restarts` runs (lowest inertia, earliest restart on ties).
/// Restart i uses a seed derived deterministically from params.seed. Cluster ids
/// are renumbered by first appearance in row-major cell order.
ClusterMap run_kmeans(const FeatureMatrix& features, const KMeansParams& params);

/// Sum of squared distances from each row to its assigned centroid.
double inertia_of(const FeatureMatrix& features, std::span<const std::int32_t> assignment,
                  const std::vector<std::vector<double>>& centroids);

}  // namespace stclust
