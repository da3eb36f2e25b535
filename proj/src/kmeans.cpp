#include "stclust/kmeans.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "stclust/error.hpp"
#include "stclust/parallel.hpp"

namespace stclust {

namespace {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double sqdist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

using Centroids = std::vector<std::vector<double>>;

Centroids seed_plus_plus(const FeatureMatrix& f, std::size_t k, std::mt19937_64& rng) {
    const auto n = f.size();
    Centroids centers;
    centers.reserve(k);
    std::vector<std::uint8_t> chosen(n, 0);

    auto first = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    first = std::min(first, n - 1);
    chosen[first] = 1;
    centers.emplace_back(f.row(first).begin(), f.row(first).end());

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sqdist(f.row(i), centers.back());

    while (centers.size() < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double cum = 0.0;
            std::size_t last_positive = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (d2[i] <= 0.0) continue;
                last_positive = i;
                cum += d2[i];
                if (cum > target) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) pick = last_positive;
        } else {
            // Every point coincides with a center; take the first unused row.
            for (std::size_t i = 0; i < n && pick == n; ++i)
                if (!chosen[i]) pick = i;
            if (pick == n) pick = 0;
        }
        chosen[pick] = 1;
        centers.emplace_back(f.row(pick).begin(), f.row(pick).end());
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sqdist(f.row(i), centers.back()));
    }
    return centers;
}

void assign(const FeatureMatrix& f, const Centroids& centers, std::vector<std::int32_t>& labels,
            std::vector<double>& dist, unsigned threads) {
    parallel_for(f.size(), threads, [&](std::size_t i) {
        double best = std::numeric_limits<double>::infinity();
        std::int32_t arg = 0;
        for (std::size_t j = 0; j < centers.size(); ++j) {
            const double d = sqdist(f.row(i), centers[j]);
            if (d < best) {
                best = d;
                arg = static_cast<std::int32_t>(j);
            }
        }
        labels[i] = arg;
        dist[i] = best;
    });
}

/// Means of each cluster in row order. Returns member counts.
std::vector<std::size_t> recompute_means(const FeatureMatrix& f, std::span<const std::int32_t> labels,
                                         Centroids& centers) {
    const auto k = centers.size();
    std::vector<std::size_t> counts(k, 0);
    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto j = static_cast<std::size_t>(labels[i]);
        ++counts[j];
        const auto x = f.row(i);
        for (std::size_t d = 0; d < f.dim; ++d) centers[j][d] += x[d];
    }
    for (std::size_t j = 0; j < k; ++j)
        if (counts[j] > 0)
            for (auto& v : centers[j]) v /= static_cast<double>(counts[j]);
    return counts;
}

/// Updates centroids to cluster means, reseeding each empty cluster with the
/// point farthest from its own centroid (drawn from clusters with >1 member).
void update_centroids(const FeatureMatrix& f, std::vector<std::int32_t>& labels, Centroids& centers) {
    auto counts = recompute_means(f, labels, centers);
    for (std::size_t j = 0; j < centers.size(); ++j) {
        if (counts[j] > 0) continue;
        std::size_t far = f.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto owner = static_cast<std::size_t>(labels[i]);
            if (counts[owner] < 2) continue;
            const double d = sqdist(f.row(i), centers[owner]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far == f.size()) break;  // unreachable while k <= n
        const auto owner = static_cast<std::size_t>(labels[far]);
        labels[far] = static_cast<std::int32_t>(j);
        --counts[owner];
        counts[j] = 1;
        counts = recompute_means(f, labels, centers);
    }
}

bool has_empty_cluster(std::span<const std::int32_t> labels, std::size_t k) {
    std::vector<std::uint8_t> seen(k, 0);
    for (auto l : labels) seen[static_cast<std::size_t>(l)] = 1;
    return std::find(seen.begin(), seen.end(), std::uint8_t{0}) != seen.end();
}

void check_k(const FeatureMatrix& f, std::size_t k) {
    if (k < 1) throw ParameterError("k must be at least 1");
    if (f.size() == 0) throw DomainError("no valid cells to cluster");
    if (k > f.size())
        throw ParameterError("k = " + std::to_string(k) + " exceeds the number of cells (" +
                             std::to_string(f.size()) + ")");
}

}  // namespace

FeatureMatrix build_features(const AnnualMeanStack& stack, bool standardize) {
    if (stack.fields.empty()) throw ParameterError("annual stack is empty");
    FeatureMatrix f;
    f.geometry = stack.geometry;
    f.dim = stack.fields.size();
    for (std::size_t i = 0; i < stack.combined_mask.size(); ++i)
        if (stack.combined_mask[i]) f.cells.push_back(stack.geometry.cell(i));
    if (f.cells.empty()) throw DomainError("no cell is valid in every year");

    const auto n = f.cells.size();
    f.data.resize(n * f.dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f.dim; ++j) f.data[i * f.dim + j] = stack.fields[j].at(f.cells[i]);

    f.offset.assign(f.dim, 0.0);
    f.scale.assign(f.dim, 1.0);
    if (!standardize) return f;

    for (std::size_t j = 0; j < f.dim; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = f.data[i * f.dim + j];
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo == hi) {
            f.offset[j] = lo;
        } else {
            const double mean = sum / static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = f.data[i * f.dim + j] - mean;
                ss += d * d;
            }
            f.offset[j] = mean;
            f.scale[j] = std::sqrt(ss / static_cast<double>(n));
        }
        for (std::size_t i = 0; i < n; ++i)
            f.data[i * f.dim + j] = (f.data[i * f.dim + j] - f.offset[j]) / f.scale[j];
    }
    return f;
}

FeatureMatrix features_from_points(const std::vector<std::vector<double>>& points) {
    if (points.empty()) throw DomainError("no points");
    FeatureMatrix f;
    f.dim = points.front().size();
    f.geometry = GridGeometry{GridMode::planar, 0.0, 0.0, 1.0, 1.0, 1, points.size()};
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != f.dim) throw ShapeError("points must share one dimension");
        f.cells.push_back({0, i});
        f.data.insert(f.data.end(), points[i].begin(), points[i].end());
    }
    f.offset.assign(f.dim, 0.0);
    f.scale.assign(f.dim, 1.0);
    return f;
}

double inertia_of(const FeatureMatrix& features, std::span<const std::int32_t> assignment,
                  const std::vector<std::vector<double>>& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i)
        total += sqdist(features.row(i), centroids[static_cast<std::size_t>(assignment[i])]);
    return total;
}

ClusterMap run_kmeans_once(const FeatureMatrix& features, std::size_t k, std::uint64_t seed, std::size_t max_iter,
                           double tol, unsigned threads) {
    check_k(features, k);
    if (max_iter < 1) throw ParameterError("max_iter must be at least 1");
    if (!(tol >= 0.0)) throw ParameterError("tol must be non-negative");

    std::mt19937_64 rng(seed);
    auto centers = seed_plus_plus(features, k, rng);

    const auto n = features.size();
    std::vector<std::int32_t> labels(n, 0);
    std::vector<std::int32_t> previous;
    std::vector<double> dist(n, 0.0);

    ClusterMap out;
    out.k = k;
    out.seed = seed;
    for (std::size_t iter = 1;; ++iter) {
        assign(features, centers, labels, dist, threads);
        double inertia = 0.0;
        for (double d : dist) inertia += d;
        assert(out.inertia_history.empty() || inertia <= out.inertia_history.back() * (1.0 + 1e-9) + 1e-300);
        out.inertia_history.push_back(inertia);
        out.iterations = iter;

        if (labels == previous) {
            out.stop = StopReason::assignment_stable;
            break;
        }
        const auto& h = out.inertia_history;
        if (tol > 0.0 && h.size() >= 2 && h[h.size() - 2] - inertia < tol) {
            out.stop = StopReason::tolerance;
            break;
        }
        if (iter >= max_iter) {
            out.stop = StopReason::max_iterations;
            break;
        }
        update_centroids(features, labels, centers);
        previous = labels;
    }

    if (has_empty_cluster(labels, k)) {
        update_centroids(features, labels, centers);
        out.inertia_history.push_back(inertia_of(features, labels, centers));
    }
    out.inertia = out.inertia_history.back();
    out.centroids = std::move(centers);
    out.assignment = labels;

    out.labels = ZoneMap::unlabeled(features.geometry);
    out.labels.zone_count = k;
    for (std::size_t i = 0; i < n; ++i) out.labels.labels[features.geometry.index(features.cells[i])] = labels[i];
    return out;
}

ClusterMap run_kmeans(const FeatureMatrix& features, const KMeansParams& params) {
    check_k(features, params.k);
    if (params.restarts < 1) throw ParameterError("restarts must be at least 1");

    ClusterMap best;
    bool have = false;
    for (std::size_t r = 0; r < params.restarts; ++r) {
        const std::uint64_t run_seed = splitmix64(params.seed + 0x632BE59BD9B4E019ULL * r);
        auto candidate = run_kmeans_once(features, params.k, run_seed, params.max_iter, params.tol, params.threads);
        if (!have || candidate.inertia < best.inertia) {
            best = std::move(candidate);
            have = true;
        }
    }
    best.seed = params.seed;

    // Renumber by first appearance in row-major cell order.
    std::vector<std::int32_t> remap(params.k, -1);
    std::int32_t next = 0;
    for (auto l : best.assignment) {
        auto& m = remap[static_cast<std::size_t>(l)];
        if (m < 0) m = next++;
    }
    Centroids centroids(params.k);
    for (std::size_t j = 0; j < params.k; ++j) centroids[static_cast<std::size_t>(remap[j])] = best.centroids[j];
    best.centroids = std::move(centroids);
    for (auto& l : best.assignment) l = remap[static_cast<std::size_t>(l)];
    for (auto& l : best.labels.labels)
        if (l != ZoneMap::kUnlabeled) l = remap[static_cast<std::size_t>(l)];
    return best;
}

}  // namespace stclust
