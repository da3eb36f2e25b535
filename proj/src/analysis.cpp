#include "stclust/analysis.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "stclust/error.hpp"

namespace stclust::analysis {

namespace {

using i128 = __int128;

i128 pairs(std::uint64_t n) { return static_cast<i128>(n) * (static_cast<i128>(n) - 1) / 2; }

void require_same_geometry(const GridGeometry& a, const GridGeometry& b, const char* what) {
    if (!(a == b)) throw ShapeError(std::string(what) + " geometry does not match the cluster map");
}

}  // namespace

ContingencyTable contingency(const ZoneMap& a, const ZoneMap& b) {
    if (!(a.geometry == b.geometry) || a.labels.size() != b.labels.size())
        throw ShapeError("label maps have different geometries");

    std::map<std::int32_t, std::size_t> ia, ib;
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        const bool la = a.labels[i] != ZoneMap::kUnlabeled;
        const bool lb = b.labels[i] != ZoneMap::kUnlabeled;
        if (la && lb) {
            ia.emplace(a.labels[i], 0);
            ib.emplace(b.labels[i], 0);
        }
    }
    ContingencyTable t;
    for (auto& [label, idx] : ia) {
        idx = t.labels_a.size();
        t.labels_a.push_back(label);
    }
    for (auto& [label, idx] : ib) {
        idx = t.labels_b.size();
        t.labels_b.push_back(label);
    }
    t.counts.assign(t.labels_a.size(), std::vector<std::uint64_t>(t.labels_b.size(), 0));
    t.row_totals.assign(t.labels_a.size(), 0);
    t.col_totals.assign(t.labels_b.size(), 0);
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        const bool la = a.labels[i] != ZoneMap::kUnlabeled;
        const bool lb = b.labels[i] != ZoneMap::kUnlabeled;
        if (la && lb) {
            const auto r = ia[a.labels[i]];
            const auto c = ib[b.labels[i]];
            ++t.counts[r][c];
            ++t.row_totals[r];
            ++t.col_totals[c];
            ++t.total;
        } else if (la) {
            ++t.only_a;
        } else if (lb) {
            ++t.only_b;
        }
    }
    return t;
}

double adjusted_rand(const ContingencyTable& table) {
    if (table.total < 2) throw DomainError("adjusted Rand index needs at least two shared cells");
    i128 index = 0;
    for (const auto& row : table.counts)
        for (auto n : row) index += pairs(n);
    i128 sum_a = 0, sum_b = 0;
    for (auto n : table.row_totals) sum_a += pairs(n);
    for (auto n : table.col_totals) sum_b += pairs(n);
    const i128 all = pairs(table.total);

    // (Index - Expected) / (Max - Expected) with Expected = A*B/all and
    // Max = (A+B)/2, scaled by 2*all to stay in integers.
    const i128 num = 2 * all * index - 2 * sum_a * sum_b;
    const i128 den = all * (sum_a + sum_b) - 2 * sum_a * sum_b;
    if (index == sum_a && index == sum_b) return 1.0;
    if (den == 0) return 0.0;
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

std::vector<std::int64_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t rows = cost.size();
    const std::size_t cols = rows == 0 ? 0 : cost.front().size();
    const std::size_t n = std::max(rows, cols);
    if (n == 0) return {};
    const auto at = [&](std::size_t i, std::size_t j) { return i < rows && j < cols ? cost[i][j] : 0.0; };

    // Potentials formulation, 1-based with a virtual column 0.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<std::uint8_t> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::int64_t> assignment(rows, -1);
    for (std::size_t j = 1; j <= n; ++j)
        if (p[j] >= 1 && p[j] <= rows && j <= cols) assignment[p[j] - 1] = static_cast<std::int64_t>(j - 1);
    return assignment;
}

std::vector<MatchedPair> matched_jaccard(const ContingencyTable& table) {
    const auto na = table.labels_a.size();
    const auto nb = table.labels_b.size();
    std::vector<std::vector<double>> jac(na, std::vector<double>(nb, 0.0));
    std::vector<std::vector<double>> cost(na, std::vector<double>(nb, 0.0));
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            const auto inter = table.counts[i][j];
            const auto uni = table.row_totals[i] + table.col_totals[j] - inter;
            jac[i][j] = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
            cost[i][j] = -jac[i][j];
        }

    const auto assignment = hungarian(cost);
    std::vector<MatchedPair> out;
    std::vector<std::uint8_t> used_b(nb, 0);
    std::vector<std::int32_t> lone_a;
    for (std::size_t i = 0; i < na; ++i) {
        const auto j = assignment.empty() ? -1 : assignment[i];
        if (j >= 0 && table.counts[i][static_cast<std::size_t>(j)] > 0) {
            used_b[static_cast<std::size_t>(j)] = 1;
            out.push_back({table.labels_a[i], table.labels_b[static_cast<std::size_t>(j)], jac[i][static_cast<std::size_t>(j)]});
        } else {
            lone_a.push_back(table.labels_a[i]);
        }
    }
    for (auto l : lone_a) out.push_back({l, std::nullopt, 0.0});
    for (std::size_t j = 0; j < nb; ++j)
        if (!used_b[j]) out.push_back({std::nullopt, table.labels_b[j], 0.0});
    return out;
}

SummaryReport cluster_summary(const ZoneMap& map, const ScalarField* elevation, const ScalarField* slope,
                              const AnnualMeanStack* stack) {
    const auto& g = map.geometry;
    if (elevation) require_same_geometry(elevation->geometry(), g, "elevation");
    if (slope) require_same_geometry(slope->geometry(), g, "slope");
    if (stack) require_same_geometry(stack->geometry, g, "dataset");

    struct Acc {
        std::size_t cells = 0;
        double elev_sum = 0.0;
        std::size_t elev_n = 0;
        double slope_sum = 0.0;
        std::size_t slope_n = 0;
        double v_sum = 0.0;
        std::size_t v_n = 0;
        double v_min = std::numeric_limits<double>::infinity();
        double v_max = -std::numeric_limits<double>::infinity();
    };
    std::map<std::int32_t, Acc> acc;
    for (std::size_t i = 0; i < map.labels.size(); ++i) {
        const auto label = map.labels[i];
        if (label == ZoneMap::kUnlabeled) continue;
        auto& a = acc[label];
        ++a.cells;
        if (elevation && elevation->valid(i)) {
            a.elev_sum += elevation->values()[i];
            ++a.elev_n;
        }
        if (slope && slope->valid(i)) {
            a.slope_sum += slope->values()[i];
            ++a.slope_n;
        }
        if (stack) {
            for (const auto& f : stack->fields) {
                if (!f.valid(i)) continue;
                const double v = f.values()[i];
                a.v_sum += v;
                ++a.v_n;
                a.v_min = std::min(a.v_min, v);
                a.v_max = std::max(a.v_max, v);
            }
        }
    }

    SummaryReport report;
    std::size_t below = 0, above = 0;
    for (const auto& [label, a] : acc) {
        ClusterSummary s;
        s.label = label;
        s.cell_count = a.cells;
        if (a.elev_n > 0) {
            s.mean_elevation = a.elev_sum / static_cast<double>(a.elev_n);
            ++report.clusters_with_elevation;
            if (*s.mean_elevation < report.low_band) ++below;
            if (*s.mean_elevation > report.high_band) ++above;
        }
        if (a.slope_n > 0) s.mean_slope = a.slope_sum / static_cast<double>(a.slope_n);
        if (a.v_n > 0) s.values = Stats{a.v_min, std::clamp(a.v_sum / static_cast<double>(a.v_n), a.v_min, a.v_max), a.v_max};
        report.clusters.push_back(s);
    }
    if (report.clusters_with_elevation > 0) {
        const auto n = static_cast<double>(report.clusters_with_elevation);
        report.fraction_below_low_band = static_cast<double>(below) / n;
        report.fraction_above_high_band = static_cast<double>(above) / n;
    }
    return report;
}

}  // namespace stclust::analysis
