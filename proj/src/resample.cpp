#include "stclust/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "stclust/error.hpp"

namespace stclust {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Interval {
    double lo;
    double hi;
};

double rect_area(GridMode mode, Interval lat, Interval lon) {
    if (lat.hi <= lat.lo || lon.hi <= lon.lo) return 0.0;
    if (mode == GridMode::planar) return (lat.hi - lat.lo) * (lon.hi - lon.lo);
    return (lon.hi - lon.lo) * kDegToRad * (std::sin(lat.hi * kDegToRad) - std::sin(lat.lo * kDegToRad));
}

Interval row_span(const GridGeometry& g, std::size_t r) {
    return {g.origin_lat + static_cast<double>(r) * g.cell_dlat, g.origin_lat + static_cast<double>(r + 1) * g.cell_dlat};
}

Interval col_span(const GridGeometry& g, std::size_t c) {
    return {g.origin_lon + static_cast<double>(c) * g.cell_dlon, g.origin_lon + static_cast<double>(c + 1) * g.cell_dlon};
}

/// Source index range [first, last] whose cells may overlap [lo, hi].
bool index_range(double origin, double step, std::size_t n, Interval span, std::size_t& first, std::size_t& last) {
    const double a = std::floor((span.lo - origin) / step);
    const double b = std::ceil((span.hi - origin) / step) - 1.0;
    if (b < 0.0 || a > static_cast<double>(n) - 1.0) return false;
    first = static_cast<std::size_t>(std::max(0.0, a));
    last = static_cast<std::size_t>(std::min(static_cast<double>(n) - 1.0, b));
    return first <= last;
}

}  // namespace

ResampleMethod parse_resample_method(std::string_view text) {
    if (text == "area_weighted") return ResampleMethod::area_weighted;
    if (text == "nearest") return ResampleMethod::nearest;
    throw ParameterError("unknown resampling method '" + std::string(text) + "'");
}

double cell_area_weight(const GridGeometry& geometry, CellIndex cell) {
    return rect_area(geometry.mode, row_span(geometry, cell.row), col_span(geometry, cell.col));
}

double area_weighted_mean(const ScalarField& field) {
    const auto& g = field.geometry();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t r = 0; r < g.nrows; ++r) {
        for (std::size_t c = 0; c < g.ncols; ++c) {
            if (!field.valid({r, c})) continue;
            const double w = cell_area_weight(g, {r, c});
            num += w * field.at({r, c});
            den += w;
        }
    }
    if (den <= 0.0) throw DomainError("field has no valid cells");
    return num / den;
}

ScalarField resample(const ScalarField& field, const GridGeometry& target, ResampleMethod method) {
    const auto& src = field.geometry();
    target.validate();
    if (src.mode != target.mode) throw ParameterError("source and target grids use different modes");
    const Interval src_lat{src.lat_min(), src.lat_max()};
    const Interval src_lon{src.lon_min(), src.lon_max()};
    const Interval tgt_lat{target.lat_min(), target.lat_max()};
    const Interval tgt_lon{target.lon_min(), target.lon_max()};
    if (rect_area(src.mode, {std::max(src_lat.lo, tgt_lat.lo), std::min(src_lat.hi, tgt_lat.hi)},
                  {std::max(src_lon.lo, tgt_lon.lo), std::min(src_lon.hi, tgt_lon.hi)}) <= 0.0)
        throw CoverageError("source and target grids do not overlap");

    std::vector<double> out(target.cell_count(), 0.0);
    std::vector<std::uint8_t> mask(target.cell_count(), 0);

    for (std::size_t r = 0; r < target.nrows; ++r) {
        const auto lat = row_span(target, r);
        std::size_t r0 = 0, r1 = 0;
        const bool rows_hit = index_range(src.origin_lat, src.cell_dlat, src.nrows, lat, r0, r1);
        for (std::size_t c = 0; c < target.ncols; ++c) {
            const auto lon = col_span(target, c);
            std::size_t c0 = 0, c1 = 0;
            if (!rows_hit || !index_range(src.origin_lon, src.cell_dlon, src.ncols, lon, c0, c1)) continue;

            const double target_area = rect_area(target.mode, lat, lon);
            double covered = 0.0;
            double weighted = 0.0;
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (auto sr = r0; sr <= r1; ++sr) {
                const auto slat = row_span(src, sr);
                const Interval olat{std::max(lat.lo, slat.lo), std::min(lat.hi, slat.hi)};
                for (auto sc = c0; sc <= c1; ++sc) {
                    if (!field.valid({sr, sc})) continue;
                    const auto slon = col_span(src, sc);
                    const double w = rect_area(src.mode, olat, {std::max(lon.lo, slon.lo), std::min(lon.hi, slon.hi)});
                    if (w <= 0.0) continue;
                    const double v = field.at({sr, sc});
                    covered += w;
                    weighted += w * v;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            if (covered < kMinResampleCoverage * target_area || covered <= 0.0) continue;

            const auto flat = target.index({r, c});
            if (method == ResampleMethod::area_weighted) {
                // A weighted mean lies within its inputs; the clamp removes rounding drift.
                out[flat] = std::clamp(weighted / covered, lo, hi);
                mask[flat] = 1;
            } else {
                const double y = target.center_lat(r);
                const double x = target.center_lon(c);
                const double fr = std::floor((y - src.origin_lat) / src.cell_dlat);
                const double fc = std::floor((x - src.origin_lon) / src.cell_dlon);
                if (fr < 0.0 || fc < 0.0 || fr >= static_cast<double>(src.nrows) || fc >= static_cast<double>(src.ncols))
                    continue;
                const CellIndex s{static_cast<std::size_t>(fr), static_cast<std::size_t>(fc)};
                if (!field.valid(s)) continue;
                out[flat] = field.at(s);
                mask[flat] = 1;
            }
        }
    }
    return ScalarField(target, std::move(out), std::move(mask), field.units());
}

}  // namespace stclust
