#include "stclust/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stclust/error.hpp"

namespace stclust {

std::string_view to_string(GridMode mode) {
    return mode == GridMode::geographic ? "geographic" : "planar";
}

std::string_view to_string(Units units) {
    switch (units) {
        case Units::celsius: return "celsius";
        case Units::kelvin: return "kelvin";
        case Units::meters: return "meters";
        case Units::degrees_slope: return "degrees_slope";
        case Units::dimensionless: return "dimensionless";
    }
    return "dimensionless";
}

GridMode parse_grid_mode(std::string_view text) {
    if (text == "geographic") return GridMode::geographic;
    if (text == "planar") return GridMode::planar;
    throw ParameterError("unknown grid mode '" + std::string(text) + "'");
}

Units parse_units(std::string_view text) {
    if (text == "celsius") return Units::celsius;
    if (text == "kelvin") return Units::kelvin;
    if (text == "meters") return Units::meters;
    if (text == "degrees_slope") return Units::degrees_slope;
    if (text == "dimensionless") return Units::dimensionless;
    throw UnitError("unknown units '" + std::string(text) + "'");
}

std::size_t chebyshev(CellIndex a, CellIndex b) {
    const auto dr = a.row > b.row ? a.row - b.row : b.row - a.row;
    const auto dc = a.col > b.col ? a.col - b.col : b.col - a.col;
    return std::max(dr, dc);
}

void GridGeometry::validate() const {
    if (!(cell_dlat > 0.0) || !std::isfinite(cell_dlat) || !(cell_dlon > 0.0) || !std::isfinite(cell_dlon))
        throw ParameterError("grid cell sizes must be positive and finite");
    if (nrows < 1 || ncols < 1) throw ParameterError("grid must have at least one row and one column");
    if (!std::isfinite(origin_lat) || !std::isfinite(origin_lon)) throw ParameterError("grid origin must be finite");
    if (mode == GridMode::geographic) {
        const double lo = center_lat(0);
        const double hi = center_lat(nrows - 1);
        if (lo < -90.0 || hi > 90.0)
            throw ParameterError("geographic grid has cell centers outside [-90, 90] latitude");
    }
}

ScalarField::ScalarField(GridGeometry geometry, std::vector<double> values, std::vector<std::uint8_t> mask,
                         Units units)
    : geometry_(geometry), values_(std::move(values)), mask_(std::move(mask)), units_(units) {
    geometry_.validate();
    const auto n = geometry_.cell_count();
    if (values_.size() != n || mask_.size() != n)
        throw ShapeError("field has " + std::to_string(values_.size()) + " values and " +
                         std::to_string(mask_.size()) + " mask entries, expected " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (mask_[i] != 0 && !std::isfinite(values_[i])) {
            const auto c = geometry_.cell(i);
            throw ValidationError("non-finite valid value at cell (" + std::to_string(c.row) + "," +
                                  std::to_string(c.col) + ")");
        }
        mask_[i] = mask_[i] != 0 ? 1 : 0;
    }
}

ScalarField ScalarField::filled(const GridGeometry& geometry, double fill, Units units) {
    return ScalarField(geometry, std::vector<double>(geometry.cell_count(), fill),
                       std::vector<std::uint8_t>(geometry.cell_count(), 1), units);
}

std::size_t ScalarField::valid_count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

ScalarField ScalarField::restricted_to(std::span<const std::uint8_t> keep) const {
    if (keep.size() != mask_.size()) throw ShapeError("restriction mask has the wrong size");
    auto mask = mask_;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (keep[i] == 0) mask[i] = 0;
    return ScalarField(geometry_, values_, std::move(mask), units_);
}

std::size_t neighbors8_into(const GridGeometry& geometry, std::span<const std::uint8_t> mask, CellIndex cell,
                            CellIndex (&out)[8]) {
    if (!geometry.contains(cell))
        throw BoundsError("cell (" + std::to_string(cell.row) + "," + std::to_string(cell.col) +
                          ") is outside a " + std::to_string(geometry.nrows) + "x" +
                          std::to_string(geometry.ncols) + " grid");
    std::size_t n = 0;
    const auto r0 = cell.row == 0 ? 0 : cell.row - 1;
    const auto c0 = cell.col == 0 ? 0 : cell.col - 1;
    const auto r1 = std::min(cell.row + 1, geometry.nrows - 1);
    const auto c1 = std::min(cell.col + 1, geometry.ncols - 1);
    for (auto r = r0; r <= r1; ++r) {
        for (auto c = c0; c <= c1; ++c) {
            if (r == cell.row && c == cell.col) continue;
            if (mask[r * geometry.ncols + c] == 0) continue;
            out[n++] = {r, c};
        }
    }
    return n;
}

std::vector<CellIndex> neighbors8(const GridGeometry& geometry, std::span<const std::uint8_t> mask, CellIndex cell) {
    if (mask.size() != geometry.cell_count()) throw ShapeError("mask size does not match geometry");
    CellIndex buf[8];
    const auto n = neighbors8_into(geometry, mask, cell, buf);
    return {buf, buf + n};
}

ScalarField to_celsius(const ScalarField& field) {
    if (field.units() == Units::celsius) return field;
    if (field.units() != Units::kelvin)
        throw UnitError("cannot convert " + std::string(to_string(field.units())) + " to celsius");
    std::vector<double> values(field.values().begin(), field.values().end());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (field.valid(i)) values[i] -= kKelvinOffset;
    return ScalarField(field.geometry(), std::move(values),
                       std::vector<std::uint8_t>(field.mask().begin(), field.mask().end()), Units::celsius);
}

ScalarField slope_field(const ScalarField& elevation) {
    const auto& g = elevation.geometry();
    if (elevation.units() != Units::meters) throw UnitError("slope requires elevation in meters");
    if (g.nrows < 3 || g.ncols < 3) throw SizeError("slope requires a grid of at least 3x3 cells");

    const auto& z = elevation.values();
    std::vector<double> out(g.cell_count(), 0.0);
    std::vector<std::uint8_t> mask(g.cell_count(), 0);
    const double dy = g.mode == GridMode::geographic ? g.cell_dlat * kMetersPerDegree : g.cell_dlat;

    for (std::size_t r = 1; r + 1 < g.nrows; ++r) {
        double dx = g.cell_dlon;
        if (g.mode == GridMode::geographic)
            dx = g.cell_dlon * kMetersPerDegree * std::cos(g.center_lat(r) * std::numbers::pi / 180.0);
        for (std::size_t c = 1; c + 1 < g.ncols; ++c) {
            bool complete = true;
            for (std::size_t rr = r - 1; rr <= r + 1 && complete; ++rr)
                for (std::size_t cc = c - 1; cc <= c + 1; ++cc)
                    if (!elevation.valid(rr * g.ncols + cc)) { complete = false; break; }
            if (!complete || !(dx > 0.0)) continue;

            // a b c / d e f / g h i with rows increasing downward in index space.
            const auto at = [&](std::size_t rr, std::size_t cc) { return z[rr * g.ncols + cc]; };
            const double a = at(r - 1, c - 1), b = at(r - 1, c), cc3 = at(r - 1, c + 1);
            const double d = at(r, c - 1), f = at(r, c + 1);
            const double gg = at(r + 1, c - 1), h = at(r + 1, c), i = at(r + 1, c + 1);
            const double dzdx = ((cc3 + 2.0 * f + i) - (a + 2.0 * d + gg)) / (8.0 * dx);
            const double dzdy = ((gg + 2.0 * h + i) - (a + 2.0 * b + cc3)) / (8.0 * dy);
            out[r * g.ncols + c] = std::atan(std::hypot(dzdx, dzdy)) * 180.0 / std::numbers::pi;
            mask[r * g.ncols + c] = 1;
        }
    }
    return ScalarField(g, std::move(out), std::move(mask), Units::degrees_slope);
}

}  // namespace stclust
