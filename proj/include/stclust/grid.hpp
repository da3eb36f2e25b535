#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace stclust {

enum class GridMode : std::uint8_t { geographic, planar };

enum class Units : std::uint8_t { celsius, kelvin, meters, degrees_slope, dimensionless };

std::string_view to_string(GridMode mode);
std::string_view to_string(Units units);
GridMode parse_grid_mode(std::string_view text);
Units parse_units(std::string_view text);

struct CellIndex {
    std::size_t row = 0;
    std::size_t col = 0;

    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Chebyshev (king-move) distance between two cells.
std::size_t chebyshev(CellIndex a, CellIndex b);

/// Regular lattice. Cell (r, c) spans
/// [origin_lat + r*cell_dlat, origin_lat + (r+1)*cell_dlat] along the row axis and
/// [origin_lon + c*cell_dlon, origin_lon + (c+1)*cell_dlon] along the column axis,
/// so row 0 is the southern (lowest y) edge. Planar mode reads lat/lon as y/x meters.
struct GridGeometry {
    GridMode mode = GridMode::geographic;
    double origin_lat = 0.0;
    double origin_lon = 0.0;
    double cell_dlat = 1.0;
    double cell_dlon = 1.0;
    std::size_t nrows = 1;
    std::size_t ncols = 1;

    /// Throws ParameterError if any invariant is violated.
    void validate() const;

    std::size_t cell_count() const { return nrows * ncols; }
    bool contains(CellIndex c) const { return c.row < nrows && c.col < ncols; }
    std::size_t index(CellIndex c) const { return c.row * ncols + c.col; }
    CellIndex cell(std::size_t flat) const { return {flat / ncols, flat % ncols}; }

    double center_lat(std::size_t row) const { return origin_lat + (static_cast<double>(row) + 0.5) * cell_dlat; }
    double center_lon(std::size_t col) const { return origin_lon + (static_cast<double>(col) + 0.5) * cell_dlon; }
    double lat_min() const { return origin_lat; }
    double lat_max() const { return origin_lat + static_cast<double>(nrows) * cell_dlat; }
    double lon_min() const { return origin_lon; }
    double lon_max() const { return origin_lon + static_cast<double>(ncols) * cell_dlon; }

    friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// One 2-D layer of values. mask[i] != 0 marks a valid cell; invalid cells keep
/// whatever value they were given and are never read by numeric code.
class ScalarField {
public:
    ScalarField(GridGeometry geometry, std::vector<double> values, std::vector<std::uint8_t> mask, Units units);

    /// Fully valid field filled with `fill`.
    static ScalarField filled(const GridGeometry& geometry, double fill, Units units);

    const GridGeometry& geometry() const { return geometry_; }
    Units units() const { return units_; }
    std::span<const double> values() const { return values_; }
    std::span<const std::uint8_t> mask() const { return mask_; }

    double at(CellIndex c) const { return values_[geometry_.index(c)]; }
    bool valid(CellIndex c) const { return mask_[geometry_.index(c)] != 0; }
    bool valid(std::size_t flat) const { return mask_[flat] != 0; }
    std::size_t valid_count() const;

    /// Copy with additional cells invalidated wherever `keep` is zero.
    ScalarField restricted_to(std::span<const std::uint8_t> keep) const;

private:
    GridGeometry geometry_;
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
    Units units_;
};

/// Unmasked in-bounds 8-neighbors of `cell`, in row-major order
/// (NW, N, NE, W, E, SW, S, SE where "N" is row-1).
std::vector<CellIndex> neighbors8(const GridGeometry& geometry, std::span<const std::uint8_t> mask, CellIndex cell);

/// Same as neighbors8 but writes into a caller-owned buffer; returns the count.
std::size_t neighbors8_into(const GridGeometry& geometry, std::span<const std::uint8_t> mask, CellIndex cell,
                            CellIndex (&out)[8]);

inline constexpr double kKelvinOffset = 273.15;
inline constexpr double kMetersPerDegree = 111195.0;

ScalarField to_celsius(const ScalarField& field);

/// Horn 3x3 slope in degrees. Border cells and any cell whose stencil touches
/// a masked cell are masked in the result.
ScalarField slope_field(const ScalarField& elevation);

}  // namespace stclust
