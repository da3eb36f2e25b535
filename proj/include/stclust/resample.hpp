#pragma once

#include "stclust/grid.hpp"

namespace stclust {

enum class ResampleMethod : std::uint8_t { area_weighted, nearest };

ResampleMethod parse_resample_method(std::string_view text);

/// Target cells whose valid source coverage is below this fraction are masked.
inline constexpr double kMinResampleCoverage = 0.5;

/// Regrids `field` onto `target`.
///
/// area_weighted: each target cell is the area-weighted mean of the valid source
/// cells it overlaps. In geographic mode the area of a lat/lon rectangle is the
/// exact spherical-zone area dlon * (sin(lat1) - sin(lat0)), which is additive,
/// so area-weighted means are conserved on full coverage.
///
/// nearest: value of the source cell containing the target cell center.
///
/// Both methods mask target cells whose valid coverage is below
/// kMinResampleCoverage. Throws CoverageError if the grids do not overlap and
/// ParameterError if their modes differ.
ScalarField resample(const ScalarField& field, const GridGeometry& target, ResampleMethod method);

/// Weight of cell `cell` under the same area rule resample() uses.
double cell_area_weight(const GridGeometry& geometry, CellIndex cell);

/// Area-weighted mean over valid cells.
double area_weighted_mean(const ScalarField& field);

}  // namespace stclust
