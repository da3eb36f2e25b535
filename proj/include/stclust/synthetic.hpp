#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "stclust/calendar.hpp"
#include "stclust/grid.hpp"
#include "stclust/series.hpp"
#include "stclust/zone_map.hpp"

namespace stclust::synthetic {

/// Generator for a planted two-core temperature dataset.
///
/// The yearly field is the maximum of two linear cones of height `amplitude`
/// peaking at `peak_a` and `peak_b`. Peak A sits on its cell every year. Peak B
/// sits on its cell in `b_exact_years` years spread evenly over the span and on
/// one of its 8 neighbors (cycling) in the others. Daily values add a zero-mean
/// seasonal cycle shared by every cell and independent Gaussian noise with
/// standard deviation noise_fraction * amplitude. `region_offset` raises the
/// cells nearer A (in that year) and lowers those nearer B in even year indices and the
/// reverse in odd ones, giving the two regions distinct temporal signatures.
struct PlantedOptions {
    std::size_t nrows = 31;
    std::size_t ncols = 31;
    int first_year = 1989;
    std::size_t years = 31;
    CalendarKind calendar = CalendarKind::fixed360;
    double base = 20.0;
    double amplitude = 10.0;
    double cone_radius = 32.0;  // cells; the cone reaches zero at this distance
    double noise_fraction = 0.1;
    double seasonal_amplitude = 6.0;
    double region_offset = 0.0;
    CellIndex peak_a{8, 8};
    CellIndex peak_b{22, 22};
    std::size_t b_exact_years = 15;
    std::uint64_t seed = 20230101;
};

struct PlantedDataset {
    DailySeriesGrid series;
    ScalarField elevation;
    ZoneMap truth;  // 0 = nearer to A (ties to A), 1 = nearer to B
    std::vector<int> b_exact;  // years in which B peaks on its own cell
};

/// Geometry used for planted data: geographic 1 degree cells anchored at 5N 65E.
GridGeometry planted_geometry(std::size_t nrows, std::size_t ncols);

PlantedDataset make_planted(const PlantedOptions& options);

/// Standard normal deviates by Box-Muller over mt19937_64; a given seed
/// always yields the same sequence.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed);
    double next();

private:
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
    double uniform();
};

}  // namespace stclust::synthetic
