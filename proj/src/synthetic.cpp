#include "stclust/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stclust/error.hpp"

namespace stclust::synthetic {

namespace {

constexpr int kNeighborOffsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};

double distance(double r0, double c0, double r1, double c1) { return std::hypot(r0 - r1, c0 - c1); }

}  // namespace

NormalSource::NormalSource(std::uint64_t seed) : rng_(seed) {}

double NormalSource::uniform() {
    // (0, 1], never zero so log() stays finite
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalSource::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(theta);
    has_spare_ = true;
    return radius * std::cos(theta);
}

GridGeometry planted_geometry(std::size_t nrows, std::size_t ncols) {
    return GridGeometry{GridMode::geographic, 5.0, 65.0, 1.0, 1.0, nrows, ncols};
}

PlantedDataset make_planted(const PlantedOptions& o) {
    const auto geometry = planted_geometry(o.nrows, o.ncols);
    geometry.validate();
    if (o.years == 0) throw ParameterError("planted dataset needs at least one year");
    if (o.b_exact_years > o.years) throw ParameterError("b_exact_years exceeds the number of years");
    if (!geometry.contains(o.peak_a) || !geometry.contains(o.peak_b) || o.peak_a == o.peak_b)
        throw ParameterError("planted peaks must be distinct cells inside the grid");
    if (o.peak_b.row == 0 || o.peak_b.col == 0 || o.peak_b.row + 1 >= o.nrows || o.peak_b.col + 1 >= o.ncols)
        throw ParameterError("peak B needs a full ring of neighbors");
    if (!(o.cone_radius > 0.0)) throw ParameterError("cone_radius must be positive");

    const auto cells = geometry.cell_count();
    const CalendarSpec calendar{o.calendar};
    NormalSource noise(o.seed);
    const double sigma = o.noise_fraction * o.amplitude;

    PlantedDataset out{DailySeriesGrid(geometry, calendar, Units::celsius, {}),
                       ScalarField::filled(geometry, 0.0, Units::meters), ZoneMap::unlabeled(geometry), {}};

    // Side of each cell relative to the two home peaks.
    std::vector<int> side(cells, 0);
    for (std::size_t i = 0; i < cells; ++i) {
        const auto c = geometry.cell(i);
        const double da = distance(double(c.row), double(c.col), double(o.peak_a.row), double(o.peak_a.col));
        const double db = distance(double(c.row), double(c.col), double(o.peak_b.row), double(o.peak_b.col));
        side[i] = db < da ? 1 : 0;
    }
    out.truth.labels.assign(side.begin(), side.end());
    out.truth.zone_count = 2;
    out.truth.anchors = {o.peak_a, o.peak_b};

    std::vector<DailySeriesGrid::Year> years;
    std::size_t displaced = 0;
    std::vector<double> annual(cells);
    for (std::size_t yi = 0; yi < o.years; ++yi) {
        const int year = o.first_year + static_cast<int>(yi);
        // Bresenham spread of the exact-B years over the span.
        const bool exact = (yi + 1) * o.b_exact_years / o.years > yi * o.b_exact_years / o.years;
        double br = static_cast<double>(o.peak_b.row);
        double bc = static_cast<double>(o.peak_b.col);
        if (exact) {
            out.b_exact.push_back(year);
        } else {
            br += kNeighborOffsets[displaced % 8][0];
            bc += kNeighborOffsets[displaced % 8][1];
            ++displaced;
        }
        const double shift = (yi % 2 == 0 ? 1.0 : -1.0) * o.region_offset;
        for (std::size_t i = 0; i < cells; ++i) {
            const auto c = geometry.cell(i);
            const double da = distance(double(c.row), double(c.col), double(o.peak_a.row), double(o.peak_a.col));
            const double db = distance(double(c.row), double(c.col), br, bc);
            const double cone = o.amplitude * std::max({0.0, 1.0 - da / o.cone_radius, 1.0 - db / o.cone_radius});
            annual[i] = o.base + cone + (db < da ? -shift : shift);
        }

        const auto days = static_cast<std::size_t>(days_in_year(calendar, year));
        DailySeriesGrid::Year y{year, std::vector<double>(days * cells)};
        for (std::size_t d = 0; d < days; ++d) {
            const double season =
                o.seasonal_amplitude * std::sin(2.0 * std::numbers::pi * (static_cast<double>(d) + 0.5) / double(days));
            for (std::size_t i = 0; i < cells; ++i) y.values[d * cells + i] = annual[i] + season + sigma * noise.next();
        }
        years.push_back(std::move(y));
    }
    out.series = DailySeriesGrid(geometry, calendar, Units::celsius, std::move(years));

    // Terrain: a high northern range plus a plateau around A.
    std::vector<double> elev(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const auto c = geometry.cell(i);
        const double north = std::max(0.0, (double(c.row) - 0.7 * double(o.nrows)) / (0.3 * double(o.nrows)));
        const double da = distance(double(c.row), double(c.col), double(o.peak_a.row), double(o.peak_a.col));
        elev[i] = 50.0 + 4800.0 * north * north + 700.0 * std::max(0.0, 1.0 - da / 10.0) + 3.0 * double(c.col);
    }
    out.elevation = ScalarField(geometry, std::move(elev), std::vector<std::uint8_t>(cells, 1), Units::meters);
    return out;
}

}  // namespace stclust::synthetic
