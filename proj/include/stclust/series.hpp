#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stclust/calendar.hpp"
#include "stclust/grid.hpp"

namespace stclust {

/// Multi-year stack of daily layers under a declared calendar.
///
/// Each year is stored as one flat block of days_in_year x cell_count values,
/// day-major. Missing daily values are stored as NaN. The shared mask marks
/// cells that carry at least one valid value anywhere in the series.
class DailySeriesGrid {
public:
    struct Year {
        int year = 0;
        std::vector<double> values;  // [day * cell_count + cell]
    };

    DailySeriesGrid(GridGeometry geometry, CalendarSpec calendar, Units units, std::vector<Year> years);

    const GridGeometry& geometry() const { return geometry_; }
    CalendarSpec calendar() const { return calendar_; }
    Units units() const { return units_; }
    std::span<const std::uint8_t> mask() const { return mask_; }

    std::vector<int> years() const;
    std::size_t year_count() const { return years_.size(); }
    const Year& year_at(std::size_t i) const { return years_[i]; }
    /// Throws LookupError for a year not in the series.
    const Year& year(int year) const;

    std::size_t day_count(std::size_t year_index) const {
        return years_[year_index].values.size() / geometry_.cell_count();
    }
    /// NaN when the value is missing.
    double value(std::size_t year_index, std::size_t day, std::size_t cell) const {
        return years_[year_index].values[day * geometry_.cell_count() + cell];
    }

private:
    GridGeometry geometry_;
    CalendarSpec calendar_;
    Units units_;
    std::vector<Year> years_;
    std::vector<std::uint8_t> mask_;
};

}  // namespace stclust
