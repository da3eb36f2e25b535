#include "stclust/series.hpp"

#include <cmath>
#include <string>

#include "stclust/error.hpp"

namespace stclust {

DailySeriesGrid::DailySeriesGrid(GridGeometry geometry, CalendarSpec calendar, Units units, std::vector<Year> years)
    : geometry_(geometry), calendar_(calendar), units_(units), years_(std::move(years)) {
    geometry_.validate();
    if (units_ != Units::celsius && units_ != Units::kelvin)
        throw UnitError("daily series must be in celsius or kelvin");
    const auto cells = geometry_.cell_count();
    mask_.assign(cells, 0);
    for (std::size_t i = 0; i < years_.size(); ++i) {
        const auto& y = years_[i];
        if (i > 0 && y.year <= years_[i - 1].year)
            throw ValidationError("years must be strictly increasing (" + std::to_string(years_[i - 1].year) +
                                  " then " + std::to_string(y.year) + ")");
        const auto expected = static_cast<std::size_t>(days_in_year(calendar_, y.year));
        if (y.values.size() != expected * cells)
            throw ValidationError("year " + std::to_string(y.year) + " holds " +
                                  std::to_string(y.values.size() / cells) + " daily layers, expected " +
                                  std::to_string(expected));
        for (std::size_t k = 0; k < y.values.size(); ++k) {
            const double v = y.values[k];
            if (std::isnan(v)) continue;
            if (!std::isfinite(v))
                throw ValidationError("infinite value in year " + std::to_string(y.year));
            mask_[k % cells] = 1;
        }
    }
}

std::vector<int> DailySeriesGrid::years() const {
    std::vector<int> out;
    out.reserve(years_.size());
    for (const auto& y : years_) out.push_back(y.year);
    return out;
}

const DailySeriesGrid::Year& DailySeriesGrid::year(int year) const {
    for (const auto& y : years_)
        if (y.year == year) return y;
    throw LookupError("year " + std::to_string(year) + " is not in the series");
}

}  // namespace stclust
