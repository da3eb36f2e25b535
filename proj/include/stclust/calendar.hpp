#pragma once

#include <cstdint>
#include <string_view>

namespace stclust {

enum class CalendarKind : std::uint8_t { gregorian, fixed360 };

struct CalendarSpec {
    CalendarKind kind = CalendarKind::gregorian;

    friend bool operator==(const CalendarSpec&, const CalendarSpec&) = default;
};

/// Manifest spelling: "gregorian" or "360_day".
std::string_view to_string(CalendarKind kind);
CalendarKind parse_calendar(std::string_view text);

bool is_leap_year(int year);
int days_in_year(CalendarSpec calendar, int year);

struct MonthDay {
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    friend bool operator==(const MonthDay&, const MonthDay&) = default;
};

/// Day ordinals are 0-based within the year.
MonthDay month_day(CalendarSpec calendar, int year, int ordinal);
int day_ordinal(CalendarSpec calendar, int year, MonthDay md);

}  // namespace stclust
