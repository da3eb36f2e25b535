#include "stclust/calendar.hpp"

#include <array>
#include <string>

#include "stclust/error.hpp"

namespace stclust {

namespace {

constexpr std::array<int, 12> kGregorianMonthDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
constexpr int kFixedMonthDays = 30;

int month_length(CalendarSpec calendar, int year, int month) {
    if (calendar.kind == CalendarKind::fixed360) return kFixedMonthDays;
    if (month == 2 && is_leap_year(year)) return 29;
    return kGregorianMonthDays[static_cast<std::size_t>(month - 1)];
}

}  // namespace

std::string_view to_string(CalendarKind kind) {
    return kind == CalendarKind::fixed360 ? "360_day" : "gregorian";
}

CalendarKind parse_calendar(std::string_view text) {
    if (text == "gregorian") return CalendarKind::gregorian;
    if (text == "360_day") return CalendarKind::fixed360;
    throw ParameterError("unknown calendar '" + std::string(text) + "' (expected \"gregorian\" or \"360_day\")");
}

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_year(CalendarSpec calendar, int year) {
    if (calendar.kind == CalendarKind::fixed360) return 360;
    return is_leap_year(year) ? 366 : 365;
}

MonthDay month_day(CalendarSpec calendar, int year, int ordinal) {
    if (ordinal < 0 || ordinal >= days_in_year(calendar, year))
        throw BoundsError("day ordinal " + std::to_string(ordinal) + " is outside year " + std::to_string(year));
    if (calendar.kind == CalendarKind::fixed360) return {ordinal / kFixedMonthDays + 1, ordinal % kFixedMonthDays + 1};
    int month = 1;
    while (ordinal >= month_length(calendar, year, month)) {
        ordinal -= month_length(calendar, year, month);
        ++month;
    }
    return {month, ordinal + 1};
}

int day_ordinal(CalendarSpec calendar, int year, MonthDay md) {
    if (md.month < 1 || md.month > 12 || md.day < 1 || md.day > month_length(calendar, year, md.month))
        throw BoundsError("invalid date " + std::to_string(year) + "-" + std::to_string(md.month) + "-" +
                          std::to_string(md.day));
    int ordinal = md.day - 1;
    for (int m = 1; m < md.month; ++m) ordinal += month_length(calendar, year, m);
    return ordinal;
}

}  // namespace stclust
