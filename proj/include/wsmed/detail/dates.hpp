#ifndef WSMED_DETAIL_DATES_HPP
#define WSMED_DETAIL_DATES_HPP

#include <chrono>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "wsmed/errors.hpp"

namespace wsmed::detail {

// calendar date plus the three supported rendering patterns
struct CalendarDate {
    int day = 0;
    int month = 0;
    int year = 0;
};

enum class DateField { Day, Month, Year };

struct DateLayout {
    DateField fields[3];
};

inline DateLayout date_layout(std::string_view pattern) {
    if (pattern == "DD/MM/YYYY") return {{DateField::Day, DateField::Month, DateField::Year}};
    if (pattern == "MM/DD/YYYY") return {{DateField::Month, DateField::Day, DateField::Year}};
    if (pattern == "YYYY/MM/DD") return {{DateField::Year, DateField::Month, DateField::Day}};
    throw ValueError(fmt::format("unsupported date format '{}'", pattern));
}

inline bool known_date_pattern(std::string_view pattern) {
    return pattern == "DD/MM/YYYY" || pattern == "MM/DD/YYYY" || pattern == "YYYY/MM/DD";
}

inline CalendarDate parse_date(std::string_view value, std::string_view pattern) {
    DateLayout layout = date_layout(pattern);
    CalendarDate date;
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        std::size_t sep = value.find('/', pos);
        std::string_view comp =
            value.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos);
        if (i < 2) {
            if (sep == std::string_view::npos)
                throw ValueError(fmt::format("date '{}' does not match format {}", value, pattern));
            pos = sep + 1;
        } else if (sep != std::string_view::npos) {
            throw ValueError(fmt::format("date '{}' does not match format {}", value, pattern));
        }
        std::size_t want = layout.fields[i] == DateField::Year ? 4 : 2;
        if (comp.size() != want)
            throw ValueError(fmt::format("date '{}' does not match format {}", value, pattern));
        int n = 0;
        for (char c : comp) {
            if (c < '0' || c > '9')
                throw ValueError(fmt::format("date '{}' does not match format {}", value, pattern));
            n = n * 10 + (c - '0');
        }
        switch (layout.fields[i]) {
            case DateField::Day: date.day = n; break;
            case DateField::Month: date.month = n; break;
            case DateField::Year: date.year = n; break;
        }
    }
    std::chrono::year_month_day ymd{std::chrono::year{date.year}, std::chrono::month{unsigned(date.month)},
                                    std::chrono::day{unsigned(date.day)}};
    if (!ymd.ok()) throw ValueError(fmt::format("'{}' is not a valid calendar date", value));
    return date;
}

inline std::string format_date(const CalendarDate& date, std::string_view pattern) {
    DateLayout layout = date_layout(pattern);
    std::string out;
    for (int i = 0; i < 3; ++i) {
        if (i) out.push_back('/');
        switch (layout.fields[i]) {
            case DateField::Day: out += fmt::format("{:02}", date.day); break;
            case DateField::Month: out += fmt::format("{:02}", date.month); break;
            case DateField::Year: out += fmt::format("{:04}", date.year); break;
        }
    }
    return out;
}

} // namespace wsmed::detail

#endif
