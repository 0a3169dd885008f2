#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>

#include "emspec/errors.hpp"

namespace emspec {

// Calendar date, ISO-8601 YYYY-MM-DD. Trading calendars come from the data,
// so no weekend/holiday logic lives here; dates only need ordering, parsing
// and formatting.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    // Compact integer key, e.g. 2008-09-15 -> 20080915. Used for RNG
    // sub-stream derivation and sorting.
    std::int64_t ordinal() const {
        return static_cast<std::int64_t>(year) * 10000 + month * 100 + day;
    }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
        return std::string(buf);
    }

    static Date from_ordinal(std::int64_t key) {
        Date d;
        d.year = static_cast<int>(key / 10000);
        d.month = static_cast<int>((key / 100) % 100);
        d.day = static_cast<int>(key % 100);
        if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) {
            throw InputError("invalid date key " + std::to_string(key));
        }
        return d;
    }

    static Date parse(const std::string& text) {
        Date d;
        int n = 0;
        if (std::sscanf(text.c_str(), "%4d-%2d-%2d%n", &d.year, &d.month, &d.day, &n) != 3 ||
            n != static_cast<int>(text.size()) || text.size() != 10) {
            throw InputError("unparseable date '" + text + "' (expected YYYY-MM-DD)");
        }
        if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
            throw InputError("date out of range: '" + text + "'");
        }
        return d;
    }

    static int days_in_month(int year, int month) {
        static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        if (month == 2) {
            const bool leap = year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
            return leap ? 29 : 28;
        }
        return lengths[month - 1];
    }
};

}  // namespace emspec
