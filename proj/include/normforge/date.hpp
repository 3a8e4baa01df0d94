#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace normforge {

// Calendar date, ISO-8601 "YYYY-MM-DD" on the wire.
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}

    // Throws Error{InvalidDate} on anything but a valid YYYY-MM-DD.
    static Date parse(std::string_view text);
    static Date today();

    std::string to_string() const;
    std::chrono::year_month_day ymd() const { return ymd_; }

    friend bool operator==(const Date&, const Date&) = default;
    friend std::strong_ordering operator<=>(const Date& a, const Date& b) {
        return std::chrono::sys_days(a.ymd_) <=> std::chrono::sys_days(b.ymd_);
    }

private:
    std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                     std::chrono::day{1}};
};

} // namespace normforge
