#include "normforge/date.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "normforge/error.hpp"

namespace normforge {

namespace {

bool parse_digits(std::string_view s, int& out) {
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

} // namespace

Date Date::parse(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        !parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
        !parse_digits(text.substr(8, 2), d)) {
        throw Error(ErrorKind::InvalidDate, "invalid date '" + std::string(text) + "'",
                    std::string(text));
    }
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                    std::chrono::day{unsigned(d)}};
    if (!ymd.ok())
        throw Error(ErrorKind::InvalidDate, "invalid date '" + std::string(text) + "'",
                    std::string(text));
    return Date(ymd);
}

Date Date::today() {
    auto now = std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now());
    return Date(std::chrono::year_month_day{now});
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd_.year()), unsigned(ymd_.month()),
                  unsigned(ymd_.day()));
    return buf;
}

} // namespace normforge
