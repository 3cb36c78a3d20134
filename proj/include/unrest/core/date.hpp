#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "unrest/core/text.hpp"

namespace unrest {

/// Calendar day, stored as days since 1970-01-01.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days d) : days_(d.time_since_epoch().count()) {}
    constexpr Date(int y, unsigned m, unsigned d)
        : Date(std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}}) {}

    static constexpr Date from_serial(std::int32_t days) {
        Date out;
        out.days_ = days;
        return out;
    }

    constexpr std::int32_t serial() const noexcept { return days_; }
    constexpr std::chrono::sys_days sys() const noexcept {
        return std::chrono::sys_days{std::chrono::days{days_}};
    }
    constexpr std::chrono::year_month_day ymd() const noexcept { return std::chrono::year_month_day{sys()}; }
    constexpr int year() const noexcept { return static_cast<int>(ymd().year()); }
    constexpr unsigned month() const noexcept { return static_cast<unsigned>(ymd().month()); }
    constexpr unsigned day() const noexcept { return static_cast<unsigned>(ymd().day()); }

    constexpr Date operator+(std::int32_t n) const noexcept { return from_serial(days_ + n); }
    constexpr Date operator-(std::int32_t n) const noexcept { return from_serial(days_ - n); }
    constexpr std::int32_t operator-(Date other) const noexcept { return days_ - other.days_; }
    constexpr Date& operator++() noexcept { ++days_; return *this; }

    constexpr auto operator<=>(const Date&) const = default;

    /// YYYY-MM-DD
    std::string iso() const {
        char buf[16];
        auto ymd_ = ymd();
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd_.year()),
                      static_cast<unsigned>(ymd_.month()), static_cast<unsigned>(ymd_.day()));
        return buf;
    }

    /// YYYYMMDD, the GDELT "Day" column.
    std::string compact() const {
        char buf[16];
        auto ymd_ = ymd();
        std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(ymd_.year()),
                      static_cast<unsigned>(ymd_.month()), static_cast<unsigned>(ymd_.day()));
        return buf;
    }

    /// YYYYMM
    int month_year() const noexcept { return year() * 100 + static_cast<int>(month()); }

    static std::optional<Date> from_ymd(int y, int m, int d) {
        if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
        std::chrono::year_month_day v{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                      std::chrono::day{static_cast<unsigned>(d)}};
        if (!v.ok()) return std::nullopt;
        return Date{std::chrono::sys_days{v}};
    }

    static std::optional<Date> parse_compact(std::string_view s) {
        if (s.size() != 8) return std::nullopt;
        int y, m, d;
        if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(4, 2), m) || !parse_int(s.substr(6, 2), d))
            return std::nullopt;
        return from_ymd(y, m, d);
    }

    static std::optional<Date> parse_iso(std::string_view s) {
        if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
        int y, m, d;
        if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) || !parse_int(s.substr(8, 2), d))
            return std::nullopt;
        return from_ymd(y, m, d);
    }

private:
    std::int32_t days_ = 0;
};

/// UTC instant at minute resolution, as carried by GDELT payload file names.
struct Timestamp {
    Date date;
    int minute_of_day = 0;

    constexpr auto operator<=>(const Timestamp&) const = default;

    int hour() const noexcept { return minute_of_day / 60; }
    int minute() const noexcept { return minute_of_day % 60; }

    /// Parses the 14-digit YYYYMMDDHHMMSS stamp.
    static std::optional<Timestamp> parse_stamp(std::string_view s) {
        if (s.size() != 14) return std::nullopt;
        auto d = Date::parse_compact(s.substr(0, 8));
        int hh, mm, ss;
        if (!d || !parse_int(s.substr(8, 2), hh) || !parse_int(s.substr(10, 2), mm) ||
            !parse_int(s.substr(12, 2), ss))
            return std::nullopt;
        if (hh > 23 || mm > 59 || ss != 0) return std::nullopt;
        return Timestamp{*d, hh * 60 + mm};
    }

    std::string stamp() const {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%s%02d%02d00", date.compact().c_str(), hour(), minute());
        return buf;
    }

    /// 2019-03-15T00:15:00Z
    std::string iso() const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%sT%02d:%02d:00Z", date.iso().c_str(), hour(), minute());
        return buf;
    }

    static std::optional<Timestamp> parse_iso(std::string_view s) {
        if (s.size() != 20 || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z')
            return std::nullopt;
        auto d = Date::parse_iso(s.substr(0, 10));
        int hh, mm, ss;
        if (!d || !parse_int(s.substr(11, 2), hh) || !parse_int(s.substr(14, 2), mm) ||
            !parse_int(s.substr(17, 2), ss) || hh > 23 || mm > 59 || ss != 0)
            return std::nullopt;
        return Timestamp{*d, hh * 60 + mm};
    }
};

} // namespace unrest
