#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>

#include "unrest/core/date.hpp"
#include "unrest/core/text.hpp"

namespace unrest::ingest {

/// Column positions (0-based) in a GDELT 2.0 export row.
namespace col {
inline constexpr std::size_t kGlobalEventId = 0;
inline constexpr std::size_t kDay = 1;
inline constexpr std::size_t kMonthYear = 2;
inline constexpr std::size_t kActor1Type1 = 12;
inline constexpr std::size_t kActor2Type1 = 22;
inline constexpr std::size_t kEventRootCode = 28;
inline constexpr std::size_t kGoldsteinScale = 30;
inline constexpr std::size_t kAvgTone = 34;
inline constexpr std::size_t kActionGeoCountry = 53;
inline constexpr std::size_t kCount = 61;
} // namespace col

/// The attribute subset kept from one export row. Empty strings and
/// empty optionals mean the source field was blank.
struct EventRecord {
    std::uint64_t global_event_id = 0;
    Date day;
    int month_year = 0;
    std::string actor1_type;
    std::string actor2_type;
    int event_root_code = 0;
    std::optional<double> goldstein_scale;
    std::optional<double> avg_tone;
    std::string action_country;

    int year() const { return day.year(); }
    bool operator==(const EventRecord&) const = default;
};

enum class RowError {
    none,
    field_count,
    bad_id,
    bad_day,
    bad_month_year,
    bad_root_code,
    bad_goldstein,
    bad_tone,
};

inline const char* to_string(RowError e) {
    switch (e) {
    case RowError::none: return "none";
    case RowError::field_count: return "field_count";
    case RowError::bad_id: return "bad_id";
    case RowError::bad_day: return "bad_day";
    case RowError::bad_month_year: return "bad_month_year";
    case RowError::bad_root_code: return "bad_root_code";
    case RowError::bad_goldstein: return "bad_goldstein";
    case RowError::bad_tone: return "bad_tone";
    }
    return "unknown";
}

namespace detail {

inline std::string text_field(std::string_view s) {
    for (unsigned char c : s)
        if (c >= 0x80) return sanitize_utf8(s);
    return std::string(s);
}

inline bool parse_root_code(std::string_view s, int& out) {
    return s.size() <= 2 && parse_int(s, out) && out >= 1 && out <= 20;
}

inline bool parse_scale(std::string_view s, std::optional<double>& out, double lo, double hi) {
    if (s.empty()) {
        out.reset();
        return true;
    }
    double v;
    if (!parse_double(s, v) || v < lo || v > hi) return false;
    out = v;
    return true;
}

// Fields shared by the export row and the store row once they are located.
inline RowError fill_record(EventRecord& rec, std::string_view id, std::string_view day,
                            std::string_view month_year, std::string_view actor1, std::string_view actor2,
                            std::string_view root, std::string_view goldstein, std::string_view tone,
                            std::string_view country) {
    if (!parse_int(id, rec.global_event_id)) return RowError::bad_id;
    auto d = Date::parse_compact(day);
    if (!d) return RowError::bad_day;
    rec.day = *d;
    if (month_year.size() != 6 || !parse_int(month_year, rec.month_year) ||
        rec.month_year != rec.day.month_year())
        return RowError::bad_month_year;
    if (!parse_root_code(root, rec.event_root_code)) return RowError::bad_root_code;
    if (!parse_scale(goldstein, rec.goldstein_scale, -10.0, 10.0)) return RowError::bad_goldstein;
    if (!parse_scale(tone, rec.avg_tone, -100.0, 100.0)) return RowError::bad_tone;
    rec.actor1_type = text_field(actor1);
    rec.actor2_type = text_field(actor2);
    rec.action_country = country.size() == 2 ? text_field(country) : std::string{};
    return RowError::none;
}

} // namespace detail

/// Extracts the attribute subset from one tab-delimited 61-column export
/// row. Returns nullopt (and sets `why`) for rows that must be skipped.
inline std::optional<EventRecord> parse_event_row(std::string_view row, RowError* why = nullptr) {
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    std::array<std::string_view, col::kCount> f;
    std::size_t n = 0;
    std::size_t start = 0;
    for (;;) {
        const void* hit = std::memchr(row.data() + start, '\t', row.size() - start);
        std::size_t end = hit ? static_cast<const char*>(hit) - row.data() : row.size();
        if (n == col::kCount) {
            n = col::kCount + 1;
            break;
        }
        f[n++] = row.substr(start, end - start);
        if (!hit) break;
        start = end + 1;
    }
    RowError err = RowError::field_count;
    EventRecord rec;
    if (n == col::kCount) {
        err = detail::fill_record(rec, f[col::kGlobalEventId], f[col::kDay], f[col::kMonthYear],
                                  f[col::kActor1Type1], f[col::kActor2Type1], f[col::kEventRootCode],
                                  f[col::kGoldsteinScale], f[col::kAvgTone], f[col::kActionGeoCountry]);
    }
    if (why) *why = err;
    if (err != RowError::none) return std::nullopt;
    return rec;
}

inline constexpr std::string_view kStoreHeader =
    "global_event_id\tday\tmonth_year\tactor1_type\tactor2_type\tevent_root_code\t"
    "goldstein_scale\tavg_tone\taction_country";

/// The partition-store line for a record (no trailing newline).
inline void append_event_row(std::string& out, const EventRecord& r) {
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, r.global_event_id);
    out.append(buf, p);
    out.push_back('\t');
    out += r.day.compact();
    out.push_back('\t');
    out += std::to_string(r.month_year);
    out.push_back('\t');
    out += r.actor1_type;
    out.push_back('\t');
    out += r.actor2_type;
    out.push_back('\t');
    if (r.event_root_code < 10) out.push_back('0');
    out += std::to_string(r.event_root_code);
    out.push_back('\t');
    if (r.goldstein_scale) append_double(out, *r.goldstein_scale);
    out.push_back('\t');
    if (r.avg_tone) append_double(out, *r.avg_tone);
    out.push_back('\t');
    out += r.action_country;
}

inline std::string format_event_row(const EventRecord& r) {
    std::string s;
    append_event_row(s, r);
    return s;
}

/// Inverse of format_event_row.
inline std::optional<EventRecord> parse_store_row(std::string_view line, RowError* why = nullptr) {
    auto f = split(line, '\t');
    RowError err = RowError::field_count;
    EventRecord rec;
    if (f.size() == 9) err = detail::fill_record(rec, f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8]);
    if (why) *why = err;
    if (err != RowError::none) return std::nullopt;
    return rec;
}

} // namespace unrest::ingest
