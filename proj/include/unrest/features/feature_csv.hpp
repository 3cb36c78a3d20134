#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "unrest/core/error.hpp"
#include "unrest/core/text.hpp"
#include "unrest/features/intervals.hpp"

namespace unrest::features {

inline std::string feature_csv_header(std::size_t lags) {
    std::string h = "interval_index,start_date,end_date,mct,mct_bar,mct_bar_comp,theta";
    for (std::size_t j = 1; j <= lags; ++j) h += ",lag_" + std::to_string(j);
    h += ",mean_tone,mean_goldstein,month";
    return h;
}

inline void append_feature_fields(std::string& out, const IntervalFeatureRow& r) {
    out += std::to_string(r.interval_index);
    out += ',';
    out += r.start_date.iso();
    out += ',';
    out += r.end_date.iso();
    for (double v : {r.mct, r.mct_bar, r.mct_bar_comp, r.theta}) {
        out += ',';
        append_double(out, v);
    }
    for (double v : r.lags) {
        out += ',';
        append_double(out, v);
    }
    out += ',';
    out += format_optional(r.mean_tone);
    out += ',';
    out += format_optional(r.mean_goldstein);
    out += ',';
    out += std::to_string(r.month);
}

/// Number of lag columns named in a feature header, or -1 if the header does
/// not have the feature layout (optionally followed by `trailer`).
inline int lag_count_from_header(std::string_view header, std::string_view trailer = {}) {
    auto cols = split(header, ',');
    std::size_t extra = trailer.empty() ? 0 : 1;
    if (cols.size() < 10 + extra) return -1;
    std::size_t lags = cols.size() - 10 - extra;
    std::string want = feature_csv_header(lags);
    if (!trailer.empty()) (want += ',') += trailer;
    return header == want ? static_cast<int>(lags) : -1;
}

/// Parses the feature fields from `cols[0 .. 10 + lags)`.
inline IntervalFeatureRow parse_feature_fields(const std::vector<std::string_view>& cols, std::size_t lags) {
    IntervalFeatureRow r;
    auto num = [](std::string_view s) {
        double v;
        if (!parse_double(s, v)) throw FormatError("bad number '" + std::string(s) + "'");
        return v;
    };
    auto date = [](std::string_view s) {
        auto d = Date::parse_iso(s);
        if (!d) throw FormatError("bad date '" + std::string(s) + "'");
        return *d;
    };
    if (!parse_int(cols[0], r.interval_index)) throw FormatError("bad interval_index");
    r.start_date = date(cols[1]);
    r.end_date = date(cols[2]);
    r.mct = num(cols[3]);
    r.mct_bar = num(cols[4]);
    r.mct_bar_comp = num(cols[5]);
    r.theta = num(cols[6]);
    r.lags.resize(lags);
    for (std::size_t j = 0; j < lags; ++j) r.lags[j] = num(cols[7 + j]);
    auto opt = [&](std::string_view s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return num(s);
    };
    r.mean_tone = opt(cols[7 + lags]);
    r.mean_goldstein = opt(cols[8 + lags]);
    if (!parse_int(cols[9 + lags], r.month) || r.month < 1 || r.month > 12) throw FormatError("bad month");
    return r;
}

inline std::string write_feature_csv(const std::vector<IntervalFeatureRow>& rows, std::size_t lags) {
    std::string out = feature_csv_header(lags);
    out += '\n';
    for (const auto& r : rows) {
        if (r.lags.size() != lags) throw DimensionMismatch("row carries " + std::to_string(r.lags.size()) + " lags");
        append_feature_fields(out, r);
        out += '\n';
    }
    return out;
}

inline std::vector<IntervalFeatureRow> read_feature_csv(std::string_view text) {
    std::vector<IntervalFeatureRow> rows;
    int lags = -1;
    bool header = true;
    for_each_line(text, [&](std::string_view line) {
        if (header) {
            header = false;
            lags = lag_count_from_header(line);
            if (lags < 0) throw FormatError("not a feature CSV header");
            return;
        }
        if (line.empty()) return;
        auto cols = split(line, ',');
        if (cols.size() != static_cast<std::size_t>(10 + lags)) throw FormatError("wrong column count");
        rows.push_back(parse_feature_fields(cols, static_cast<std::size_t>(lags)));
    });
    if (header) throw FormatError("empty feature CSV");
    return rows;
}

} // namespace unrest::features
