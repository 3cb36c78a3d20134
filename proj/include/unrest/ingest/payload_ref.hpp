#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unrest/core/date.hpp"
#include "unrest/core/text.hpp"

namespace unrest::ingest {

inline constexpr std::string_view kExportSuffix = ".export.CSV.zip";

/// One master-index entry pointing at a 15-minute export payload.
struct PayloadRef {
    std::uint64_t size_bytes = 0;
    std::string checksum;  // md5, lowercase hex
    std::string url;
    Timestamp timestamp;

    /// Final path component of the url, e.g. "20190315000000.export.CSV.zip".
    std::string_view file_name() const {
        std::string_view u = url;
        auto slash = u.find_last_of('/');
        return slash == std::string_view::npos ? u : u.substr(slash + 1);
    }

    bool operator==(const PayloadRef&) const = default;
};

struct MasterIndex {
    std::vector<PayloadRef> refs;
    std::size_t malformed_lines = 0;
    std::size_t other_tables = 0;
};

/// Parses "<size> <md5> <url>" lines, keeping export payloads in file order.
/// Lines with fewer than three fields, a bad size, or a bad file stamp are
/// counted and skipped.
inline MasterIndex parse_master_index(std::string_view index_text) {
    MasterIndex out;
    for_each_line(index_text, [&](std::string_view line) {
        line = trim(line);
        if (line.empty()) return;
        std::string_view fields[3];
        std::size_t n = 0;
        std::size_t pos = 0;
        while (pos < line.size() && n < 3) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
            if (pos >= line.size()) break;
            std::size_t end = pos;
            while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
            fields[n++] = line.substr(pos, end - pos);
            pos = end;
        }
        if (n < 3) {
            ++out.malformed_lines;
            return;
        }
        if (!ends_with(fields[2], kExportSuffix)) {
            ++out.other_tables;
            return;
        }
        PayloadRef ref;
        ref.url = std::string(fields[2]);
        ref.checksum = std::string(fields[1]);
        auto stamp = ref.file_name().substr(0, 14);
        auto ts = Timestamp::parse_stamp(stamp);
        if (!parse_int(fields[0], ref.size_bytes) || !ts || ts->minute() % 15 != 0 ||
            ref.file_name().size() != 14 + kExportSuffix.size()) {
            ++out.malformed_lines;
            return;
        }
        ref.timestamp = *ts;
        out.refs.push_back(std::move(ref));
    });
    return out;
}

inline std::string format_master_line(const PayloadRef& ref) {
    return std::to_string(ref.size_bytes) + " " + ref.checksum + " " + ref.url;
}

/// Refs strictly newer than `last_imported`, ascending by timestamp.
inline std::vector<PayloadRef> plan_import(const std::vector<PayloadRef>& index,
                                           const std::optional<Timestamp>& last_imported) {
    std::vector<PayloadRef> plan;
    for (const auto& ref : index)
        if (!last_imported || ref.timestamp > *last_imported) plan.push_back(ref);
    std::stable_sort(plan.begin(), plan.end(),
                     [](const PayloadRef& a, const PayloadRef& b) { return a.timestamp < b.timestamp; });
    return plan;
}

} // namespace unrest::ingest
