#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "unrest/core/date.hpp"
#include "unrest/core/error.hpp"
#include "unrest/core/files.hpp"
#include "unrest/core/text.hpp"

namespace unrest::ingest {

struct RowStats {
    std::uint64_t parsed = 0;
    std::uint64_t malformed = 0;
    std::uint64_t out_of_scope = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t corrupt_payloads = 0;
    std::uint64_t checksum_failures = 0;

    RowStats& operator+=(const RowStats& o) {
        parsed += o.parsed;
        malformed += o.malformed;
        out_of_scope += o.out_of_scope;
        duplicates += o.duplicates;
        corrupt_payloads += o.corrupt_payloads;
        checksum_failures += o.checksum_failures;
        return *this;
    }
    bool operator==(const RowStats&) const = default;
};

/// Persistent import bookkeeping kept in the store root.
struct ImportState {
    static constexpr int kVersion = 1;
    static constexpr std::string_view kFileName = "import_state.txt";

    std::optional<Timestamp> last_imported;
    std::map<std::string, std::string> checksums;  // url -> md5
    RowStats stats;

    /// Moves the high-water mark forward; never backwards.
    void advance_to(const Timestamp& ts) {
        if (!last_imported || ts > *last_imported) last_imported = ts;
    }

    bool operator==(const ImportState&) const = default;
};

inline std::string serialize(const ImportState& s) {
    std::string out;
    out += "version=" + std::to_string(ImportState::kVersion) + "\n";
    out += "last_imported=" + (s.last_imported ? s.last_imported->iso() : std::string{}) + "\n";
    out += "parsed=" + std::to_string(s.stats.parsed) + "\n";
    out += "malformed=" + std::to_string(s.stats.malformed) + "\n";
    out += "out_of_scope=" + std::to_string(s.stats.out_of_scope) + "\n";
    out += "duplicates=" + std::to_string(s.stats.duplicates) + "\n";
    out += "corrupt_payloads=" + std::to_string(s.stats.corrupt_payloads) + "\n";
    out += "checksum_failures=" + std::to_string(s.stats.checksum_failures) + "\n";
    out += "[checksums]\n";
    for (const auto& [url, sum] : s.checksums) out += url + " " + sum + "\n";
    return out;
}

inline ImportState parse_import_state(std::string_view text) {
    ImportState s;
    bool in_checksums = false;
    bool saw_version = false;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& why) {
        throw FormatError("import state line " + std::to_string(lineno) + ": " + why);
    };
    for_each_line(text, [&](std::string_view line) {
        ++lineno;
        if (trim(line).empty()) return;
        if (line == "[checksums]") {
            in_checksums = true;
            return;
        }
        if (in_checksums) {
            auto sp = line.find(' ');
            if (sp == std::string_view::npos) fail("expected '<url> <md5>'");
            s.checksums.emplace(std::string(line.substr(0, sp)), std::string(line.substr(sp + 1)));
            return;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected key=value");
        auto key = line.substr(0, eq);
        auto value = line.substr(eq + 1);
        auto counter = [&](std::uint64_t& dst) {
            if (!parse_int(value, dst)) fail("bad counter for " + std::string(key));
        };
        if (key == "version") {
            int v = 0;
            if (!parse_int(value, v) || v != ImportState::kVersion) fail("unsupported version");
            saw_version = true;
        } else if (key == "last_imported") {
            if (!value.empty()) {
                auto ts = Timestamp::parse_iso(value);
                if (!ts) fail("bad timestamp");
                s.last_imported = *ts;
            }
        } else if (key == "parsed") counter(s.stats.parsed);
        else if (key == "malformed") counter(s.stats.malformed);
        else if (key == "out_of_scope") counter(s.stats.out_of_scope);
        else if (key == "duplicates") counter(s.stats.duplicates);
        else if (key == "corrupt_payloads") counter(s.stats.corrupt_payloads);
        else if (key == "checksum_failures") counter(s.stats.checksum_failures);
        else fail("unknown key " + std::string(key));
    });
    if (!saw_version) throw FormatError("import state has no version line");
    return s;
}

inline ImportState load_import_state(const fs::path& store_root) {
    auto path = store_root / ImportState::kFileName;
    if (!fs::exists(path)) return {};
    return parse_import_state(read_file(path));
}

inline void save_import_state(const fs::path& store_root, const ImportState& s) {
    write_file_atomic(store_root / ImportState::kFileName, serialize(s));
}

} // namespace unrest::ingest
