#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "unrest/core/digest.hpp"
#include "unrest/core/parallel.hpp"
#include "unrest/ingest/event_record.hpp"
#include "unrest/ingest/import_state.hpp"
#include "unrest/ingest/partition_store.hpp"
#include "unrest/ingest/source.hpp"
#include "unrest/ingest/zip.hpp"

namespace unrest::ingest {

enum class PayloadStatus { ok, corrupt_archive, checksum_mismatch, fetch_failed };

inline const char* to_string(PayloadStatus s) {
    switch (s) {
    case PayloadStatus::ok: return "ok";
    case PayloadStatus::corrupt_archive: return "CorruptArchive";
    case PayloadStatus::checksum_mismatch: return "ChecksumMismatch";
    case PayloadStatus::fetch_failed: return "FetchError";
    }
    return "unknown";
}

struct DecodedPayload {
    PayloadStatus status = PayloadStatus::ok;
    std::string message;
    std::vector<EventRecord> records;
    std::uint64_t malformed = 0;
};

/// Parses every row of a tab-delimited member, skipping malformed ones.
inline void parse_rows(std::string_view text, DecodedPayload& out) {
    for_each_line(text, [&](std::string_view line) {
        if (line.empty()) return;
        if (auto rec = parse_event_row(line)) out.records.push_back(std::move(*rec));
        else ++out.malformed;
    });
}

/// Unzips and parses one payload. Pure; safe to run concurrently.
inline DecodedPayload decode_payload(std::string_view archive, const PayloadRef& ref, bool verify_checksum) {
    DecodedPayload out;
    if (verify_checksum) {
        auto got = md5_hex(archive);
        if (got != ref.checksum) {
            out.status = PayloadStatus::checksum_mismatch;
            out.message = std::string(ref.file_name()) + ": md5 " + got + " != " + ref.checksum;
            return out;
        }
    }
    try {
        auto member = read_single_member_zip(archive);
        parse_rows(member.data, out);
    } catch (const CorruptArchive& e) {
        out.status = PayloadStatus::corrupt_archive;
        out.message = std::string(ref.file_name()) + ": " + e.what();
        out.records.clear();
        out.malformed = 0;
    }
    return out;
}

/// Folds a decoded payload into the import state. Failed payloads are
/// counted and do not move the high-water mark.
inline void apply_to_state(const DecodedPayload& p, const PayloadRef& ref, ImportState& state) {
    switch (p.status) {
    case PayloadStatus::ok:
        state.stats.parsed += p.records.size();
        state.stats.malformed += p.malformed;
        state.checksums[ref.url] = ref.checksum;
        state.advance_to(ref.timestamp);
        break;
    case PayloadStatus::corrupt_archive: ++state.stats.corrupt_payloads; break;
    case PayloadStatus::checksum_mismatch: ++state.stats.checksum_failures; break;
    case PayloadStatus::fetch_failed: break;
    }
}

inline DecodedPayload import_payload(std::string_view archive, const PayloadRef& ref, ImportState& state,
                                     bool verify_checksum = false) {
    auto p = decode_payload(archive, ref, verify_checksum);
    apply_to_state(p, ref, state);
    return p;
}

struct ImportOptions {
    std::set<std::string> countries;
    bool verify_checksums = false;
    std::size_t jobs = 1;
    std::size_t batch_size = 64;
};

struct ImportReport {
    std::size_t index_entries = 0;
    std::size_t index_malformed = 0;
    std::size_t planned = 0;
    std::size_t imported = 0;
    std::size_t skipped = 0;
    bool stopped_on_fetch_error = false;
    std::vector<std::string> problems;
    PartitionSummary partition;
    std::uint64_t malformed_rows = 0;
};

/// Imports every payload newer than the state's high-water mark, then
/// finalizes the store and persists the state (in that order).
///
/// Payloads are fetched and parsed on `jobs` workers but merged in plan
/// order, so the store content is independent of the worker count. A fetch
/// failure stops the run so that the high-water mark never skips a payload
/// that was not attempted.
inline ImportReport run_import(PayloadSource& source, PartitionStore& store, ImportState& state,
                               const ImportOptions& opts) {
    ImportReport report;
    auto index = parse_master_index(source.fetch_index());
    report.index_entries = index.refs.size();
    report.index_malformed = index.malformed_lines;
    auto plan = plan_import(index.refs, state.last_imported);
    report.planned = plan.size();

    const std::size_t batch = std::max<std::size_t>(1, opts.batch_size);
    for (std::size_t begin = 0; begin < plan.size() && !report.stopped_on_fetch_error; begin += batch) {
        const std::size_t end = std::min(plan.size(), begin + batch);
        std::vector<DecodedPayload> decoded(end - begin);
        parallel_for(end - begin, opts.jobs, [&](std::size_t i) {
            const auto& ref = plan[begin + i];
            try {
                auto bytes = source.fetch(ref);
                decoded[i] = decode_payload(bytes, ref, opts.verify_checksums);
            } catch (const Error& e) {
                decoded[i].status = PayloadStatus::fetch_failed;
                decoded[i].message = e.what();
            }
        });
        for (std::size_t i = 0; i < decoded.size(); ++i) {
            const auto& ref = plan[begin + i];
            auto& p = decoded[i];
            if (p.status == PayloadStatus::fetch_failed) {
                report.stopped_on_fetch_error = true;
                report.problems.push_back(p.message);
                break;
            }
            apply_to_state(p, ref, state);
            if (p.status != PayloadStatus::ok) {
                ++report.skipped;
                report.problems.push_back(std::string(to_string(p.status)) + ": " + p.message);
                continue;
            }
            auto summary = store.append(p.records, opts.countries);
            state.stats.out_of_scope += summary.out_of_scope;
            state.stats.duplicates += summary.duplicates;
            report.partition += summary;
            report.malformed_rows += p.malformed;
            ++report.imported;
            p.records.clear();
            p.records.shrink_to_fit();
        }
    }
    store.finalize();
    save_import_state(store.root(), state);
    return report;
}

} // namespace unrest::ingest
