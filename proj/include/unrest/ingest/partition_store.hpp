#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "unrest/core/error.hpp"
#include "unrest/core/files.hpp"
#include "unrest/ingest/event_record.hpp"

namespace unrest::ingest {

using ShardKey = std::pair<std::string, int>;  // (country, year)

struct PartitionSummary {
    std::map<ShardKey, std::size_t> appended;
    std::size_t out_of_scope = 0;  // country absent or not requested
    std::size_t duplicates = 0;    // global_event_id already in the shard

    std::size_t total_appended() const {
        std::size_t n = 0;
        for (const auto& [k, v] : appended) n += v;
        return n;
    }
    std::size_t dropped() const { return out_of_scope + duplicates; }

    PartitionSummary& operator+=(const PartitionSummary& o) {
        for (const auto& [k, v] : o.appended) appended[k] += v;
        out_of_scope += o.out_of_scope;
        duplicates += o.duplicates;
        return *this;
    }
};

/// Per-country, per-year tab-delimited event stores under `<root>/raw`.
///
/// Appends are staged in memory; finalize() sorts every touched shard by
/// (day, global_event_id) and writes all of them atomically. A store with an
/// empty root lives in memory only and cannot be finalized.
class PartitionStore {
public:
    explicit PartitionStore(fs::path root) : root_(std::move(root)) {}

    const fs::path& root() const noexcept { return root_; }

    fs::path shard_path(const std::string& country, int year) const {
        return root_ / "raw" / country / (std::to_string(year) + ".tsv");
    }

    /// Routes each record to its (country, year) shard. First occurrence of a
    /// global_event_id within a shard wins.
    PartitionSummary append(std::span<const EventRecord> records, const std::set<std::string>& countries) {
        if (countries.empty()) throw InvalidValue("partition requires at least one country");
        PartitionSummary summary;
        for (const auto& rec : records) {
            if (rec.action_country.empty() || !countries.contains(rec.action_country)) {
                ++summary.out_of_scope;
                continue;
            }
            ShardKey key{rec.action_country, rec.year()};
            Shard& shard = touch(key);
            if (!shard.ids.insert(rec.global_event_id).second) {
                ++summary.duplicates;
                continue;
            }
            shard.rows.push_back(rec);
            shard.dirty = true;
            ++summary.appended[key];
        }
        return summary;
    }

    /// Sorts and persists every shard changed since the last finalize. On
    /// failure no shard file is replaced.
    void finalize() {
        if (root_.empty()) throw InvalidValue("memory-only store cannot be finalized");
        std::vector<std::pair<fs::path, std::string>> files;
        for (auto& [key, shard] : shards_) {
            if (!shard.dirty) continue;
            std::stable_sort(shard.rows.begin(), shard.rows.end(), [](const EventRecord& a, const EventRecord& b) {
                return std::pair(a.day, a.global_event_id) < std::pair(b.day, b.global_event_id);
            });
            std::string text;
            text.reserve(shard.rows.size() * 48 + 128);
            text += kStoreHeader;
            text.push_back('\n');
            for (const auto& r : shard.rows) {
                append_event_row(text, r);
                text.push_back('\n');
            }
            files.emplace_back(shard_path(key.first, key.second), std::move(text));
        }
        write_files_atomic(files);
        for (auto& [key, shard] : shards_) shard.dirty = false;
    }

    /// Staged rows for a country (all years, including anything loaded from
    /// disk for touched shards), sorted by (day, global_event_id).
    std::vector<EventRecord> collect(const std::string& country) const {
        std::vector<EventRecord> out;
        for (const auto& [key, shard] : shards_)
            if (key.first == country) out.insert(out.end(), shard.rows.begin(), shard.rows.end());
        std::stable_sort(out.begin(), out.end(), [](const EventRecord& a, const EventRecord& b) {
            return std::pair(a.day, a.global_event_id) < std::pair(b.day, b.global_event_id);
        });
        return out;
    }

    /// Countries with at least one shard on disk.
    std::vector<std::string> countries_on_disk() const {
        std::vector<std::string> out;
        auto dir = root_ / "raw";
        if (!fs::exists(dir)) return out;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_directory()) out.push_back(e.path().filename().string());
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Every stored record for a country, across years, in store order.
    std::vector<EventRecord> load_country(const std::string& country) const {
        std::vector<EventRecord> out;
        auto dir = root_ / "raw" / country;
        if (!fs::exists(dir)) return out;
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".tsv") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) read_shard_file(f, out);
        return out;
    }

    bool has_country(const std::string& country) const {
        auto dir = root_ / "raw" / country;
        if (!fs::exists(dir)) return false;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".tsv") return true;
        return false;
    }

private:
    struct Shard {
        std::vector<EventRecord> rows;
        std::unordered_set<std::uint64_t> ids;
        bool dirty = false;
    };

    static void read_shard_file(const fs::path& path, std::vector<EventRecord>& out) {
        const std::string text = read_file(path);
        bool header = true;
        std::size_t lineno = 0;
        for_each_line(text, [&](std::string_view line) {
            ++lineno;
            if (header) {
                header = false;
                if (line != kStoreHeader) throw FormatError(path.string() + ": unexpected header");
                return;
            }
            if (line.empty()) return;
            auto rec = parse_store_row(line);
            if (!rec) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad row");
            out.push_back(std::move(*rec));
        });
    }

    Shard& touch(const ShardKey& key) {
        auto it = shards_.find(key);
        if (it != shards_.end()) return it->second;
        Shard shard;
        auto path = shard_path(key.first, key.second);
        if (!root_.empty() && fs::exists(path)) {
            read_shard_file(path, shard.rows);
            shard.ids.reserve(shard.rows.size());
            for (const auto& r : shard.rows) shard.ids.insert(r.global_event_id);
        }
        return shards_.emplace(key, std::move(shard)).first->second;
    }

    fs::path root_;
    std::map<ShardKey, Shard> shards_;
};

} // namespace unrest::ingest
