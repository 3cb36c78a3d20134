#pragma once

// Shared helpers for the test binaries.

#include <array>
#include <atomic>
#include <random>
#include <string>
#include <vector>

#include "unrest/core/files.hpp"
#include "unrest/features/daily_series.hpp"
#include "unrest/ingest/event_record.hpp"

namespace unrest::test {

/// Unique scratch directory, removed on destruction.
struct TempDir {
    fs::path path;

    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path = fs::temp_directory_path() /
               ("unrest-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

/// A 61-column export row with plausible filler. Only the fields the parser
/// reads are parameters.
struct RowSpec {
    std::string id = "1000";
    std::string day = "20190315";
    std::string month_year = "201903";
    std::string actor1_type = "OPP";
    std::string actor2_type = "GOV";
    std::string root_code = "14";
    std::string goldstein = "-6.5";
    std::string tone = "-3.25";
    std::string country = "PK";
};

inline std::string make_row(const RowSpec& r, std::size_t columns = 61) {
    std::vector<std::string> f(columns);
    auto set = [&](std::size_t i, std::string v) {
        if (i < columns) f[i] = std::move(v);
    };
    set(0, r.id);
    set(1, r.day);
    set(2, r.month_year);
    set(3, r.day.substr(0, 4));
    set(4, "2019.2027");
    set(5, "PAKOPP");
    set(6, "PAKISTAN");
    set(12, r.actor1_type);
    set(22, r.actor2_type);
    set(25, "1");
    set(26, r.root_code + "1");
    set(27, r.root_code + "1");
    set(28, r.root_code);
    set(29, "3");
    set(30, r.goldstein);
    set(31, "4");
    set(32, "1");
    set(33, "4");
    set(34, r.tone);
    set(51, "1");
    set(52, "Karachi, Sindh, Pakistan");
    set(53, r.country);
    set(56, "24.8667");
    set(57, "67.05");
    set(59, r.day + "001500");
    set(60, "https://example.org/story");
    std::string out;
    for (std::size_t i = 0; i < columns; ++i) {
        if (i) out.push_back('\t');
        out += f[i];
    }
    return out;
}

/// Daily series built straight from counts (tone/Goldstein left empty).
inline features::DailySeries series_from_counts(const std::vector<double>& counts, Date first = Date(2015, 1, 1),
                                                std::string country = "PK") {
    features::DailySeries s;
    s.country = std::move(country);
    s.first = first;
    s.resize(counts.size());
    s.count = counts;
    return s;
}

inline std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n) {
    std::bernoulli_distribution b(0.5);
    std::vector<int> out(n);
    for (auto& v : out) v = b(rng) ? 1 : 0;
    return out;
}

} // namespace unrest::test
