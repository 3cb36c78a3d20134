#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "unrest/core/date.hpp"
#include "unrest/core/digest.hpp"
#include "unrest/core/error.hpp"
#include "unrest/core/files.hpp"
#include "unrest/core/parallel.hpp"
#include "unrest/core/text.hpp"
#include "unrest/features/config.hpp"
#include "unrest/ingest/payload_ref.hpp"
#include "unrest/ingest/zip.hpp"
#include "unrest/synth/oracle.hpp"
#include "unrest/synth/spec.hpp"

namespace unrest::synth {

inline constexpr std::string_view kDefaultUrlBase = "http://data.gdeltproject.org/gdeltv2";
inline constexpr std::uint64_t kFirstEventId = 800000000;

/// One zipped export payload, named after its 14-digit stamp.
struct Payload {
    ingest::PayloadRef ref;
    std::string member_name;
    std::string archive;
};

struct CountryTruth {
    std::string country;
    Date start;
    std::vector<int> counts;  // selected-root-code events per day
    std::vector<OracleInterval> labels;  // empty when the series is too short
};

struct Corpus {
    std::vector<CountryTruth> truth;
    std::vector<Payload> payloads;  // ascending by timestamp
    std::string master_index;

    const CountryTruth* find(const std::string& country) const {
        for (const auto& t : truth)
            if (t.country == country) return &t;
        return nullptr;
    }
};

namespace detail {

// Sampled attributes of one event, before ids are assigned.
struct Draft {
    int root_code = 14;
    int sub_code = 1;
    double goldstein = 0;
    double tone = 0;
    int actor1 = -1;  // index into kActorTypes, -1 = absent
    int actor2 = -1;
    int mentions = 1;
};

struct SpecDraws {
    std::vector<int> counts;
    std::vector<std::vector<Draft>> days;
};

inline constexpr std::array<const char*, 8> kActorTypes{"OPP", "GOV", "CVL", "MIL", "COP", "JUD", "EDU", "LAB"};

inline double round_to(double v, double step) { return std::round(v / step) * step; }

inline int quad_class(int root) {
    if (root <= 5) return 1;
    if (root <= 9) return 2;
    if (root <= 14) return 3;
    return 4;
}

inline SpecDraws draw(const SynthSpec& spec, const features::FeatureConfig& cfg) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<int> actor(-3, static_cast<int>(kActorTypes.size()) - 1);
    std::uniform_int_distribution<int> other_root(1, 19);
    std::uniform_int_distribution<int> sub(1, 4);
    std::uniform_int_distribution<int> mentions(1, 20);
    std::poisson_distribution<int> background(spec.background_rate > 0 ? spec.background_rate : 1.0);

    const int protest = spec.protest_root_code;

    SpecDraws out;
    out.counts.resize(static_cast<std::size_t>(spec.n_days));
    out.days.resize(static_cast<std::size_t>(spec.n_days));
    for (int d = 0; d < spec.n_days; ++d) {
        const double rate = spec.base_rate * spec.multiplier_on(d);
        int n = 0;
        if (spec.count_model == CountModel::constant) {
            n = static_cast<int>(std::llround(rate));
        } else if (rate > 0) {
            n = std::poisson_distribution<int>(rate)(rng);
        }
        const bool hot = spec.in_spike(d);
        const Regime& tone = hot ? spec.tone_spike : spec.tone_calm;
        const Regime& gold = hot ? spec.goldstein_spike : spec.goldstein_calm;
        auto sample = [&](const Regime& r) { return std::normal_distribution<double>(r.mean, r.std)(rng); };

        auto& events = out.days[static_cast<std::size_t>(d)];
        auto make = [&](int root) {
            Draft e;
            e.root_code = root;
            e.sub_code = sub(rng);
            e.goldstein = round_to(std::clamp(sample(gold), -10.0, 10.0), 0.1);
            e.tone = round_to(std::clamp(sample(tone), -100.0, 100.0), 1e-4);
            e.actor1 = std::max(-1, actor(rng));
            e.actor2 = std::max(-1, actor(rng));
            e.mentions = mentions(rng);
            return e;
        };
        for (int i = 0; i < n; ++i) events.push_back(make(protest));
        const int extra = 1 + (spec.background_rate > 0 ? background(rng) : 0);
        for (int i = 0; i < extra; ++i) {
            int root = other_root(rng);
            if (root >= protest) ++root;  // skip the protest code, stay in 1..20
            events.push_back(make(root));
        }
        int counted = 0;
        for (const auto& e : events) counted += cfg.root_codes.contains(e.root_code) ? 1 : 0;
        out.counts[static_cast<std::size_t>(d)] = counted;
    }
    return out;
}

inline void field(std::string& row, std::string_view v) {
    row.append(v);
    row.push_back('\t');
}

inline std::string render(const Draft& e, std::uint64_t id, const std::string& country, Date day,
                          const std::string& added) {
    const std::string code = std::to_string(e.root_code / 10) + std::to_string(e.root_code % 10);
    const std::string event_code = code + std::to_string(e.sub_code);
    const std::string a1 = e.actor1 < 0 ? std::string{} : kActorTypes[static_cast<std::size_t>(e.actor1)];
    const std::string a2 = e.actor2 < 0 ? std::string{} : kActorTypes[static_cast<std::size_t>(e.actor2)];
    const double fraction = day.year() + (static_cast<double>(day.month()) - 1) / 12.0;

    std::string row;
    row.reserve(320);
    field(row, std::to_string(id));                        // 0 GLOBALEVENTID
    field(row, day.compact());                             // 1 SQLDATE
    field(row, std::to_string(day.month_year()));          // 2 MonthYear
    field(row, std::to_string(day.year()));                // 3 Year
    field(row, format_double(round_to(fraction, 1e-4)));   // 4 FractionDate
    field(row, a1.empty() ? "" : country + a1);            // 5 Actor1Code
    field(row, a1.empty() ? "" : "SYNTHETIC");             // 6 Actor1Name
    field(row, "");                                        // 7 Actor1CountryCode
    for (int c = 8; c <= 11; ++c) field(row, "");          // 8..11 group, ethnic, religion
    field(row, a1);                                        // 12 Actor1Type1Code
    field(row, "");                                        // 13
    field(row, "");                                        // 14
    field(row, a2.empty() ? "" : country + a2);            // 15 Actor2Code
    field(row, a2.empty() ? "" : "SYNTHETIC");             // 16 Actor2Name
    for (int c = 17; c <= 21; ++c) field(row, "");         // 17..21
    field(row, a2);                                        // 22 Actor2Type1Code
    field(row, "");                                        // 23
    field(row, "");                                        // 24
    field(row, "1");                                       // 25 IsRootEvent
    field(row, event_code);                                // 26 EventCode
    field(row, event_code);                                // 27 EventBaseCode
    field(row, code);                                      // 28 EventRootCode
    field(row, std::to_string(quad_class(e.root_code)));   // 29 QuadClass
    field(row, format_double(e.goldstein));                // 30 GoldsteinScale
    field(row, std::to_string(e.mentions));                // 31 NumMentions
    field(row, "1");                                       // 32 NumSources
    field(row, std::to_string(e.mentions));                // 33 NumArticles
    field(row, format_double(e.tone));                     // 34 AvgTone
    for (int c = 35; c <= 50; ++c) field(row, "");         // 35..50 actor geography
    field(row, "1");                                       // 51 ActionGeo_Type
    field(row, "Synthetic");                               // 52 ActionGeo_FullName
    field(row, country);                                   // 53 ActionGeo_CountryCode
    field(row, country);                                   // 54 ActionGeo_ADM1Code
    field(row, "");                                        // 55 ActionGeo_ADM2Code
    field(row, "0");                                       // 56 ActionGeo_Lat
    field(row, "0");                                       // 57 ActionGeo_Long
    field(row, country);                                   // 58 ActionGeo_FeatureID
    field(row, added);                                     // 59 DATEADDED
    row += "https://example.org/synthetic/" + std::to_string(id);  // 60 SOURCEURL
    return row;
}

inline Payload pack(std::string_view url_base, const Timestamp& stamp, const std::string& tsv) {
    Payload p;
    p.member_name = stamp.stamp() + ".export.CSV";
    p.archive = ingest::write_single_member_zip(p.member_name, tsv, stamp);
    p.ref.size_bytes = p.archive.size();
    p.ref.checksum = md5_hex(p.archive);
    p.ref.url = std::string(url_base) + "/" + p.member_name + ".zip";
    p.ref.timestamp = stamp;
    return p;
}

} // namespace detail

/// Replaces a payload's member text, refreshing size and checksum.
inline void repack(Payload& p, const std::string& tsv, std::string_view url_base = kDefaultUrlBase) {
    p = detail::pack(url_base, p.ref.timestamp, tsv);
}

inline std::string master_index_text(const std::vector<Payload>& payloads) {
    std::string out;
    for (const auto& p : payloads) {
        out += ingest::format_master_line(p.ref);
        out.push_back('\n');
        // The live index interleaves the other tables; ingest must skip them.
        const std::string stem = p.ref.url.substr(0, p.ref.url.size() - ingest::kExportSuffix.size());
        out += "0 d41d8cd98f00b204e9800998ecf8427e " + stem + ".mentions.CSV.zip\n";
    }
    return out;
}

/// Generates one payload per calendar day covering every spec. Specs are drawn
/// in parallel, each from its own seeded stream; event ids are assigned in
/// (day, spec order) sequence so the output is byte-stable.
inline Corpus generate_corpus(const std::vector<SynthSpec>& specs, const features::FeatureConfig& cfg = {},
                              std::string_view url_base = kDefaultUrlBase, std::size_t jobs = 1) {
    cfg.validate();
    std::set<std::string> seen;
    for (const auto& s : specs) {
        s.validate();
        if (!seen.insert(s.country).second) throw InvalidSpec("duplicate country " + s.country + " in corpus");
    }

    std::vector<detail::SpecDraws> draws(specs.size());
    parallel_for(specs.size(), jobs, [&](std::size_t i) { draws[i] = detail::draw(specs[i], cfg); });

    Corpus corpus;
    std::map<std::int32_t, std::vector<std::size_t>> days;  // serial day -> specs active
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        for (int d = 0; d < s.n_days; ++d) days[(s.start_date + d).serial()].push_back(i);

        CountryTruth t;
        t.country = s.country;
        t.start = s.start_date;
        t.counts = draws[i].counts;
        if (t.counts.size() >= static_cast<std::size_t>(cfg.window + cfg.interval))
            t.labels = oracle_labels(t.counts, cfg, cfg.delta);
        corpus.truth.push_back(std::move(t));
    }

    std::uint64_t next_id = kFirstEventId;
    for (const auto& [serial, active] : days) {
        const Date day = Date::from_serial(serial);
        const Timestamp stamp{day, 0};
        const std::string added = stamp.stamp();
        std::string tsv;
        for (std::size_t i : active) {
            const auto& s = specs[i];
            const auto offset = static_cast<std::size_t>(day - s.start_date);
            for (const auto& e : draws[i].days[offset]) {
                tsv += detail::render(e, next_id++, s.country, day, added);
                tsv.push_back('\n');
            }
        }
        corpus.payloads.push_back(detail::pack(url_base, stamp, tsv));
    }
    corpus.master_index = master_index_text(corpus.payloads);
    return corpus;
}

inline Corpus generate(const SynthSpec& spec, const features::FeatureConfig& cfg = {},
                       std::string_view url_base = kDefaultUrlBase) {
    return generate_corpus({spec}, cfg, url_base);
}

/// Writes masterfilelist.txt, every payload, and truth_<country>.csv.
inline void write_corpus(const Corpus& corpus, const fs::path& dir) {
    std::vector<std::pair<fs::path, std::string>> files;
    files.emplace_back(dir / "masterfilelist.txt", corpus.master_index);
    for (const auto& p : corpus.payloads) files.emplace_back(dir / std::string(p.ref.file_name()), p.archive);
    for (const auto& t : corpus.truth)
        files.emplace_back(dir / ("truth_" + t.country + ".csv"), ground_truth_csv(t.labels));
    write_files_atomic(files);
}

/// A spec with randomly placed spikes between `first` and `last`, used for the
/// classifier benchmarks. Spikes ramp up over a few days so lagged counts
/// carry signal about the interval that follows.
inline SynthSpec benchmark_spec(const std::string& country, Date first, Date last, double base_rate,
                                std::uint64_t seed, int min_spike_start = 97) {
    SynthSpec spec;
    spec.country = country;
    spec.start_date = first;
    spec.n_days = (last - first) + 1;
    spec.base_rate = base_rate;
    spec.seed = seed;
    spec.min_spike_start = min_spike_start;

    std::mt19937_64 rng(seed ^ 0x5DEECE66DULL);
    std::uniform_int_distribution<int> gap(25, 70);
    std::uniform_int_distribution<int> length(4, 12);
    std::uniform_int_distribution<int> ramp(2, 5);
    const std::array<double, 3> multipliers{3.0, 5.0, 10.0};
    std::uniform_int_distribution<std::size_t> pick(0, multipliers.size() - 1);

    int day = min_spike_start;
    while (true) {
        Spike s;
        s.ramp_days = ramp(rng);
        s.start_day = day + gap(rng) + s.ramp_days;
        s.length_days = length(rng);
        s.multiplier = multipliers[pick(rng)];
        if (s.end_day() > spec.n_days) break;
        spec.spikes.push_back(s);
        day = s.end_day();
    }
    return spec;
}

} // namespace unrest::synth
