#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "unrest/core/digest.hpp"
#include "unrest/core/files.hpp"
#include "unrest/core/parallel.hpp"
#include "unrest/evaluation/compare.hpp"
#include "unrest/evaluation/lookahead.hpp"
#include "unrest/evaluation/report.hpp"
#include "unrest/features/feature_csv.hpp"
#include "unrest/features/intervals.hpp"
#include "unrest/ingest/http_source.hpp"
#include "unrest/ingest/importer.hpp"
#include "unrest/ingest/source.hpp"
#include "unrest/labeling/labeling.hpp"
#include "unrest/models/forest.hpp"
#include "unrest/pipeline/config.hpp"
#include "unrest/synth/generator.hpp"
#include "unrest/version.hpp"

namespace unrest::pipeline {

enum class Stage { synth, import, features, label, train, evaluate, compare, report, all };

inline constexpr std::array<Stage, 8> kStageOrder{Stage::synth,    Stage::import,  Stage::features, Stage::label,
                                                  Stage::train,    Stage::evaluate, Stage::compare, Stage::report};

inline std::string_view to_string(Stage s) {
    switch (s) {
    case Stage::synth: return "synth";
    case Stage::import: return "import";
    case Stage::features: return "features";
    case Stage::label: return "label";
    case Stage::train: return "train";
    case Stage::evaluate: return "evaluate";
    case Stage::compare: return "compare";
    case Stage::report: return "report";
    case Stage::all: return "all";
    }
    return "unknown";
}

inline std::optional<Stage> parse_stage(std::string_view s) {
    for (auto st : kStageOrder)
        if (to_string(st) == s) return st;
    if (s == "all") return Stage::all;
    return std::nullopt;
}

enum class LogLevel { info, warn, error };

/// One structured log record: stage, optional country, message and counters.
struct LogEvent {
    LogLevel level = LogLevel::info;
    std::string stage;
    std::string country;
    std::string message;
    std::vector<std::pair<std::string, std::string>> fields;
};

/// Must be safe to call from several threads.
using LogSink = std::function<void(const LogEvent&)>;

struct StageResult {
    Stage stage = Stage::all;
    std::vector<fs::path> outputs;  // relative to store_root
    std::size_t warnings = 0;
};

inline constexpr std::string_view kManifestName = "manifest.json-lines";

namespace layout {
inline fs::path raw_dir(const std::string& c) { return fs::path("raw") / c; }
inline fs::path features(const std::string& c) { return fs::path("features") / (c + ".csv"); }
inline fs::path labeled(const std::string& c) { return fs::path("labeled") / (c + ".csv"); }
inline fs::path model(const std::string& c, models::ModelKind k) {
    return fs::path("models") / c / (std::string(models::to_string(k)) + ".model");
}
inline fs::path comparison(const std::string& c) { return fs::path("reports") / (c + ".csv"); }
inline fs::path figure(const std::string& c) { return fs::path("reports") / ("accuracy_" + c + ".svg"); }
inline fs::path evaluation(const std::string& c) { return fs::path("reports") / ("evaluation_" + c + ".json"); }
} // namespace layout

/// Runs pipeline stages against one store root. Every stage stages all of
/// its output files and commits them together, then appends a manifest line.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig cfg, LogSink log = {}) : cfg_(std::move(cfg)), log_(std::move(log)) {
        cfg_.validate();
    }

    const PipelineConfig& config() const noexcept { return cfg_; }

    /// Skip appending manifest lines (used when replaying).
    void set_record_manifest(bool on) { record_manifest_ = on; }
    /// Import from an empty state instead of the stored high-water mark.
    void set_fresh_import(bool on) { fresh_import_ = on; }

    std::vector<StageResult> run(Stage stage) {
        std::vector<StageResult> out;
        if (stage != Stage::all) {
            out.push_back(run_one(stage));
            return out;
        }
        for (auto s : kStageOrder) {
            if (s == Stage::synth && !cfg_.source.empty()) continue;
            out.push_back(run_one(s));
        }
        return out;
    }

    StageResult run_one(Stage stage) {
        current_ = stage;
        pending_.clear();
        inputs_.clear();
        warnings_ = 0;
        switch (stage) {
        case Stage::synth: stage_synth(); break;
        case Stage::import: stage_import(); break;
        case Stage::features: stage_features(); break;
        case Stage::label: stage_label(); break;
        case Stage::train: stage_train(); break;
        case Stage::evaluate: stage_evaluate(); break;
        case Stage::compare: stage_compare(); break;
        case Stage::report: stage_report(); break;
        case Stage::all: throw InvalidValue("run_one expects a single stage");
        }
        StageResult result;
        result.stage = stage;
        result.warnings = warnings_;
        std::vector<std::pair<fs::path, std::string>> files;
        std::map<std::string, std::string> outputs;
        for (auto& [rel, bytes] : pending_) {
            outputs[rel.generic_string()] = sha256_hex(bytes);
            result.outputs.push_back(rel);
            files.emplace_back(cfg_.store_root / rel, std::move(bytes));
        }
        write_files_atomic(files);
        for (const auto& p : extra_outputs_) {
            outputs[p.generic_string()] = sha256_hex(read_file(cfg_.store_root / p));
            result.outputs.push_back(p);
        }
        extra_outputs_.clear();
        if (record_manifest_) append_manifest(stage, outputs);
        emit(LogLevel::info, "", "stage complete", {{"outputs", std::to_string(result.outputs.size())},
                                                      {"warnings", std::to_string(warnings_)}});
        return result;
    }

private:
    // ---- helpers -------------------------------------------------------

    void emit(LogLevel level, const std::string& country, std::string message,
              std::vector<std::pair<std::string, std::string>> fields = {}) {
        if (level == LogLevel::warn) {
            std::lock_guard lock(mu_);
            ++warnings_;
        }
        if (!log_) return;
        log_({level, std::string(to_string(current_)), country, std::move(message), std::move(fields)});
    }

    void stage_output(const fs::path& rel, std::string bytes) {
        std::lock_guard lock(mu_);
        pending_.emplace_back(rel, std::move(bytes));
    }

    std::string read_input(const fs::path& rel, const std::string& produced_by) {
        const auto path = cfg_.store_root / rel;
        if (!fs::exists(path)) throw MissingPrerequisite(rel.generic_string(), produced_by);
        auto text = read_file(path);
        std::lock_guard lock(mu_);
        inputs_[rel.generic_string()] = sha256_hex(text);
        return text;
    }

    void require(const fs::path& rel, const std::string& produced_by) const {
        if (!fs::exists(cfg_.store_root / rel)) throw MissingPrerequisite(rel.generic_string(), produced_by);
    }

    /// Per-country work, in parallel when several countries are configured.
    /// The first failure is rethrown after all workers stop.
    void for_each_country(const std::function<void(const std::string&, std::size_t)>& fn) {
        const auto n = cfg_.countries.size();
        const std::size_t outer = std::min(cfg_.jobs, n);
        const std::size_t inner = std::max<std::size_t>(1, cfg_.jobs / std::max<std::size_t>(1, outer));
        parallel_for(n, outer, [&](std::size_t i) { fn(cfg_.countries[i], inner); });
    }

    labeling::SplitResult load_split(const std::string& c) {
        auto ds = labeling::read_labeled_csv(read_input(layout::labeled(c), "label"), c);
        auto split = labeling::split_by_year(ds, cfg_.split);
        for (const auto& w : split.warnings) emit(LogLevel::warn, c, w);
        emit(LogLevel::info, c, "split", {{"train", std::to_string(split.train.size())},
                                           {"test", std::to_string(split.test.size())},
                                           {"discarded", std::to_string(split.discarded)},
                                           {"out_of_range", std::to_string(split.out_of_range)}});
        return split;
    }

    features::DailySeries load_series(const std::string& c) {
        ingest::PartitionStore store(cfg_.store_root);
        if (!store.has_country(c)) throw MissingPrerequisite(layout::raw_dir(c).generic_string(), "import");
        auto rows = store.load_country(c);
        return features::daily_counts(rows, cfg_.features, c);
    }

    void append_manifest(Stage stage, const std::map<std::string, std::string>& outputs) {
        nlohmann::ordered_json line;
        line["stage"] = std::string(to_string(stage));
        line["version"] = std::string(kVersion);
        line["seed"] = cfg_.seed;
        line["config"] = config_text(cfg_);
        line["inputs"] = inputs_;
        line["outputs"] = outputs;
        const auto path = cfg_.store_root / kManifestName;
        std::string text = fs::exists(path) ? read_file(path) : std::string{};
        text += line.dump();
        text.push_back('\n');
        write_file_atomic(path, text);
    }

    // ---- stages --------------------------------------------------------

    void stage_synth() {
        if (cfg_.source_is_url()) throw InvalidValue("synth writes a local corpus; source is a URL");
        std::vector<synth::SynthSpec> specs;
        for (std::size_t i = 0; i < cfg_.countries.size(); ++i) {
            auto spec = synth::benchmark_spec(cfg_.countries[i], cfg_.synth.start, cfg_.synth.end,
                                              cfg_.synth.base_rate, models::derive_seed(cfg_.seed, i),
                                              cfg_.features.window + cfg_.features.max_lag);
            spec.background_rate = cfg_.synth.background_rate;
            specs.push_back(std::move(spec));
        }
        auto corpus = synth::generate_corpus(specs, cfg_.features, synth::kDefaultUrlBase, cfg_.jobs);
        const auto dir = cfg_.source_dir();
        synth::write_corpus(corpus, dir);
        for (const auto& t : corpus.truth)
            emit(LogLevel::info, t.country, "generated",
                 {{"days", std::to_string(t.counts.size())}, {"intervals", std::to_string(t.labels.size())}});
        emit(LogLevel::info, "", "corpus written", {{"dir", dir.string()},
                                                     {"payloads", std::to_string(corpus.payloads.size())}});
        // Record digests of the index and truth files only; payloads are covered by the index checksums.
        auto rel = [&](const fs::path& p) {
            auto r = p.lexically_relative(cfg_.store_root);
            return r.empty() || *r.begin() == ".." ? p : r;
        };
        extra_outputs_.push_back(rel(dir / ingest::kMasterIndexName));
        for (const auto& t : corpus.truth) extra_outputs_.push_back(rel(dir / ("truth_" + t.country + ".csv")));
    }

    void stage_import() {
        std::unique_ptr<ingest::PayloadSource> source;
        if (cfg_.source_is_url()) {
            source = std::make_unique<ingest::HttpSource>(cfg_.source);
            inputs_["source"] = cfg_.source;
        } else {
            const auto dir = cfg_.source_dir();
            const auto index = dir / ingest::kMasterIndexName;
            if (!fs::exists(index)) {
                if (cfg_.source.empty()) throw MissingPrerequisite(index.string(), "synth");
                throw MissingFile("no " + std::string(ingest::kMasterIndexName) + " in " + dir.string());
            }
            inputs_["source:" + std::string(ingest::kMasterIndexName)] = sha256_hex(read_file(index));
            source = std::make_unique<ingest::LocalDirectorySource>(dir);
        }
        ingest::PartitionStore store(cfg_.store_root);
        auto state = fresh_import_ ? ingest::ImportState{} : ingest::load_import_state(cfg_.store_root);
        ingest::ImportOptions opts;
        opts.countries = {cfg_.countries.begin(), cfg_.countries.end()};
        opts.verify_checksums = cfg_.verify_checksums;
        opts.jobs = cfg_.jobs;
        opts.batch_size = cfg_.batch_size;
        auto report = ingest::run_import(*source, store, state, opts);
        for (const auto& p : report.problems) emit(LogLevel::warn, "", p);
        if (report.stopped_on_fetch_error) emit(LogLevel::warn, "", "stopped at first fetch failure");
        emit(LogLevel::info, "", "imported",
             {{"index_entries", std::to_string(report.index_entries)},
              {"index_malformed", std::to_string(report.index_malformed)},
              {"planned", std::to_string(report.planned)},
              {"imported", std::to_string(report.imported)},
              {"skipped", std::to_string(report.skipped)},
              {"rows_appended", std::to_string(report.partition.total_appended())},
              {"rows_malformed", std::to_string(report.malformed_rows)},
              {"rows_out_of_scope", std::to_string(report.partition.out_of_scope)},
              {"duplicates", std::to_string(report.partition.duplicates)}});
        extra_outputs_.push_back(std::string(ingest::ImportState::kFileName));
        for (const auto& c : cfg_.countries) {
            const auto dir = cfg_.store_root / layout::raw_dir(c);
            if (!fs::exists(dir)) {
                emit(LogLevel::warn, c, "no rows stored for country");
                continue;
            }
            std::vector<fs::path> shards;
            for (const auto& e : fs::directory_iterator(dir)) shards.push_back(e.path().lexically_relative(cfg_.store_root));
            std::sort(shards.begin(), shards.end());
            extra_outputs_.insert(extra_outputs_.end(), shards.begin(), shards.end());
        }
    }

    void stage_features() {
        for (const auto& c : cfg_.countries)
            if (!ingest::PartitionStore(cfg_.store_root).has_country(c))
                throw MissingPrerequisite("partition store " + layout::raw_dir(c).generic_string(), "import");
        for_each_country([&](const std::string& c, std::size_t) {
            ingest::PartitionStore store(cfg_.store_root);
            auto rows = store.load_country(c);
            {
                std::lock_guard lock(mu_);
                for (const auto& e : fs::directory_iterator(cfg_.store_root / layout::raw_dir(c))) {
                    auto rel = e.path().lexically_relative(cfg_.store_root).generic_string();
                    inputs_[rel] = sha256_hex(read_file(e.path()));
                }
            }
            auto series = features::daily_counts(rows, cfg_.features, c);
            auto build = features::build_features(series, cfg_.features);
            if (build.diagnostic) emit(LogLevel::warn, c, *build.diagnostic);
            emit(LogLevel::info, c, "features", {{"days", std::to_string(series.size())},
                                                 {"intervals", std::to_string(build.rows.size())}});
            stage_output(layout::features(c),
                         features::write_feature_csv(build.rows, static_cast<std::size_t>(cfg_.features.max_lag)));
        });
    }

    void stage_label() {
        for (const auto& c : cfg_.countries) require(layout::features(c), "features");
        for_each_country([&](const std::string& c, std::size_t) {
            auto rows = features::read_feature_csv(read_input(layout::features(c), "features"));
            auto ds = labeling::assemble_dataset(rows, cfg_.features.delta, c, cfg_.features.label_stat);
            std::size_t positives = 0;
            for (const auto& r : ds.rows) positives += static_cast<std::size_t>(r.label);
            emit(LogLevel::info, c, "labeled", {{"rows", std::to_string(ds.size())},
                                                {"positives", std::to_string(positives)}});
            stage_output(layout::labeled(c), labeling::write_labeled_csv(ds));
        });
    }

    void stage_train() {
        for (const auto& c : cfg_.countries) require(layout::labeled(c), "label");
        for_each_country([&](const std::string& c, std::size_t jobs) {
            auto split = load_split(c);
            if (split.train.empty()) throw EmptyInput("no training rows for " + c);
            const auto x = models::design_matrix(split.train, cfg_.feature_set);
            for (auto kind : cfg_.classifiers) {
                auto model = models::fit_model(kind, x, cfg_.hyper, cfg_.seed, {.preprocess = true, .jobs = jobs});
                for (const auto& w : model.warnings) emit(LogLevel::warn, c, w, {{"kind", std::string(to_string(kind))}});
                stage_output(layout::model(c, kind), models::save_model(model));
            }
            emit(LogLevel::info, c, "trained", {{"models", std::to_string(cfg_.classifiers.size())},
                                                {"rows", std::to_string(x.n)}});
        });
    }

    void stage_evaluate() {
        for (const auto& c : cfg_.countries) {
            require(layout::labeled(c), "label");
            for (auto kind : cfg_.classifiers) require(layout::model(c, kind), "train");
        }
        for_each_country([&](const std::string& c, std::size_t) {
            auto split = load_split(c);
            if (split.test.empty()) throw EmptyInput("no test rows for " + c);
            auto test = split.test;
            const bool ahead = cfg_.horizon > 0;
            if (ahead) test = evaluation::build_lookahead_features(load_series(c), test, cfg_.features, cfg_.horizon);
            const auto x = models::design_matrix(test, cfg_.feature_set, split.train.lag_count());

            nlohmann::ordered_json doc;
            doc["country"] = c;
            doc["mode"] = ahead ? "lookahead" : "standard";
            doc["horizon"] = cfg_.horizon;
            doc["seed"] = cfg_.seed;
            doc["n_train"] = split.train.size();
            doc["n_test"] = split.test.size();
            doc["split"] = {{"train_years", detail::years_text(cfg_.split.train_years)},
                            {"test_years", detail::years_text(cfg_.split.test_years)},
                            {"discard_years", detail::years_text(cfg_.split.discard_years)}};
            auto entries = nlohmann::ordered_json::array();
            for (auto kind : cfg_.classifiers) {
                auto model = models::load_model(read_input(layout::model(c, kind), "train"));
                auto pred = models::predict(model, x);
                auto s = evaluation::score(pred, x.labels);
                entries.push_back({{"kind", std::string(to_string(kind))},
                                   {"accuracy", s.accuracy},
                                   {"mae", s.mae},
                                   {"precision", s.precision},
                                   {"recall", s.recall},
                                   {"f1", s.f1}});
                emit(LogLevel::info, c, "evaluated",
                     {{"kind", std::string(to_string(kind))}, {"accuracy", fmt::format("{:.4f}", s.accuracy)},
                      {"mae", fmt::format("{:.4f}", s.mae)}});
            }
            doc["classifiers"] = std::move(entries);
            stage_output(layout::evaluation(c), doc.dump(2) + "\n");
        });
    }

    void stage_compare() {
        for (const auto& c : cfg_.countries) require(layout::labeled(c), "label");
        for_each_country([&](const std::string& c, std::size_t jobs) {
            auto split = load_split(c);
            evaluation::CompareOptions opts;
            opts.hyper = cfg_.hyper;
            opts.feature_set = cfg_.feature_set;
            opts.jobs = jobs;
            auto table = evaluation::compare_classifiers(split.train, split.test, cfg_.classifiers, cfg_.seed, opts);
            for (const auto& r : table.rows) {
                for (const auto& w : r.warnings) emit(LogLevel::warn, c, w, {{"kind", std::string(to_string(r.kind))}});
                emit(LogLevel::info, c, "compared",
                     {{"kind", std::string(to_string(r.kind))}, {"accuracy", fmt::format("{:.4f}", r.accuracy)},
                      {"mae", fmt::format("{:.4f}", r.mae)}});
            }
            stage_output(layout::comparison(c), evaluation::comparison_csv(table));
        });
    }

    void stage_report() {
        for (const auto& c : cfg_.countries) require(layout::comparison(c), "compare");
        for_each_country([&](const std::string& c, std::size_t) {
            auto table = evaluation::read_comparison_csv(read_input(layout::comparison(c), "compare"));
            auto rendered = evaluation::render_report(table, c);
            stage_output(layout::comparison(c), std::move(rendered.csv));
            stage_output(layout::figure(c), std::move(rendered.svg));
        });
    }

    PipelineConfig cfg_;
    LogSink log_;
    bool record_manifest_ = true;
    bool fresh_import_ = false;
    Stage current_ = Stage::all;
    std::mutex mu_;
    std::vector<std::pair<fs::path, std::string>> pending_;
    std::vector<fs::path> extra_outputs_;  // written outside pending_, digested after the stage
    std::map<std::string, std::string> inputs_;
    std::size_t warnings_ = 0;
};

/// One parsed manifest line.
struct ManifestEntry {
    Stage stage = Stage::all;
    std::string version;
    std::uint64_t seed = 0;
    std::string config;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
};

inline std::vector<ManifestEntry> read_manifest(const fs::path& store_root) {
    const auto path = store_root / kManifestName;
    if (!fs::exists(path)) throw MissingFile("no manifest at " + path.string());
    std::vector<ManifestEntry> out;
    std::size_t lineno = 0;
    for_each_line(read_file(path), [&](std::string_view line) {
        ++lineno;
        if (trim(line).empty()) return;
        try {
            auto j = nlohmann::json::parse(line);
            ManifestEntry e;
            auto st = parse_stage(j.at("stage").get<std::string>());
            if (!st) throw FormatError("unknown stage");
            e.stage = *st;
            e.version = j.at("version").get<std::string>();
            e.seed = j.at("seed").get<std::uint64_t>();
            e.config = j.at("config").get<std::string>();
            e.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
            e.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
            out.push_back(std::move(e));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    });
    return out;
}

struct ReplayResult {
    std::vector<Stage> stages;            // stages that had to be re-run
    std::vector<std::string> mismatches;  // outputs whose digest still differs afterwards
    bool ok() const { return mismatches.empty(); }
};

namespace detail {
inline std::vector<std::string> stale_outputs(const fs::path& store_root, const ManifestEntry& e) {
    std::vector<std::string> out;
    for (const auto& [rel, digest] : e.outputs) {
        fs::path path = fs::path(rel).is_absolute() ? fs::path(rel) : store_root / rel;
        if (!fs::exists(path) || sha256_hex(read_file(path)) != digest) out.push_back(rel);
    }
    return out;
}
} // namespace detail

/// Re-derives missing or altered outputs: for the latest recorded invocation
/// of each stage, in dependency order, re-runs the stage with the
/// configuration echoed in the manifest if any of its outputs is stale, then
/// checks every recorded digest again.
inline ReplayResult replay(const fs::path& store_root, LogSink log = {}) {
    auto entries = read_manifest(store_root);
    std::map<Stage, ManifestEntry> latest;
    for (auto& e : entries) latest[e.stage] = std::move(e);
    ReplayResult result;
    for (auto stage : kStageOrder) {
        auto it = latest.find(stage);
        if (it == latest.end() || detail::stale_outputs(store_root, it->second).empty()) continue;
        auto cfg = parse_config(it->second.config, "manifest");
        cfg.store_root = store_root;
        Pipeline p(cfg, log);
        p.set_record_manifest(false);
        p.set_fresh_import(true);
        p.run_one(stage);
        result.stages.push_back(stage);
    }
    for (auto stage : kStageOrder) {
        auto it = latest.find(stage);
        if (it == latest.end()) continue;
        for (auto& rel : detail::stale_outputs(store_root, it->second)) result.mismatches.push_back(std::move(rel));
    }
    return result;
}

} // namespace unrest::pipeline
