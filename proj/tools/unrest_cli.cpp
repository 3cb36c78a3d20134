// unrest: command-line driver for the event-data pipeline.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "unrest/pipeline/config.hpp"
#include "unrest/pipeline/stages.hpp"

namespace {

using namespace unrest;

struct Options {
    std::string config;
    std::vector<std::string> countries;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::optional<int> horizon;
    std::optional<std::string> source;
    std::optional<std::string> store;
};

std::string quote(const std::string& s) {
    if (s.find_first_of(" \t\"=") == std::string::npos && !s.empty()) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out + "\"";
}

pipeline::LogSink make_sink(std::shared_ptr<spdlog::logger> log) {
    return [log](const pipeline::LogEvent& e) {
        std::string line = "stage=" + e.stage;
        if (!e.country.empty()) line += " country=" + e.country;
        line += " msg=" + quote(e.message);
        for (const auto& [k, v] : e.fields) line += " " + k + "=" + quote(v);
        switch (e.level) {
        case pipeline::LogLevel::info: log->info(line); break;
        case pipeline::LogLevel::warn: log->warn(line); break;
        case pipeline::LogLevel::error: log->error(line); break;
        }
    };
}

pipeline::PipelineConfig resolve(const Options& o) {
    pipeline::PipelineConfig cfg;
    if (!o.config.empty()) {
        cfg = pipeline::load_config(o.config);
    } else {
        pipeline::apply_environment(cfg);
    }
    if (!o.countries.empty()) {
        std::string joined;
        for (const auto& c : o.countries) joined += (joined.empty() ? "" : ",") + c;
        pipeline::set_value(cfg, "countries", joined);
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.jobs) cfg.jobs = *o.jobs;
    if (o.horizon) cfg.horizon = *o.horizon;
    if (o.source) cfg.source = *o.source;
    if (o.store) cfg.store_root = *o.store;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    auto log = spdlog::stderr_color_mt("unrest");
    log->set_pattern("%Y-%m-%dT%H:%M:%S.%e %l %v");
    spdlog::set_default_logger(log);

    CLI::App app{"Event-data unrest pipeline: import, features, labels, models, reports"};
    app.set_version_flag("--version", std::string(unrest::kVersion));
    app.require_subcommand(1);

    Options o;
    app.add_option("--config", o.config, "Config file (key = value lines)");
    app.add_option("--country", o.countries, "FIPS country code; repeat for several");
    app.add_option("--seed", o.seed, "Seed for generation and model fitting");
    app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--horizon", o.horizon, "Look-ahead horizon in days for evaluate")->check(CLI::NonNegativeNumber);
    app.add_option("--source", o.source, "Payload directory or http:// URL");
    app.add_option("--store", o.store, "Store root (overrides store_root)");

    const std::vector<std::pair<std::string, std::string>> stages = {
        {"synth", "Generate a synthetic corpus with known ground truth"},
        {"import", "Fetch new payloads and partition rows per country and year"},
        {"features", "Build interval feature rows from the partition store"},
        {"label", "Label interval rows"},
        {"train", "Fit the configured classifiers on the training years"},
        {"evaluate", "Score trained models on the test years"},
        {"compare", "Fit and score every classifier, write the comparison table"},
        {"report", "Render the comparison CSV and SVG figure"},
        {"all", "Run every stage in dependency order"},
    };
    for (const auto& [name, help] : stages) app.add_subcommand(name, help)->fallthrough();
    auto* replay = app.add_subcommand("replay", "Re-run the stages recorded in the store manifest and verify outputs");
    replay->fallthrough();
    auto* show = app.add_subcommand("config", "Print the effective configuration");
    show->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        auto cfg = resolve(o);
        if (name == "config") {
            std::cout << pipeline::config_text(cfg);
            return 0;
        }
        if (name == "replay") {
            auto result = pipeline::replay(cfg.store_root, make_sink(log));
            for (const auto& m : result.mismatches) log->error("stage=replay msg=\"output differs\" path={}", m);
            log->info("stage=replay stages={} mismatches={}", result.stages.size(), result.mismatches.size());
            return result.ok() ? 0 : 1;
        }
        auto stage = pipeline::parse_stage(name);
        pipeline::Pipeline p(cfg, make_sink(log));
        p.run(*stage);
        return 0;
    } catch (const unrest::MissingPrerequisite& e) {
        log->error("msg={} artifact={} produced_by={}", quote(e.what()), quote(e.artifact()), e.produced_by());
        return 1;
    } catch (const std::exception& e) {
        log->error("msg={}", quote(e.what()));
        return 1;
    }
}
