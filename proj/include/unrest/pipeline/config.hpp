#pragma once

#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "unrest/core/date.hpp"
#include "unrest/core/error.hpp"
#include "unrest/core/files.hpp"
#include "unrest/core/text.hpp"
#include "unrest/features/config.hpp"
#include "unrest/labeling/labeling.hpp"
#include "unrest/models/design.hpp"
#include "unrest/models/model.hpp"

namespace unrest::pipeline {

/// Parameters of the `synth` stage. One spec is generated per configured
/// country, each seeded from the pipeline seed.
struct SynthSettings {
    Date start{2014, 10, 1};
    Date end{2019, 12, 31};
    double base_rate = 5.0;
    double background_rate = 1.0;
};

struct PipelineConfig {
    std::vector<std::string> countries{"PK"};
    fs::path store_root = "unrest-store";
    std::string source;  // local directory or http:// URL; empty = <store_root>/synth
    std::uint64_t seed = 42;
    std::size_t jobs = 1;
    features::FeatureConfig features;
    labeling::SplitSpec split;
    std::vector<models::ModelKind> classifiers{models::kAllKinds.begin(), models::kAllKinds.end()};
    models::FeatureSet feature_set = models::FeatureSet::history;
    models::Hyperparams hyper;
    bool verify_checksums = true;
    std::size_t batch_size = 64;
    int horizon = 0;
    SynthSettings synth;

    bool source_is_url() const { return source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0; }

    fs::path source_dir() const { return source.empty() ? store_root / "synth" : fs::path(source); }

    void validate() const {
        if (countries.empty()) throw InvalidValue("countries must not be empty");
        for (const auto& c : countries)
            if (c.size() != 2) throw InvalidValue("country '" + c + "' is not a 2-letter FIPS code");
        if (jobs == 0) throw InvalidValue("jobs must be >= 1");
        if (classifiers.empty()) throw InvalidValue("classifiers must not be empty");
        if (horizon < 0) throw InvalidValue("horizon must be >= 0");
        if (synth.end < synth.start) throw InvalidValue("synth.end precedes synth.start");
        features.validate();
        split.validate();
    }
};

namespace detail {

inline std::string years_text(const std::set<int>& years) {
    std::string out;
    auto it = years.begin();
    while (it != years.end()) {
        int lo = *it, hi = lo;
        auto next = std::next(it);
        while (next != years.end() && *next == hi + 1) hi = *next++;
        if (!out.empty()) out += ",";
        out += lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
        it = next;
    }
    return out;
}

inline int int_value(const std::string& key, std::string_view v, int lo, int hi) {
    long long n = 0;
    if (!parse_int(trim(v), n) || n < lo || n > hi)
        throw InvalidValue(key + ": expected an integer in " + std::to_string(lo) + ".." + std::to_string(hi) +
                           ", got '" + std::string(v) + "'");
    return static_cast<int>(n);
}

inline double real_value(const std::string& key, std::string_view v) {
    double d = 0;
    if (!parse_double(trim(v), d)) throw InvalidValue(key + ": expected a number, got '" + std::string(v) + "'");
    return d;
}

inline bool bool_value(const std::string& key, std::string_view v) {
    auto t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw InvalidValue(key + ": expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<std::string> list_value(std::string_view v) {
    std::vector<std::string> out;
    for (auto part : split(v, ',')) {
        auto t = trim(part);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

inline std::set<int> years_value(const std::string& key, std::string_view v) {
    std::set<int> out;
    for (const auto& item : list_value(v)) {
        auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.insert(int_value(key, item, 1900, 2999));
            continue;
        }
        int lo = int_value(key, item.substr(0, dash), 1900, 2999);
        int hi = int_value(key, item.substr(dash + 1), 1900, 2999);
        if (hi < lo) throw InvalidValue(key + ": empty year range '" + item + "'");
        for (int y = lo; y <= hi; ++y) out.insert(y);
    }
    return out;
}

inline Date date_value(const std::string& key, std::string_view v) {
    auto d = Date::parse_iso(trim(v));
    if (!d) throw InvalidValue(key + ": expected YYYY-MM-DD, got '" + std::string(v) + "'");
    return *d;
}

struct Key {
    std::string name;
    std::function<void(PipelineConfig&, std::string_view)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

inline const std::vector<Key>& keys() {
    using C = PipelineConfig;
    using SV = std::string_view;
    static const std::vector<Key> table = {
        {"countries",
         [](C& c, SV v) {
             c.countries = list_value(v);
             for (auto& s : c.countries)
                 for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
         },
         [](const C& c) {
             std::string out;
             for (const auto& s : c.countries) out += (out.empty() ? "" : ",") + s;
             return out;
         }},
        {"store_root", [](C& c, SV v) { c.store_root = std::string(trim(v)); },
         [](const C& c) { return c.store_root.string(); }},
        {"source", [](C& c, SV v) { c.source = std::string(trim(v)); }, [](const C& c) { return c.source; }},
        {"seed",
         [](C& c, SV v) {
             std::uint64_t n = 0;
             if (!parse_int(trim(v), n))
                 throw InvalidValue("seed: expected an unsigned 64-bit integer, got '" + std::string(v) + "'");
             c.seed = n;
         },
         [](const C& c) { return std::to_string(c.seed); }},
        {"jobs", [](C& c, SV v) { c.jobs = static_cast<std::size_t>(int_value("jobs", v, 1, 1024)); },
         [](const C& c) { return std::to_string(c.jobs); }},
        {"window", [](C& c, SV v) { c.features.window = int_value("window", v, 1, 10000); },
         [](const C& c) { return std::to_string(c.features.window); }},
        {"interval", [](C& c, SV v) { c.features.interval = int_value("interval", v, 3, 7); },
         [](const C& c) { return std::to_string(c.features.interval); }},
        {"max_lag", [](C& c, SV v) { c.features.max_lag = int_value("max_lag", v, 0, 365); },
         [](const C& c) { return std::to_string(c.features.max_lag); }},
        {"z",
         [](C& c, SV v) {
             c.features.z = real_value("z", v);
             if (!(c.features.z > 0)) throw InvalidValue("z must be > 0");
         },
         [](const C& c) { return format_double(c.features.z); }},
        {"root_codes",
         [](C& c, SV v) {
             c.features.root_codes.clear();
             for (const auto& s : list_value(v)) c.features.root_codes.insert(int_value("root_codes", s, 1, 20));
             if (c.features.root_codes.empty()) throw InvalidValue("root_codes must not be empty");
         },
         [](const C& c) {
             std::string out;
             for (int r : c.features.root_codes) out += (out.empty() ? "" : ",") + std::to_string(r);
             return out;
         }},
        {"delta", [](C& c, SV v) { c.features.delta = real_value("delta", v); },
         [](const C& c) { return format_double(c.features.delta); }},
        {"label_stat",
         [](C& c, SV v) {
             auto t = trim(v);
             if (t == "margin") c.features.label_stat = features::LabelStat::margin;
             else if (t == "mct_bar_comp") c.features.label_stat = features::LabelStat::literal_mct_comp;
             else throw InvalidValue("label_stat: expected margin or mct_bar_comp, got '" + std::string(t) + "'");
         },
         [](const C& c) {
             return std::string(c.features.label_stat == features::LabelStat::margin ? "margin" : "mct_bar_comp");
         }},
        {"split.train_years", [](C& c, SV v) { c.split.train_years = years_value("split.train_years", v); },
         [](const C& c) { return years_text(c.split.train_years); }},
        {"split.test_years", [](C& c, SV v) { c.split.test_years = years_value("split.test_years", v); },
         [](const C& c) { return years_text(c.split.test_years); }},
        {"split.discard_years", [](C& c, SV v) { c.split.discard_years = years_value("split.discard_years", v); },
         [](const C& c) { return years_text(c.split.discard_years); }},
        {"classifiers",
         [](C& c, SV v) {
             c.classifiers.clear();
             for (const auto& s : list_value(v)) {
                 auto k = models::parse_kind(s);
                 if (!k) throw InvalidValue("classifiers: unknown kind '" + s + "'");
                 if (std::find(c.classifiers.begin(), c.classifiers.end(), *k) == c.classifiers.end())
                     c.classifiers.push_back(*k);
             }
         },
         [](const C& c) {
             std::string out;
             for (auto k : c.classifiers) out += (out.empty() ? "" : ",") + std::string(models::to_string(k));
             return out;
         }},
        {"feature_set",
         [](C& c, SV v) {
             auto t = trim(v);
             if (t == "history") c.feature_set = models::FeatureSet::history;
             else if (t == "full") c.feature_set = models::FeatureSet::full;
             else throw InvalidValue("feature_set: expected history or full, got '" + std::string(t) + "'");
         },
         [](const C& c) { return std::string(c.feature_set == models::FeatureSet::history ? "history" : "full"); }},
        {"forest.trees", [](C& c, SV v) { c.hyper.forest.n_trees = int_value("forest.trees", v, 1, 100000); },
         [](const C& c) { return std::to_string(c.hyper.forest.n_trees); }},
        {"forest.max_depth", [](C& c, SV v) { c.hyper.forest.max_depth = int_value("forest.max_depth", v, 1, 1000); },
         [](const C& c) { return std::to_string(c.hyper.forest.max_depth); }},
        {"forest.min_leaf", [](C& c, SV v) { c.hyper.forest.min_leaf = int_value("forest.min_leaf", v, 1, 100000); },
         [](const C& c) { return std::to_string(c.hyper.forest.min_leaf); }},
        {"forest.features_per_split",
         [](C& c, SV v) { c.hyper.forest.features_per_split = int_value("forest.features_per_split", v, 0, 100000); },
         [](const C& c) { return std::to_string(c.hyper.forest.features_per_split); }},
        {"forest.bootstrap", [](C& c, SV v) { c.hyper.forest.bootstrap = bool_value("forest.bootstrap", v); },
         [](const C& c) { return std::string(c.hyper.forest.bootstrap ? "true" : "false"); }},
        {"tree.max_depth", [](C& c, SV v) { c.hyper.tree.max_depth = int_value("tree.max_depth", v, 1, 1000); },
         [](const C& c) { return std::to_string(c.hyper.tree.max_depth); }},
        {"tree.min_leaf", [](C& c, SV v) { c.hyper.tree.min_leaf = int_value("tree.min_leaf", v, 1, 100000); },
         [](const C& c) { return std::to_string(c.hyper.tree.min_leaf); }},
        {"svm.lambda",
         [](C& c, SV v) {
             c.hyper.svm.lambda = real_value("svm.lambda", v);
             if (!(c.hyper.svm.lambda > 0)) throw InvalidValue("svm.lambda must be > 0");
         },
         [](const C& c) { return format_double(c.hyper.svm.lambda); }},
        {"svm.epochs", [](C& c, SV v) { c.hyper.svm.epochs = int_value("svm.epochs", v, 1, 100000); },
         [](const C& c) { return std::to_string(c.hyper.svm.epochs); }},
        {"knn.k", [](C& c, SV v) { c.hyper.knn_k = int_value("knn.k", v, 1, 100000); },
         [](const C& c) { return std::to_string(c.hyper.knn_k); }},
        {"mlp.hidden", [](C& c, SV v) { c.hyper.mlp.hidden = int_value("mlp.hidden", v, 1, 4096); },
         [](const C& c) { return std::to_string(c.hyper.mlp.hidden); }},
        {"mlp.learning_rate",
         [](C& c, SV v) {
             c.hyper.mlp.learning_rate = real_value("mlp.learning_rate", v);
             if (!(c.hyper.mlp.learning_rate > 0)) throw InvalidValue("mlp.learning_rate must be > 0");
         },
         [](const C& c) { return format_double(c.hyper.mlp.learning_rate); }},
        {"mlp.epochs", [](C& c, SV v) { c.hyper.mlp.epochs = int_value("mlp.epochs", v, 1, 1000000); },
         [](const C& c) { return std::to_string(c.hyper.mlp.epochs); }},
        {"ingest.verify_checksums",
         [](C& c, SV v) { c.verify_checksums = bool_value("ingest.verify_checksums", v); },
         [](const C& c) { return std::string(c.verify_checksums ? "true" : "false"); }},
        {"ingest.batch_size",
         [](C& c, SV v) { c.batch_size = static_cast<std::size_t>(int_value("ingest.batch_size", v, 1, 1 << 20)); },
         [](const C& c) { return std::to_string(c.batch_size); }},
        {"evaluate.horizon", [](C& c, SV v) { c.horizon = int_value("evaluate.horizon", v, 0, 365); },
         [](const C& c) { return std::to_string(c.horizon); }},
        {"synth.start", [](C& c, SV v) { c.synth.start = date_value("synth.start", v); },
         [](const C& c) { return c.synth.start.iso(); }},
        {"synth.end", [](C& c, SV v) { c.synth.end = date_value("synth.end", v); },
         [](const C& c) { return c.synth.end.iso(); }},
        {"synth.base_rate",
         [](C& c, SV v) {
             c.synth.base_rate = real_value("synth.base_rate", v);
             if (c.synth.base_rate < 0) throw InvalidValue("synth.base_rate must be >= 0");
         },
         [](const C& c) { return format_double(c.synth.base_rate); }},
        {"synth.background_rate",
         [](C& c, SV v) {
             c.synth.background_rate = real_value("synth.background_rate", v);
             if (c.synth.background_rate < 0) throw InvalidValue("synth.background_rate must be >= 0");
         },
         [](const C& c) { return format_double(c.synth.background_rate); }},
    };
    return table;
}

inline const Key* find_key(std::string_view name) {
    for (const auto& k : keys())
        if (k.name == name) return &k;
    return nullptr;
}

} // namespace detail

/// Environment variable that overrides `key`, e.g. split.test_years ->
/// UNREST_SPLIT_TEST_YEARS.
inline std::string env_name(std::string_view key) {
    std::string out = "UNREST_";
    for (char c : key) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return out;
}

/// Applies one setting. Unknown keys are rejected.
inline void set_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
    const auto* k = detail::find_key(key);
    if (!k) throw UnknownKey("unknown config key '" + std::string(key) + "'");
    k->set(cfg, value);
}

/// Parses `key = value` lines; `#` starts a comment. Keys not mentioned keep
/// their defaults.
inline PipelineConfig parse_config(std::string_view text, const std::string& origin = "<config>") {
    PipelineConfig cfg;
    std::size_t lineno = 0;
    for_each_line(text, [&](std::string_view raw) {
        ++lineno;
        auto line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) return;
        auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string_view::npos) throw InvalidValue(where + "expected key = value");
        auto key = trim(line.substr(0, eq));
        try {
            set_value(cfg, key, line.substr(eq + 1));
        } catch (const UnknownKey& e) {
            throw UnknownKey(where + e.what());
        } catch (const InvalidValue& e) {
            throw InvalidValue(where + e.what());
        }
    });
    return cfg;
}

/// Overrides keys from UNREST_* environment variables.
inline void apply_environment(PipelineConfig& cfg) {
    for (const auto& k : detail::keys()) {
        const auto name = env_name(k.name);
        if (const char* v = std::getenv(name.c_str())) {
            try {
                k.set(cfg, v);
            } catch (const InvalidValue& e) {
                throw InvalidValue(name + ": " + e.what());
            }
        }
    }
}

/// Reads a config file, applies environment overrides and validates.
inline PipelineConfig load_config(const fs::path& path) {
    if (!fs::exists(path)) throw MissingFile("config file not found: " + path.string());
    auto cfg = parse_config(read_file(path), path.string());
    apply_environment(cfg);
    cfg.validate();
    return cfg;
}

/// Every key with its effective value, in table order. parse_config of this
/// text reproduces the configuration.
inline std::string config_text(const PipelineConfig& cfg) {
    std::string out;
    for (const auto& k : detail::keys()) out += k.name + " = " + k.get(cfg) + "\n";
    return out;
}

inline std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : detail::keys()) out.push_back(k.name);
    return out;
}

} // namespace unrest::pipeline
