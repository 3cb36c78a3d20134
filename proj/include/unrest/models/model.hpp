#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unrest/core/error.hpp"
#include "unrest/core/text.hpp"
#include "unrest/models/forest.hpp"
#include "unrest/models/knn.hpp"
#include "unrest/models/linear_svm.hpp"
#include "unrest/models/mlp.hpp"
#include "unrest/models/naive_bayes.hpp"
#include "unrest/models/preprocess.hpp"
#include "unrest/models/tree.hpp"

namespace unrest::models {

enum class ModelKind { forest, gaussian_nb, linear_svm, knn, tree, mlp };

inline constexpr std::array<ModelKind, 6> kAllKinds{ModelKind::forest,     ModelKind::gaussian_nb,
                                                    ModelKind::linear_svm, ModelKind::knn,
                                                    ModelKind::tree,       ModelKind::mlp};

inline std::string_view to_string(ModelKind k) {
    switch (k) {
    case ModelKind::forest: return "forest";
    case ModelKind::gaussian_nb: return "gaussian_nb";
    case ModelKind::linear_svm: return "linear_svm";
    case ModelKind::knn: return "knn";
    case ModelKind::tree: return "tree";
    case ModelKind::mlp: return "mlp";
    }
    return "?";
}

inline std::optional<ModelKind> parse_kind(std::string_view s) {
    for (auto k : kAllKinds)
        if (to_string(k) == s) return k;
    return std::nullopt;
}

/// Settings for every kind; each fit reads only its own block.
struct Hyperparams {
    ForestHyperparams forest;
    TreeHyperparams tree;
    SvmHyperparams svm;
    int knn_k = 5;
    MlpHyperparams mlp;

    bool operator==(const Hyperparams&) const = default;
};

/// Predicts one label regardless of input.
struct ConstantModel {
    int label = 0;
    bool operator==(const ConstantModel&) const = default;
};

using ModelParams = std::variant<ConstantModel, DecisionTree, RandomForest, GaussianNB, LinearSvm, Knn, Mlp>;

struct TrainedModel {
    ModelKind kind = ModelKind::forest;
    Hyperparams hyper;
    std::uint64_t seed = 0;
    std::size_t dims = 0;
    Preprocessor prep;  // identity when the model was fitted on prepared data
    ModelParams params;
    std::vector<std::string> warnings;  // not persisted

    bool constant() const { return std::holds_alternative<ConstantModel>(params); }
};

struct FitOptions {
    bool preprocess = true;  // median-impute and standardize from the training rows
    std::size_t jobs = 1;
};

/// Fits one classifier. SVM and MLP training on a single class yields a
/// constant predictor with a SingleClassTraining warning.
inline TrainedModel fit_model(ModelKind kind, const FeatureMatrix& raw, const Hyperparams& hp, std::uint64_t seed,
                              const FitOptions& opts = {}) {
    if (raw.n == 0) throw EmptyInput("cannot fit on zero rows");
    if (raw.labels.size() != raw.n) throw LengthMismatch("labels vs rows");
    TrainedModel m;
    m.kind = kind;
    m.hyper = hp;
    m.seed = seed;
    m.dims = raw.d;
    if (opts.preprocess) m.prep = Preprocessor::fit(raw);
    const FeatureMatrix data = m.prep.transform(raw);
    if (!data.all_finite()) throw InvalidValue("non-finite feature values after preprocessing");

    if (data.single_class() && (kind == ModelKind::linear_svm || kind == ModelKind::mlp)) {
        m.params = ConstantModel{data.labels[0]};
        m.warnings.push_back("SingleClassTraining: " + std::string(to_string(kind)) +
                             " trained on one class; predicting constant " + std::to_string(data.labels[0]));
        return m;
    }
    switch (kind) {
    case ModelKind::forest: m.params = grow_forest(data, hp.forest, seed, opts.jobs); break;
    case ModelKind::tree: m.params = grow_tree(data, hp.tree, seed); break;
    case ModelKind::gaussian_nb: m.params = fit_gaussian_nb(data); break;
    case ModelKind::linear_svm: m.params = fit_linear_svm(data, hp.svm, seed); break;
    case ModelKind::knn: m.params = fit_knn(data, hp.knn_k); break;
    case ModelKind::mlp: m.params = fit_mlp(data, hp.mlp, seed); break;
    }
    return m;
}

inline TrainedModel fit_tree(const FeatureMatrix& data, const TreeHyperparams& hp, std::uint64_t seed) {
    Hyperparams all;
    all.tree = hp;
    return fit_model(ModelKind::tree, data, all, seed, {.preprocess = false});
}

inline TrainedModel fit_random_forest(const FeatureMatrix& data, const ForestHyperparams& hp, std::uint64_t seed,
                                      std::size_t jobs = 1) {
    Hyperparams all;
    all.forest = hp;
    return fit_model(ModelKind::forest, data, all, seed, {.preprocess = false, .jobs = jobs});
}

/// Gaussian NB, linear SVM, KNN or MLP on standardized data.
inline TrainedModel fit_baseline(ModelKind kind, const FeatureMatrix& data, const Hyperparams& hp, std::uint64_t seed) {
    if (kind == ModelKind::forest || kind == ModelKind::tree)
        throw InvalidValue("fit_baseline covers gaussian_nb, linear_svm, knn and mlp");
    return fit_model(kind, data, hp, seed);
}

inline int predict_row(const TrainedModel& m, std::span<const double> raw_row) {
    if (raw_row.size() != m.dims)
        throw DimensionMismatch("row has " + std::to_string(raw_row.size()) + " columns, model expects " +
                                std::to_string(m.dims));
    std::vector<double> x(raw_row.begin(), raw_row.end());
    m.prep.apply_row(x);
    return std::visit(
        [&](const auto& p) -> int {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ConstantModel>) return p.label;
            else return p.predict(x);
        },
        m.params);
}

inline std::vector<int> predict(const TrainedModel& m, const FeatureMatrix& rows) {
    if (rows.d != m.dims)
        throw DimensionMismatch("matrix has " + std::to_string(rows.d) + " columns, model expects " +
                                std::to_string(m.dims));
    std::vector<int> out(rows.n);
    for (std::size_t i = 0; i < rows.n; ++i) out[i] = predict_row(m, rows.row(i));
    return out;
}

// ---------------------------------------------------------------------------
// Persistence: a line-oriented text container. Doubles are written in
// shortest round-trip form, so a loaded model predicts bit-identically.

namespace serial {

inline constexpr std::string_view kMagic = "unrest-model";
inline constexpr int kVersion = 1;

class Writer {
public:
    Writer& word(std::string_view w) {
        sep();
        out_ += w;
        return *this;
    }
    Writer& num(double v) {
        sep();
        append_double(out_, v);
        return *this;
    }
    Writer& integer(long long v) {
        sep();
        out_ += std::to_string(v);
        return *this;
    }
    Writer& nums(const std::vector<double>& vs) {
        for (double v : vs) num(v);
        return *this;
    }
    void endl() {
        out_ += '\n';
        fresh_ = true;
    }
    std::string str() && { return std::move(out_); }

private:
    void sep() {
        if (!fresh_) out_ += ' ';
        fresh_ = false;
    }
    std::string out_;
    bool fresh_ = true;
};

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::string_view word() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\n')) ++pos_;
        if (pos_ >= text_.size()) throw FormatError("model file truncated");
        std::size_t b = pos_;
        while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\n') ++pos_;
        return text_.substr(b, pos_ - b);
    }
    void expect(std::string_view w) {
        auto got = word();
        if (got != w) throw FormatError("model file: expected '" + std::string(w) + "', got '" + std::string(got) + "'");
    }
    double num() {
        double v;
        auto w = word();
        if (!parse_double(w, v)) throw FormatError("model file: bad number '" + std::string(w) + "'");
        return v;
    }
    long long integer() {
        long long v;
        auto w = word();
        if (!parse_int(w, v)) throw FormatError("model file: bad integer '" + std::string(w) + "'");
        return v;
    }
    std::size_t count() {
        auto v = integer();
        if (v < 0) throw FormatError("model file: negative count");
        return static_cast<std::size_t>(v);
    }
    std::vector<double> nums(std::size_t n) {
        std::vector<double> out(n);
        for (auto& v : out) v = num();
        return out;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

inline void write_tree(Writer& w, const DecisionTree& t) {
    w.word("tree").integer(static_cast<long long>(t.dims)).integer(static_cast<long long>(t.nodes.size())).endl();
    for (const auto& n : t.nodes)
        w.integer(n.feature).num(n.threshold).integer(n.left).integer(n.right).integer(n.label).endl();
}

inline DecisionTree read_tree(Reader& r) {
    r.expect("tree");
    DecisionTree t;
    t.dims = r.count();
    t.nodes.resize(r.count());
    for (auto& n : t.nodes) {
        n.feature = static_cast<int>(r.integer());
        n.threshold = r.num();
        n.left = static_cast<int>(r.integer());
        n.right = static_cast<int>(r.integer());
        n.label = static_cast<int>(r.integer());
        if (n.feature >= static_cast<int>(t.dims)) throw FormatError("tree node feature out of range");
        if (!n.leaf() && (n.left < 0 || n.right < 0 || n.left >= static_cast<int>(t.nodes.size()) ||
                          n.right >= static_cast<int>(t.nodes.size())))
            throw FormatError("tree node child out of range");
    }
    if (t.nodes.empty()) throw FormatError("empty tree");
    return t;
}

} // namespace serial

inline std::string save_model(const TrainedModel& m) {
    using serial::Writer;
    Writer w;
    w.word(serial::kMagic).integer(serial::kVersion).endl();
    w.word("kind").word(to_string(m.kind)).endl();
    w.word("seed").word(std::to_string(m.seed)).endl();
    w.word("dims").integer(static_cast<long long>(m.dims)).endl();
    const auto& h = m.hyper;
    w.word("forest").integer(h.forest.n_trees).integer(h.forest.max_depth).integer(h.forest.min_leaf)
        .integer(h.forest.features_per_split).integer(h.forest.bootstrap).endl();
    w.word("tree").integer(h.tree.max_depth).integer(h.tree.min_leaf).integer(h.tree.features_per_split).endl();
    w.word("svm").num(h.svm.lambda).integer(h.svm.epochs).endl();
    w.word("knn").integer(h.knn_k).endl();
    w.word("mlp").integer(h.mlp.hidden).num(h.mlp.learning_rate).integer(h.mlp.epochs).endl();
    w.word("prep").integer(static_cast<long long>(m.prep.dims())).endl();
    if (!m.prep.identity()) {
        w.nums(m.prep.medians).endl();
        w.nums(m.prep.means).endl();
        w.nums(m.prep.stds).endl();
    }
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ConstantModel>) {
                w.word("params").word("constant").integer(p.label).endl();
            } else if constexpr (std::is_same_v<P, DecisionTree>) {
                w.word("params").word("tree").endl();
                serial::write_tree(w, p);
            } else if constexpr (std::is_same_v<P, RandomForest>) {
                w.word("params").word("forest").integer(static_cast<long long>(p.trees.size())).endl();
                for (const auto& t : p.trees) serial::write_tree(w, t);
            } else if constexpr (std::is_same_v<P, GaussianNB>) {
                w.word("params").word("gaussian_nb").integer(static_cast<long long>(p.mean[0].size())).endl();
                w.num(p.prior[0]).num(p.prior[1]).endl();
                for (int c = 0; c < 2; ++c) {
                    w.nums(p.mean[c]).endl();
                    w.nums(p.var[c]).endl();
                }
            } else if constexpr (std::is_same_v<P, LinearSvm>) {
                w.word("params").word("linear_svm").integer(static_cast<long long>(p.w.size())).endl();
                w.nums(p.w).endl();
            } else if constexpr (std::is_same_v<P, Knn>) {
                w.word("params").word("knn").integer(p.k).integer(static_cast<long long>(p.train.n))
                    .integer(static_cast<long long>(p.train.d)).endl();
                for (std::size_t i = 0; i < p.train.n; ++i) {
                    w.integer(p.train.labels[i]);
                    for (double v : p.train.row(i)) w.num(v);
                    w.endl();
                }
            } else if constexpr (std::is_same_v<P, Mlp>) {
                w.word("params").word("mlp").integer(static_cast<long long>(p.inputs))
                    .integer(static_cast<long long>(p.hidden)).endl();
                w.nums(p.params).endl();
            }
        },
        m.params);
    w.word("end").endl();
    return std::move(w).str();
}

inline TrainedModel load_model(std::string_view text) {
    serial::Reader r(text);
    r.expect(serial::kMagic);
    if (r.integer() != serial::kVersion) throw FormatError("unsupported model version");
    TrainedModel m;
    r.expect("kind");
    auto kind = parse_kind(r.word());
    if (!kind) throw FormatError("unknown model kind");
    m.kind = *kind;
    r.expect("seed");
    if (!parse_int(r.word(), m.seed)) throw FormatError("bad seed");
    r.expect("dims");
    m.dims = r.count();
    auto& h = m.hyper;
    r.expect("forest");
    h.forest.n_trees = static_cast<int>(r.integer());
    h.forest.max_depth = static_cast<int>(r.integer());
    h.forest.min_leaf = static_cast<int>(r.integer());
    h.forest.features_per_split = static_cast<int>(r.integer());
    h.forest.bootstrap = r.integer() != 0;
    r.expect("tree");
    h.tree.max_depth = static_cast<int>(r.integer());
    h.tree.min_leaf = static_cast<int>(r.integer());
    h.tree.features_per_split = static_cast<int>(r.integer());
    r.expect("svm");
    h.svm.lambda = r.num();
    h.svm.epochs = static_cast<int>(r.integer());
    r.expect("knn");
    h.knn_k = static_cast<int>(r.integer());
    r.expect("mlp");
    h.mlp.hidden = static_cast<int>(r.integer());
    h.mlp.learning_rate = r.num();
    h.mlp.epochs = static_cast<int>(r.integer());
    r.expect("prep");
    if (std::size_t pd = r.count(); pd > 0) {
        m.prep.medians = r.nums(pd);
        m.prep.means = r.nums(pd);
        m.prep.stds = r.nums(pd);
    }
    r.expect("params");
    auto tag = r.word();
    if (tag == "constant") {
        m.params = ConstantModel{static_cast<int>(r.integer())};
    } else if (tag == "tree") {
        m.params = serial::read_tree(r);
    } else if (tag == "forest") {
        RandomForest f;
        f.trees.resize(r.count());
        for (auto& t : f.trees) t = serial::read_tree(r);
        m.params = std::move(f);
    } else if (tag == "gaussian_nb") {
        GaussianNB nb;
        auto d = r.count();
        nb.prior[0] = r.num();
        nb.prior[1] = r.num();
        for (int c = 0; c < 2; ++c) {
            nb.mean[c] = r.nums(d);
            nb.var[c] = r.nums(d);
        }
        m.params = std::move(nb);
    } else if (tag == "linear_svm") {
        LinearSvm svm;
        svm.w = r.nums(r.count());
        m.params = std::move(svm);
    } else if (tag == "knn") {
        Knn k;
        k.k = static_cast<int>(r.integer());
        auto n = r.count(), d = r.count();
        k.train = FeatureMatrix(n, d);
        for (std::size_t i = 0; i < n; ++i) {
            k.train.labels[i] = static_cast<int>(r.integer());
            for (std::size_t j = 0; j < d; ++j) k.train.at(i, j) = r.num();
        }
        m.params = std::move(k);
    } else if (tag == "mlp") {
        auto in = r.count(), hid = r.count();
        Mlp mlp(in, hid);
        mlp.params = r.nums(mlp.params.size());
        m.params = std::move(mlp);
    } else {
        throw FormatError("unknown parameter block '" + std::string(tag) + "'");
    }
    r.expect("end");
    return m;
}

} // namespace unrest::models
