#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "unrest/models/matrix.hpp"

namespace unrest::models {

struct SvmHyperparams {
    double lambda = 1e-3;
    int epochs = 50;

    bool operator==(const SvmHyperparams&) const = default;
};

/// Linear SVM; the last weight multiplies a constant 1 feature (bias).
struct LinearSvm {
    std::vector<double> w;

    double decision(std::span<const double> x) const {
        double s = w.back();
        for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
        return s;
    }
    int predict(std::span<const double> x) const { return decision(x) > 0.0 ? 1 : 0; }

    bool operator==(const LinearSvm&) const = default;
};

/// Pegasos: stochastic sub-gradient descent on the L2-regularized hinge loss
/// with step 1/(lambda t) and projection onto the 1/sqrt(lambda) ball. One
/// epoch visits every row once in a seeded random order.
inline LinearSvm fit_linear_svm(const FeatureMatrix& data, const SvmHyperparams& hp, std::uint64_t seed) {
    if (data.n == 0) throw EmptyInput("cannot fit an SVM on zero rows");
    if (!(hp.lambda > 0)) throw InvalidValue("svm lambda must be > 0");
    LinearSvm svm;
    svm.w.assign(data.d + 1, 0.0);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(data.n);
    std::iota(order.begin(), order.end(), 0);
    const double radius = 1.0 / std::sqrt(hp.lambda);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (hp.lambda * static_cast<double>(t));
            const double y = data.labels[i] ? 1.0 : -1.0;
            const auto x = data.row(i);
            const double margin = y * svm.decision(x);
            const double shrink = 1.0 - eta * hp.lambda;
            for (auto& wj : svm.w) wj *= shrink;
            if (margin < 1.0) {
                for (std::size_t j = 0; j < data.d; ++j) svm.w[j] += eta * y * x[j];
                svm.w.back() += eta * y;
            }
            double norm = 0.0;
            for (double wj : svm.w) norm += wj * wj;
            norm = std::sqrt(norm);
            if (norm > radius)
                for (auto& wj : svm.w) wj *= radius / norm;
        }
    }
    return svm;
}

} // namespace unrest::models
