#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "unrest/models/matrix.hpp"

namespace unrest::models {

inline constexpr double kVarianceFloor = 1e-9;

/// Gaussian naive Bayes over two classes.
struct GaussianNB {
    std::array<double, 2> prior{0.5, 0.5};
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> var;

    std::array<double, 2> log_joint(std::span<const double> x) const {
        std::array<double, 2> lj{};
        for (int c = 0; c < 2; ++c) {
            if (prior[c] <= 0.0) {
                lj[c] = -std::numeric_limits<double>::infinity();
                continue;
            }
            double s = std::log(prior[c]);
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double d = x[j] - mean[c][j];
                s -= 0.5 * (std::log(2.0 * std::numbers::pi * var[c][j]) + d * d / var[c][j]);
            }
            lj[c] = s;
        }
        return lj;
    }

    /// Posterior class probabilities.
    std::array<double, 2> predict_proba(std::span<const double> x) const {
        auto lj = log_joint(x);
        const double m = std::max(lj[0], lj[1]);
        const double e0 = std::exp(lj[0] - m), e1 = std::exp(lj[1] - m);
        return {e0 / (e0 + e1), e1 / (e0 + e1)};
    }

    int predict(std::span<const double> x) const {
        auto lj = log_joint(x);
        return lj[1] > lj[0] ? 1 : 0;
    }

    bool operator==(const GaussianNB&) const = default;
};

inline GaussianNB fit_gaussian_nb(const FeatureMatrix& data) {
    if (data.n == 0) throw EmptyInput("cannot fit naive Bayes on zero rows");
    GaussianNB nb;
    std::array<std::size_t, 2> count{0, 0};
    for (int c = 0; c < 2; ++c) {
        nb.mean[c].assign(data.d, 0.0);
        nb.var[c].assign(data.d, kVarianceFloor);
    }
    for (std::size_t i = 0; i < data.n; ++i) {
        const int c = data.labels[i] != 0;
        ++count[c];
        for (std::size_t j = 0; j < data.d; ++j) nb.mean[c][j] += data.at(i, j);
    }
    for (int c = 0; c < 2; ++c) {
        nb.prior[c] = static_cast<double>(count[c]) / static_cast<double>(data.n);
        if (count[c] == 0) continue;
        for (auto& m : nb.mean[c]) m /= static_cast<double>(count[c]);
        std::vector<double> ss(data.d, 0.0);
        for (std::size_t i = 0; i < data.n; ++i) {
            if ((data.labels[i] != 0) != (c == 1)) continue;
            for (std::size_t j = 0; j < data.d; ++j) {
                const double dv = data.at(i, j) - nb.mean[c][j];
                ss[j] += dv * dv;
            }
        }
        for (std::size_t j = 0; j < data.d; ++j)
            nb.var[c][j] = std::max(ss[j] / static_cast<double>(count[c]), kVarianceFloor);
    }
    return nb;
}

} // namespace unrest::models
