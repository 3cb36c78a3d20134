#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "unrest/models/matrix.hpp"

namespace unrest::models {

struct MlpHyperparams {
    int hidden = 16;
    double learning_rate = 0.1;
    int epochs = 200;

    bool operator==(const MlpHyperparams&) const = default;
};

/// One tanh hidden layer, sigmoid output, mean binary cross-entropy.
///
/// Parameters live in one flat vector laid out as
///   [W1 (hidden x inputs, row-major) | b1 (hidden) | w2 (hidden) | b2].
struct Mlp {
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    std::vector<double> params;

    Mlp() = default;
    Mlp(std::size_t in, std::size_t hid) : inputs(in), hidden(hid), params(hid * in + 2 * hid + 1, 0.0) {}

    std::size_t b1_at() const { return hidden * inputs; }
    std::size_t w2_at() const { return b1_at() + hidden; }
    std::size_t b2_at() const { return w2_at() + hidden; }

    /// Output-layer logit; `h` receives the hidden activations.
    double logit(std::span<const double> p, std::span<const double> x, std::vector<double>& h) const {
        h.resize(hidden);
        double z = p[b2_at()];
        for (std::size_t u = 0; u < hidden; ++u) {
            double a = p[b1_at() + u];
            const double* wrow = p.data() + u * inputs;
            for (std::size_t j = 0; j < inputs; ++j) a += wrow[j] * x[j];
            h[u] = std::tanh(a);
            z += p[w2_at() + u] * h[u];
        }
        return z;
    }

    double probability(std::span<const double> x) const {
        std::vector<double> h;
        return 1.0 / (1.0 + std::exp(-logit(params, x, h)));
    }

    int predict(std::span<const double> x) const { return probability(x) > 0.5 ? 1 : 0; }

    /// Mean cross-entropy at parameters `p`.
    double loss(std::span<const double> p, const FeatureMatrix& data) const {
        std::vector<double> h;
        double total = 0.0;
        for (std::size_t i = 0; i < data.n; ++i) {
            const double z = logit(p, data.row(i), h);
            // softplus(z) - y z, stable for large |z|
            const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
            total += softplus - (data.labels[i] ? z : 0.0);
        }
        return total / static_cast<double>(data.n);
    }

    /// Backpropagated gradient of loss() at `p`.
    std::vector<double> gradient(std::span<const double> p, const FeatureMatrix& data) const {
        std::vector<double> g(p.size(), 0.0), h;
        const double inv_n = 1.0 / static_cast<double>(data.n);
        for (std::size_t i = 0; i < data.n; ++i) {
            const auto x = data.row(i);
            const double z = logit(p, x, h);
            const double dz = (1.0 / (1.0 + std::exp(-z)) - (data.labels[i] ? 1.0 : 0.0)) * inv_n;
            g[b2_at()] += dz;
            for (std::size_t u = 0; u < hidden; ++u) {
                g[w2_at() + u] += dz * h[u];
                const double da = dz * p[w2_at() + u] * (1.0 - h[u] * h[u]);
                g[b1_at() + u] += da;
                double* grow = g.data() + u * inputs;
                for (std::size_t j = 0; j < inputs; ++j) grow[j] += da * x[j];
            }
        }
        return g;
    }

    /// One full-batch gradient-descent step.
    void step(const FeatureMatrix& data, double learning_rate) {
        auto g = gradient(params, data);
        for (std::size_t k = 0; k < params.size(); ++k) params[k] -= learning_rate * g[k];
    }

    bool operator==(const Mlp&) const = default;
};

/// Weights uniform in [-0.5, 0.5] from the seed; biases start at zero.
inline Mlp init_mlp(std::size_t inputs, const MlpHyperparams& hp, std::uint64_t seed) {
    if (hp.hidden < 1) throw InvalidValue("mlp hidden units must be >= 1");
    Mlp m(inputs, static_cast<std::size_t>(hp.hidden));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (std::size_t k = 0; k < m.b1_at(); ++k) m.params[k] = u(rng);
    for (std::size_t k = m.w2_at(); k < m.b2_at(); ++k) m.params[k] = u(rng);
    return m;
}

inline Mlp fit_mlp(const FeatureMatrix& data, const MlpHyperparams& hp, std::uint64_t seed) {
    if (data.n == 0) throw EmptyInput("cannot fit an MLP on zero rows");
    Mlp m = init_mlp(data.d, hp, seed);
    for (int e = 0; e < hp.epochs; ++e) m.step(data, hp.learning_rate);
    return m;
}

} // namespace unrest::models
