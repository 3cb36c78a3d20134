#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "unrest/models/mlp.hpp"

namespace unrest::models {

/// Largest coordinate-wise relative error between an analytic gradient and
/// central differences (L(w + h e_k) - L(w - h e_k)) / 2h. The denominator is
/// max(|analytic|, |numeric|, 1e-12).
inline double gradient_check(const std::function<double(std::span<const double>)>& loss,
                             std::span<const double> analytic, std::vector<double> params, double h = 1e-5) {
    if (analytic.size() != params.size()) throw DimensionMismatch("gradient and parameter sizes differ");
    double worst = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double saved = params[k];
        params[k] = saved + h;
        const double up = loss(params);
        params[k] = saved - h;
        const double down = loss(params);
        params[k] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-12});
        worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
    }
    return worst;
}

inline double gradient_check(const Mlp& model, const FeatureMatrix& sample, double h = 1e-5) {
    auto analytic = model.gradient(model.params, sample);
    return gradient_check([&](std::span<const double> p) { return model.loss(p, sample); }, analytic, model.params, h);
}

} // namespace unrest::models
