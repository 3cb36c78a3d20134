#pragma once

#include <cmath>
#include <span>

#include "unrest/core/error.hpp"

namespace unrest::evaluation {

namespace detail {
inline void check_pair(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) throw LengthMismatch("predictions and labels differ in length");
    if (pred.empty()) throw EmptyInput("no predictions to score");
}
} // namespace detail

/// Fraction of exact matches.
inline double accuracy(std::span<const int> pred, std::span<const int> truth) {
    detail::check_pair(pred, truth);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == truth[i];
    return static_cast<double>(hit) / static_cast<double>(pred.size());
}

/// Mean |pred - truth|. On binary vectors this is 1 - accuracy.
inline double mean_absolute_error(std::span<const int> pred, std::span<const int> truth) {
    detail::check_pair(pred, truth);
    std::size_t miss = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) miss += static_cast<std::size_t>(std::abs(pred[i] - truth[i]));
    return static_cast<double>(miss) / static_cast<double>(pred.size());
}

struct BinaryScores {
    double accuracy = 0;
    double mae = 0;
    double precision = 0;  // 0 when nothing was predicted positive
    double recall = 0;     // 0 when there are no positives
    double f1 = 0;
};

inline BinaryScores score(std::span<const int> pred, std::span<const int> truth) {
    BinaryScores s;
    s.accuracy = accuracy(pred, truth);
    s.mae = mean_absolute_error(pred, truth);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        tp += pred[i] == 1 && truth[i] == 1;
        fp += pred[i] == 1 && truth[i] == 0;
        fn += pred[i] == 0 && truth[i] == 1;
    }
    if (tp + fp) s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn) s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (s.precision + s.recall > 0) s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

} // namespace unrest::evaluation
